# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the batch rank kernels in ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()

ctypedef cnp.int64_t i64


cdef int _rank_fp(i64* a, int nrows, int ncols, int p, i64* inv) noexcept nogil:
    cdef int rank = 0, col, i, j, piv
    cdef i64 c, tmp
    for col in range(ncols):
        if rank == nrows:
            break
        piv = -1
        for i in range(rank, nrows):
            if a[i * ncols + col] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != rank:
            for j in range(ncols):
                tmp = a[piv * ncols + j]
                a[piv * ncols + j] = a[rank * ncols + j]
                a[rank * ncols + j] = tmp
        c = inv[a[rank * ncols + col]]
        for j in range(col, ncols):
            a[rank * ncols + j] = a[rank * ncols + j] * c % p
        for i in range(rank + 1, nrows):
            c = a[i * ncols + col]
            if c != 0:
                for j in range(col, ncols):
                    a[i * ncols + j] = (a[i * ncols + j] + (p - c) * a[rank * ncols + j]) % p
        rank += 1
    return rank


def batch_rank_mod_p(mats, int p):
    cdef cnp.ndarray[i64, ndim=3] a = np.ascontiguousarray(np.asarray(mats, dtype=np.int64) % p)
    cdef Py_ssize_t bsz = a.shape[0]
    cdef int nrows = a.shape[1], ncols = a.shape[2]
    cdef cnp.ndarray[i64, ndim=1] out = np.zeros(bsz, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] inv = np.zeros(p, dtype=np.int64)
    cdef Py_ssize_t b
    cdef int x
    for x in range(1, p):
        inv[x] = pow(x, p - 2, p)
    cdef i64* base = <i64*> a.data
    cdef i64* invp = <i64*> inv.data
    cdef Py_ssize_t stride = nrows * ncols
    with nogil:
        for b in range(bsz):
            out[b] = _rank_fp(base + b * stride, nrows, ncols, p, invp)
    return out


def rank_mod_p(mat, int p):
    m = np.asarray(mat, dtype=np.int64)
    if m.size == 0:
        return 0
    return int(batch_rank_mod_p(m[None], p)[0])


cdef inline i64 _mul(i64 x, i64 y, i64* exp2, i64* lg) noexcept nogil:
    if x == 0 or y == 0:
        return 0
    return exp2[lg[x] + lg[y]]


cdef inline i64 _add(i64 x, i64 y, i64* exp2, i64* lg, i64* zech, i64 order) noexcept nogil:
    cdef i64 lx, z
    if x == 0:
        return y
    if y == 0:
        return x
    lx = lg[x]
    z = zech[((lg[y] - lx) % order + order) % order]
    if z < 0:
        return 0
    return exp2[lx + z]


cdef int _rank_ext(i64* a, int nrows, int ncols, i64* exp2, i64* lg, i64* zech,
                   i64 order, i64 neg_shift) noexcept nogil:
    cdef int rank = 0, col, i, j, piv
    cdef i64 c, tmp
    for col in range(ncols):
        if rank == nrows:
            break
        piv = -1
        for i in range(rank, nrows):
            if a[i * ncols + col] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != rank:
            for j in range(ncols):
                tmp = a[piv * ncols + j]
                a[piv * ncols + j] = a[rank * ncols + j]
                a[rank * ncols + j] = tmp
        c = exp2[(order - lg[a[rank * ncols + col]]) % order]
        for j in range(col, ncols):
            a[rank * ncols + j] = _mul(a[rank * ncols + j], c, exp2, lg)
        for i in range(rank + 1, nrows):
            c = a[i * ncols + col]
            if c != 0:
                c = exp2[(lg[c] + neg_shift) % order]
                for j in range(col, ncols):
                    a[i * ncols + j] = _add(a[i * ncols + j],
                                            _mul(c, a[rank * ncols + j], exp2, lg),
                                            exp2, lg, zech, order)
        rank += 1
    return rank


def batch_rank_ext(mats, exp2, log, zech, i64 order, i64 neg_shift):
    cdef cnp.ndarray[i64, ndim=3] a = np.array(mats, dtype=np.int64, copy=True, order="C")
    cdef cnp.ndarray[i64, ndim=1] e2 = np.ascontiguousarray(exp2, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] lg = np.ascontiguousarray(log, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] zc = np.ascontiguousarray(zech, dtype=np.int64)
    cdef Py_ssize_t bsz = a.shape[0]
    cdef int nrows = a.shape[1], ncols = a.shape[2]
    cdef cnp.ndarray[i64, ndim=1] out = np.zeros(bsz, dtype=np.int64)
    cdef Py_ssize_t b
    cdef Py_ssize_t stride = nrows * ncols
    cdef i64* base = <i64*> a.data
    with nogil:
        for b in range(bsz):
            out[b] = _rank_ext(base + b * stride, nrows, ncols, <i64*> e2.data,
                               <i64*> lg.data, <i64*> zc.data, order, neg_shift)
    return out
