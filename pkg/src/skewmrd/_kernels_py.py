"""Pure numpy implementations of the hot kernels.

Each function eliminates a whole batch of small matrices at once, one column
per step.  The compiled module ``_kernels`` exports the same functions.
"""

from __future__ import annotations

import numpy as np


def batch_rank_mod_p(mats, p: int) -> np.ndarray:
    """Rank over F_p of every matrix in a (B, R, C) integer array."""
    a = np.array(mats, dtype=np.int64, copy=True) % p
    if a.ndim != 3:
        raise ValueError("expected a (B, R, C) array")
    bsz, nrows, ncols = a.shape
    inv = np.zeros(p, dtype=np.int64)
    for x in range(1, p):
        inv[x] = pow(x, p - 2, p)
    rank = np.zeros(bsz, dtype=np.int64)
    ar = np.arange(bsz)
    rows = np.arange(nrows)
    for col in range(ncols):
        if nrows == 0:
            break
        colv = a[:, :, col]
        cand = (colv != 0) & (rows[None, :] >= rank[:, None])
        has = cand.any(axis=1)
        if not has.any():
            continue
        piv = np.argmax(cand, axis=1)
        idx = ar[has]
        pr = piv[has]
        rk = rank[has]
        # swap pivot row into position rank
        tmp = a[idx, pr].copy()
        a[idx, pr] = a[idx, rk]
        a[idx, rk] = tmp
        prow = a[idx, rk] * inv[a[idx, rk, col]][:, None] % p
        a[idx, rk] = prow
        factors = a[idx, :, col].copy()
        factors[np.arange(idx.size), rk] = 0
        a[idx] = (a[idx] - factors[:, :, None] * prow[:, None, :]) % p
        rank[has] += 1
    return rank


def rank_mod_p(mat, p: int) -> int:
    m = np.asarray(mat, dtype=np.int64)
    if m.size == 0:
        return 0
    return int(batch_rank_mod_p(m[None], p)[0])


def _vmul(a, b, exp2, log):
    out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
    a, b = np.broadcast_arrays(a, b)
    nz = (a != 0) & (b != 0)
    out[nz] = exp2[log[a[nz]] + log[b[nz]]]
    return out


def _vadd(a, b, exp2, log, zech, order):
    a, b = np.broadcast_arrays(a, b)
    out = np.where(a == 0, b, a).astype(np.int64)
    both = (a != 0) & (b != 0)
    if both.any():
        la = log[a[both]]
        lb = log[b[both]]
        z = zech[(lb - la) % order]
        out[both] = np.where(z < 0, 0, exp2[la + np.maximum(z, 0)])
    return out


def batch_rank_ext(mats, exp2, log, zech, order: int, neg_shift: int) -> np.ndarray:
    """Rank over the extension field of every matrix in a (B, R, C) element array.

    Elements are field integers; multiplication and addition go through the
    exp/log/Zech tables and negation adds ``neg_shift`` to the logarithm.
    """
    a = np.array(mats, dtype=np.int64, copy=True)
    if a.ndim != 3:
        raise ValueError("expected a (B, R, C) array")
    exp2 = np.asarray(exp2, dtype=np.int64)
    log = np.asarray(log, dtype=np.int64)
    zech = np.asarray(zech, dtype=np.int64)
    bsz, nrows, ncols = a.shape
    rank = np.zeros(bsz, dtype=np.int64)
    ar = np.arange(bsz)
    rows = np.arange(nrows)
    for col in range(ncols):
        if nrows == 0:
            break
        colv = a[:, :, col]
        cand = (colv != 0) & (rows[None, :] >= rank[:, None])
        has = cand.any(axis=1)
        if not has.any():
            continue
        piv = np.argmax(cand, axis=1)
        idx = ar[has]
        pr = piv[has]
        rk = rank[has]
        tmp = a[idx, pr].copy()
        a[idx, pr] = a[idx, rk]
        a[idx, rk] = tmp
        lead = a[idx, rk, col]
        inv_lead = exp2[(-log[lead]) % order]
        prow = _vmul(a[idx, rk], inv_lead[:, None], exp2, log)
        a[idx, rk] = prow
        factors = a[idx, :, col].copy()
        factors[np.arange(idx.size), rk] = 0
        negf = np.zeros_like(factors)
        nz = factors != 0
        negf[nz] = exp2[(log[factors[nz]] + neg_shift) % order]
        sub = _vmul(negf[:, :, None], prow[:, None, :], exp2, log)
        a[idx] = _vadd(a[idx], sub, exp2, log, zech, order)
        rank[has] += 1
    return rank
