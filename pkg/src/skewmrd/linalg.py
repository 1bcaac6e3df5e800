"""Small dense linear algebra over F_p and over a FieldCtx."""

from __future__ import annotations

import numpy as np

from .gf import FieldCtx


def rref_mod_p(mat, p: int):
    """Reduced row echelon form over F_p; returns (matrix, pivot columns)."""
    a = np.array(mat, dtype=np.int64) % p
    nrows, ncols = a.shape
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = a[r] * pow(int(a[r, c]), p - 2, p) % p
        col = a[:, c].copy()
        col[r] = 0
        a = (a - col[:, None] * a[r][None, :]) % p
        pivots.append(c)
        r += 1
    return a[:r], pivots


def nullspace_mod_p(mat, p: int) -> np.ndarray:
    """Basis of {v : mat @ v = 0} over F_p, one vector per row."""
    a = np.asarray(mat, dtype=np.int64)
    ncols = a.shape[1]
    red, pivots = rref_mod_p(a, p) if a.shape[0] else (np.zeros((0, ncols), np.int64), [])
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = np.zeros((len(free), ncols), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, pc in enumerate(pivots):
            basis[k, pc] = (-red[i, f]) % p
    return basis


def rref_ext(ctx: FieldCtx, rows):
    """Reduced row echelon form over F_{q^n} of a list of element rows."""
    a = [list(map(int, r)) for r in rows]
    if not a:
        return [], []
    ncols = len(a[0])
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(a):
            break
        piv = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = ctx.inv(a[r][c])
        a[r] = [ctx.mul(x, inv) for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = ctx.neg(a[i][c])
                a[i] = [ctx.add(x, ctx.mul(f, y)) for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank_ext(ctx: FieldCtx, rows) -> int:
    return len(rref_ext(ctx, rows)[1])


def reduce_against(ctx: FieldCtx, basis, pivots, vec):
    """Remainder of ``vec`` after elimination by an RREF basis."""
    v = list(map(int, vec))
    for row, c in zip(basis, pivots):
        if v[c] != 0:
            f = ctx.neg(v[c])
            v = [ctx.add(x, ctx.mul(f, y)) for x, y in zip(v, row)]
    return v


def solve_mod_p(mat, rhs, p: int):
    """One solution x of mat @ x = rhs over F_p, or None."""
    a = np.asarray(mat, dtype=np.int64) % p
    b = np.asarray(rhs, dtype=np.int64).reshape(-1, 1) % p
    aug = np.hstack([a, b])
    red, pivots = rref_mod_p(aug, p)
    ncols = a.shape[1]
    if pivots and pivots[-1] == ncols:
        return None
    x = np.zeros(ncols, dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = red[i, ncols]
    return x
