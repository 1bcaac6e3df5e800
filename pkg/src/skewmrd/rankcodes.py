"""Rank-metric codes spanned by sigma-polynomials.

A :class:`RankCode` is an F_{q^n}-subspace of the skew ring, stored as a
reduced echelon basis of coefficient rows.  :class:`FpSpanCode` covers the
codes that are only F_q-linear (twisted Gabidulin codes with h != 0).
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .gf import FieldCtx
from .linalg import reduce_against, rref_ext, rref_mod_p
from .skew import (SigmaAut, SigmaPoly, SkewError, identity, monomial, sp_add,
                   sp_eval_all, sp_from_frobenius_form, sp_rank_eval, sp_scale,
                   sp_to_frobenius_form)

DEFAULT_CAP = 2 * 10 ** 7


class NormConditionError(ValueError):
    """A parameter violates the norm condition that makes the code MRD."""


class CapExceededError(RuntimeError):
    """An exhaustive computation would exceed the configured size cap."""


def default_cap() -> int:
    env = os.environ.get("SKEWMRD_CAP")
    return int(env) if env else DEFAULT_CAP


class NewFamilyWarning(UserWarning):
    """Raised when the new family is built outside the range of its equivalence results."""


@dataclass(frozen=True)
class RankCode:
    ctx: FieldCtx = field(repr=False)
    sigma: SigmaAut
    basis: tuple
    label: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> list[int]:
        return [next(i for i, c in enumerate(b.coeffs) if c) for b in self.basis]

    def rows(self) -> list[list[int]]:
        return [list(b.coeffs) for b in self.basis]

    def theta_rows(self) -> list[list[int]]:
        return [list(sp_to_frobenius_form(b).coeffs) for b in self.basis]

    @cached_property
    def _echelon(self):
        # bases are not always stored reduced (new_family, adjoint_code)
        return rref_ext(self.ctx, self.rows())

    def contains(self, f: SigmaPoly) -> bool:
        if f.sigma.s != self.sigma.s:
            f = sp_from_frobenius_form(sp_to_frobenius_form(f), self.sigma)
        rows, piv = self._echelon
        rest = reduce_against(self.ctx, rows, piv, f.coeffs)
        return not any(rest)

    def same_space(self, other: "RankCode") -> bool:
        """Equality as sets of endomorphisms, regardless of the generator tag."""
        if self.ctx != other.ctx or self.dim != other.dim:
            return False
        a, pa = rref_ext(self.ctx, self.theta_rows())
        b, pb = rref_ext(self.ctx, other.theta_rows())
        return pa == pb and a == b

    def with_label(self, **extra) -> "RankCode":
        lab = dict(self.label)
        lab.update(extra)
        return RankCode(self.ctx, self.sigma, self.basis, lab)

    def codeword(self, coords: Sequence[int]) -> SigmaPoly:
        acc = SigmaPoly(self.ctx, self.sigma, (0,) * self.ctx.n)
        for c, b in zip(coords, self.basis):
            if c:
                acc = sp_add(acc, sp_scale(b, c))
        return acc

    def rewritten(self, sigma: SigmaAut) -> "RankCode":
        """The same space with every basis element re-expressed over ``sigma``."""
        polys = [sp_from_frobenius_form(sp_to_frobenius_form(b), sigma) for b in self.basis]
        return code_span(polys, sigma=sigma, label=self.label)


def code_span(polys: Iterable[SigmaPoly], sigma: SigmaAut | None = None,
              label: dict | None = None) -> RankCode:
    """F_{q^n}-span of sigma-polynomials sharing one field and generator."""
    polys = list(polys)
    if not polys and sigma is None:
        raise SkewError("an empty span needs an explicit generator")
    sigma = sigma or polys[0].sigma
    ctx = sigma.ctx
    for f in polys:
        if f.ctx != ctx or f.sigma.s != sigma.s:
            raise SkewError("code_span needs a shared field and generator")
    rows, _ = rref_ext(ctx, [f.coeffs for f in polys])
    basis = tuple(SigmaPoly(ctx, sigma, tuple(r)) for r in rows)
    return RankCode(ctx, sigma, basis, dict(label or {"family": "span"}))


def code_sum(codes: Sequence[RankCode], label: dict | None = None) -> RankCode:
    """Sum of codes over the same field; generators are unified through theta."""
    sigma = codes[0].sigma
    polys = []
    for c in codes:
        for b in c.basis:
            polys.append(b if b.sigma.s == sigma.s else
                         sp_from_frobenius_form(sp_to_frobenius_form(b), sigma))
    return code_span(polys, sigma=sigma, label=label)


# -- constructors --------------------------------------------------------------


def gabidulin(k: int, sigma: SigmaAut) -> RankCode:
    n = sigma.ctx.n
    if not 1 <= k <= n:
        raise ValueError(f"k = {k} outside 1..{n}")
    polys = [monomial(sigma, i) for i in range(k)]
    return code_span(polys, label={"family": "gabidulin", "k": k, "s": sigma.s})


def _twist_condition(ctx: FieldCtx, eta: int, k: int):
    target = 1 if (ctx.n * k) % 2 == 0 else ctx.minus_one
    if eta and ctx.rel_norm(eta, "q") == target:
        raise NormConditionError("norm condition violated: N(eta) = (-1)^(nk)")


def twisted_gabidulin(k: int, sigma: SigmaAut, eta: int, h: int = 0):
    """The twisted code of dimension k; F_{q^n}-linear (a RankCode) exactly when h = 0.

    For h != 0 the F_q-linear code is returned as an :class:`FpSpanCode`.
    """
    ctx = sigma.ctx
    n = ctx.n
    if not 1 <= k <= n - 1:
        raise ValueError(f"k = {k} outside 1..{n - 1}")
    if not 0 <= h <= n - 1:
        raise ValueError(f"h = {h} outside 0..{n - 1}")
    _twist_condition(ctx, eta, k)
    label = {"family": "twisted", "k": k, "s": sigma.s, "eta": eta, "h": h}
    if h == 0:
        polys = [SigmaPoly(ctx, sigma, tuple(1 if j == 0 else (eta if j == k else 0)
                                             for j in range(n)))]
        polys += [monomial(sigma, i) for i in range(1, k)]
        return code_span(polys, label=label)
    gens = []
    for j in range(ctx.m):
        beta = ctx.p ** j
        first = {0: beta}
        if eta:
            first[k] = ctx.mul(sigma.apply(beta, h), eta)
        gens.append(_poly(sigma, first))
        for i in range(1, k):
            gens.append(monomial(sigma, i, beta))
    return FpSpanCode.from_polys(gens, sigma, label)


def _poly(sigma, terms):
    coeffs = [0] * sigma.ctx.n
    for i, c in terms.items():
        coeffs[i] = c
    return SigmaPoly(sigma.ctx, sigma, tuple(coeffs))


@dataclass(frozen=True)
class NewFamilyParams:
    h: int
    t: int
    sigma: SigmaAut

    def __post_init__(self):
        ctx = self.sigma.ctx
        if ctx.p == 2:
            raise NormConditionError("the new family needs q odd")
        if self.t != ctx.t:
            raise ValueError(f"t = {self.t} does not match the field (t = {ctx.t})")
        if self.t < 3:
            raise ValueError("the new family needs t >= 3")
        if self.h == 0 or ctx.rel_norm(self.h, "q^t") != ctx.minus_one:
            raise NormConditionError("norm condition violated: h^(q^t+1) != -1")


def valid_h(ctx: FieldCtx) -> list[int]:
    """All h with h^(q^t+1) = -1, sorted."""
    return ctx.norm_fiber(-1)


def psi_poly(params: NewFamilyParams) -> SigmaPoly:
    """x^s + x^(s^(t-1)) + h s(h) x^(s^(t+1)) + h s^-1(h^-1) x^(s^(2t-1)) for s = sigma."""
    sigma, t, h = params.sigma, params.t, params.h
    ctx = sigma.ctx
    c3 = ctx.mul(h, sigma.apply(h, 1))
    c4 = ctx.mul(h, sigma.apply(ctx.inv(h), -1))
    terms = {1: 1, t - 1: 1, t + 1: c3, 2 * t - 1: c4}
    return _poly(sigma, terms)


def special_case(ctx: FieldCtx, h: int) -> str:
    """Which earlier scattered family the parameter h specializes to, if any."""
    if ctx.in_subfield(h, ctx.r):
        return "h in F_q"
    if ctx.in_subfield(h, 2 * ctx.r):
        return "h in F_q^2"
    return "general"


def new_family(params: NewFamilyParams) -> RankCode:
    """The two-dimensional code spanned by x and psi."""
    ctx = params.sigma.ctx
    label = {"family": "new", "h": params.h, "t": params.t, "s": params.sigma.s,
             "special": special_case(ctx, params.h)}
    if params.t < 5:
        label["warning"] = "t < 5: equivalence results are not claimed"
        warnings.warn("new family with t < 5", NewFamilyWarning, stacklevel=2)
    psi = psi_poly(params)
    return RankCode(ctx, params.sigma, (identity(params.sigma), psi), label)


# -- F_q-linear codes ------------------------------------------------------------


def poly_to_fp(f: SigmaPoly) -> np.ndarray:
    return f.ctx.digits(np.array(f.coeffs, dtype=np.int64)).reshape(-1)


def fp_to_poly(vec, sigma: SigmaAut) -> SigmaPoly:
    ctx = sigma.ctx
    digs = np.asarray(vec, dtype=np.int64).reshape(ctx.n, ctx.m)
    return SigmaPoly(ctx, sigma, tuple(int(x) for x in ctx.undigits(digs)))


@dataclass(frozen=True)
class FpSpanCode:
    """An F_p-subspace of sigma-polynomials, stored as an RREF over F_p."""

    ctx: FieldCtx = field(repr=False)
    sigma: SigmaAut
    matrix: np.ndarray = field(repr=False)
    pivots: tuple
    label: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_polys(cls, polys, sigma: SigmaAut, label=None) -> "FpSpanCode":
        ctx = sigma.ctx
        rows = np.array([poly_to_fp(f) for f in polys], dtype=np.int64).reshape(-1, ctx.n * ctx.m)
        red, piv = rref_mod_p(rows, ctx.p) if rows.shape[0] else (rows, [])
        return cls(ctx, sigma, red, tuple(piv), dict(label or {}))

    @classmethod
    def from_code(cls, code: RankCode) -> "FpSpanCode":
        ctx = code.ctx
        gens = [sp_scale(b, ctx.p ** j) for b in code.basis for j in range(ctx.m)]
        return cls.from_polys(gens, code.sigma, code.label)

    @property
    def fp_dim(self) -> int:
        return self.matrix.shape[0]

    def basis_polys(self) -> list[SigmaPoly]:
        return [fp_to_poly(r, self.sigma) for r in self.matrix]


# -- minimum distance ------------------------------------------------------------


def _basis_values(f: SigmaPoly) -> np.ndarray:
    ctx = f.ctx
    e = np.array([ctx.p ** j for j in range(ctx.m)], dtype=np.int64)
    return sp_eval_all(f, e)


def _scalar_list(ctx: FieldCtx) -> np.ndarray:
    """0 followed by g^0, g^1, ...: the enumeration order of projective coordinates."""
    if ctx.tables:
        return np.concatenate([[0], ctx.exp2[: ctx.order]]).astype(np.int64)
    if ctx.size > 2 ** 26:
        raise CapExceededError("field too large to enumerate")
    out = np.empty(ctx.size, dtype=np.int64)
    out[0] = 0
    cur = 1
    for i in range(ctx.order):
        out[i + 1] = cur
        cur = ctx.mul(cur, ctx.primitive_root)
    return out


def representative_count(code: RankCode) -> int:
    q = code.ctx.size
    return (q ** code.dim - 1) // (q - 1)


def _decode_reps(code: RankCode, start: int, stop: int, scalars: np.ndarray):
    """Coordinate rows for representatives start..stop-1 (last nonzero coordinate 1)."""
    k, qn = code.dim, code.ctx.size
    rows = np.zeros((stop - start, k), dtype=np.int64)
    offset = 0
    for lead in range(k):
        cnt = qn ** lead
        lo, hi = max(start, offset), min(stop, offset + cnt)
        if lo < hi:
            idx = np.arange(lo - offset, hi - offset, dtype=np.int64)
            sl = slice(lo - start, hi - start)
            rows[sl, lead] = 1
            rem = idx.copy()
            for i in range(lead):
                rows[sl, i] = scalars[rem % qn]
                rem //= qn
        offset += cnt
    return rows


def codeword_ranks_enumerate(code: RankCode, cap: int | None = None, chunk: int = 1 << 15,
                             stop_below: int | None = None) -> np.ndarray:
    """Ranks of all projective representatives by direct elimination."""
    ctx = code.ctx
    total = representative_count(code)
    cap = default_cap() if cap is None else cap
    if total > cap:
        raise CapExceededError(f"{total} codewords exceed the cap {cap}")
    scalars = _scalar_list(ctx)
    vals = np.stack([_basis_values(b) for b in code.basis])  # (k, m)
    out = np.empty(total, dtype=np.int64)
    for start in range(0, total, chunk):
        stop = min(total, start + chunk)
        coords = _decode_reps(code, start, stop, scalars)
        acc = np.zeros((stop - start, ctx.m), dtype=np.int64)
        for i in range(code.dim):
            acc = ctx.vadd(acc, ctx.vmul(coords[:, i:i + 1], vals[i][None, :]))
        out[start:stop] = kernels.batch_rank_mod_p(ctx.digits(acc), ctx.p) // ctx.r
        if stop_below is not None and out[start:stop].min() < stop_below:
            return out[:stop]
    return out


def _log_q(ctx: FieldCtx, sizes: np.ndarray) -> np.ndarray:
    dims = np.rint(np.log(sizes.astype(float)) / math.log(ctx.q)).astype(np.int64)
    if not np.array_equal(ctx.q ** dims, sizes):
        raise ArithmeticError("kernel size is not a power of q")
    return dims


def codeword_ranks_fiber(code: RankCode) -> np.ndarray:
    """Ranks of all q^n + 1 representatives of a 2-dimensional code via kernel fibers.

    For the codeword f + a*g, its kernel is the common kernel of f and g together with
    the points where g is nonzero and -f/g takes the value a.
    """
    if code.dim != 2:
        raise ValueError("the fiber engine handles 2-dimensional codes")
    ctx = code.ctx
    g, f = code.basis
    alpha = ctx.all_elements()
    ga = sp_eval_all(g, alpha)
    fa = sp_eval_all(f, alpha)
    gnz = ga != 0
    common = int(np.count_nonzero(~gnz & (fa == 0)))
    vals = ctx.vneg(ctx.vmul(fa[gnz], ctx.vinv(ga[gnz])))
    counts = np.bincount(vals, minlength=ctx.size)
    scalars = _scalar_list(ctx)
    ker = counts[scalars] + common
    out = np.empty(ctx.size + 1, dtype=np.int64)
    out[0] = ctx.n - _log_q(ctx, np.array([ctx.size - np.count_nonzero(gnz)]))[0]
    out[1:] = ctx.n - _log_q(ctx, ker)
    return out


def codeword_ranks(code: RankCode, method: str = "auto", cap: int | None = None) -> np.ndarray:
    if method == "auto":
        method = "fiber" if code.dim == 2 else "enumerate"
    if method == "fiber":
        return codeword_ranks_fiber(code)
    if method == "enumerate":
        return codeword_ranks_enumerate(code, cap=cap)
    raise ValueError(f"unknown method {method!r}")


def min_distance_report(code: RankCode, method: str = "auto", cap: int | None = None) -> dict:
    """Minimum distance with a witness given as the coordinates of a minimum-rank codeword."""
    ctx = code.ctx
    if code.dim == 0:
        raise ValueError("the zero code has no minimum distance")
    if code.dim == 1:
        d = sp_rank_eval(code.basis[0])
        coords = [1]
    else:
        ranks = codeword_ranks(code, method=method, cap=cap)
        pos = int(np.argmin(ranks))
        d = int(ranks[pos])
        coords = [int(c) for c in _decode_reps(code, pos, pos + 1, _scalar_list(ctx))[0]]
    return {
        "code": code.label,
        "dim": code.dim,
        "min_distance": d,
        "mrd": d == ctx.n - code.dim + 1,
        "witness": [ctx.to_coeffs(c) for c in coords],
    }


def min_distance(code: RankCode, method: str = "auto", cap: int | None = None) -> int:
    return min_distance_report(code, method=method, cap=cap)["min_distance"]


def is_mrd(code: RankCode, method: str = "auto", cap: int | None = None) -> bool:
    """Singleton bound with equality: d = n - k + 1 for an F_{q^n}-linear code of dimension k."""
    return min_distance(code, method=method, cap=cap) == code.ctx.n - code.dim + 1


def linear_set_size(f: SigmaPoly) -> int:
    """Number of points <(a, f(a))> over F_{q^n}, i.e. of distinct ratios f(a)/a for a != 0."""
    ctx = f.ctx
    alpha = ctx.all_elements()[1:]
    ratios = ctx.vmul(sp_eval_all(f, alpha), ctx.vinv(alpha))
    return int(np.count_nonzero(np.bincount(ratios, minlength=ctx.size)))


def is_scattered(f: SigmaPoly) -> bool:
    ctx = f.ctx
    return linear_set_size(f) == ctx.order // (ctx.q - 1)
