"""The skew ring of sigma-polynomials sum f_i x^(sigma^i) over F_{q^n}.

A :class:`SigmaPoly` stores n coefficients; index i holds the coefficient of
x^(sigma^i) where sigma = (x -> x^(q^s)).  Polynomials tagged with different
generators are compared and composed after rewriting them over theta = (x ->
x^q), the "Frobenius form".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .gf import FieldCtx, FieldError
from .linalg import rank_ext


class SkewError(ValueError):
    """Mismatched rings or an invalid automorphism."""


@dataclass(frozen=True)
class SigmaAut:
    """The generator x -> x^(q^s) of Gal(F_{q^n}/F_q)."""

    ctx: FieldCtx = field(repr=False)
    s: int

    def __post_init__(self):
        n = self.ctx.n
        s = self.s % n
        if n > 1 and (s == 0 or math.gcd(s, n) != 1):
            raise SkewError(f"s = {self.s} is not coprime to n = {n}")
        object.__setattr__(self, "s", s if n > 1 else 1)

    @cached_property
    def inverse_exponent(self) -> int:
        return pow(self.s, -1, self.ctx.n) if self.ctx.n > 1 else 1

    @property
    def n(self) -> int:
        return self.ctx.n

    def apply(self, a: int, i: int = 1) -> int:
        """sigma^i(a)."""
        return self.ctx.sigma(a, self.s * i)

    def vapply(self, a, i: int = 1):
        return self.ctx.vsigma(a, self.s * i)

    def power(self, j: int) -> "SigmaAut":
        """sigma^j as a new generator (j must be coprime to n)."""
        return SigmaAut(self.ctx, self.s * j)


def theta(ctx: FieldCtx) -> SigmaAut:
    return SigmaAut(ctx, 1)


def generator_exponents(n: int) -> list[int]:
    return [s for s in range(1, n) if math.gcd(s, n) == 1] if n > 1 else [1]


@dataclass(frozen=True)
class SigmaPoly:
    ctx: FieldCtx = field(repr=False)
    sigma: SigmaAut
    coeffs: tuple

    def __post_init__(self):
        if self.sigma.ctx != self.ctx:
            raise SkewError("automorphism and polynomial live over different fields")
        c = tuple(int(x) for x in self.coeffs)
        if len(c) != self.ctx.n:
            raise SkewError(f"expected {self.ctx.n} coefficients, got {len(c)}")
        object.__setattr__(self, "coeffs", c)

    @property
    def s(self) -> int:
        return self.sigma.s

    def support(self) -> set[int]:
        return {i for i, c in enumerate(self.coeffs) if c}

    def degree(self) -> int:
        """sigma-degree; -1 for the zero polynomial."""
        sup = self.support()
        return max(sup) if sup else -1

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __call__(self, a):
        return sp_eval(self, a)

    def __add__(self, other: "SigmaPoly") -> "SigmaPoly":
        return sp_add(self, other)

    def __sub__(self, other: "SigmaPoly") -> "SigmaPoly":
        return sp_add(self, sp_scale(other, self.ctx.minus_one))

    def __matmul__(self, other: "SigmaPoly") -> "SigmaPoly":
        return sp_compose(self, other)

    def to_json(self) -> dict:
        return {"s": self.s, "coeffs": [self.ctx.to_coeffs(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, ctx: FieldCtx, data: dict) -> "SigmaPoly":
        coeffs = [ctx.from_coeffs(c) for c in data["coeffs"]]
        return cls(ctx, SigmaAut(ctx, int(data["s"])), tuple(coeffs))


# -- constructors -------------------------------------------------------------


def sp_new(sigma: SigmaAut, terms) -> SigmaPoly:
    """Build from a dense coefficient list or a {index: coeff} mapping."""
    n = sigma.ctx.n
    coeffs = [0] * n
    items = terms.items() if isinstance(terms, dict) else enumerate(terms)
    for i, c in items:
        i %= n
        coeffs[i] = sigma.ctx.add(coeffs[i], int(c))
    return SigmaPoly(sigma.ctx, sigma, tuple(coeffs))


def monomial(sigma: SigmaAut, i: int, c: int = 1) -> SigmaPoly:
    return sp_new(sigma, {i: c})


def identity(sigma: SigmaAut) -> SigmaPoly:
    return monomial(sigma, 0)


def zero(sigma: SigmaAut) -> SigmaPoly:
    return sp_new(sigma, {})


def trace_poly(sigma: SigmaAut) -> SigmaPoly:
    """Tr_{q^n/q} = x + x^sigma + ... + x^(sigma^(n-1)) (the same map for every generator)."""
    return sp_new(sigma, [1] * sigma.ctx.n)


def random_poly(sigma: SigmaAut, rng: np.random.Generator, degree: int | None = None) -> SigmaPoly:
    n = sigma.ctx.n
    coeffs = rng.integers(0, sigma.ctx.size, n)
    if degree is not None:
        coeffs[degree + 1:] = 0
        if coeffs[degree] == 0:
            coeffs[degree] = 1
    return SigmaPoly(sigma.ctx, sigma, tuple(int(c) for c in coeffs))


# -- ring operations ------------------------------------------------------------


def _same_ring(f: SigmaPoly, g: SigmaPoly):
    if f.ctx != g.ctx:
        raise SkewError("polynomials over different fields")
    if f.sigma.s != g.sigma.s:
        raise SkewError(f"polynomials over different generators (s={f.s} and s={g.s})")


def sp_add(f: SigmaPoly, g: SigmaPoly) -> SigmaPoly:
    _same_ring(f, g)
    ctx = f.ctx
    return SigmaPoly(ctx, f.sigma, tuple(ctx.add(a, b) for a, b in zip(f.coeffs, g.coeffs)))


def sp_scale(f: SigmaPoly, c: int) -> SigmaPoly:
    """Left scalar multiple c*f(x)."""
    ctx = f.ctx
    return SigmaPoly(ctx, f.sigma, tuple(ctx.mul(c, a) for a in f.coeffs))


def sp_lincomb(terms: Iterable[tuple[int, SigmaPoly]]) -> SigmaPoly:
    terms = list(terms)
    acc = zero(terms[0][1].sigma)
    for c, f in terms:
        acc = sp_add(acc, sp_scale(f, c))
    return acc


def sp_eval(f: SigmaPoly, a: int) -> int:
    ctx = f.ctx
    acc = 0
    for i, c in enumerate(f.coeffs):
        if c:
            acc = ctx.add(acc, ctx.mul(c, f.sigma.apply(a, i)))
    return acc


def sp_eval_all(f: SigmaPoly, values) -> np.ndarray:
    """Vectorized evaluation on an array of field elements."""
    ctx = f.ctx
    vals = np.asarray(values, dtype=np.int64)
    acc = np.zeros(vals.shape, dtype=np.int64)
    for i, c in enumerate(f.coeffs):
        if c:
            acc = ctx.vadd(acc, ctx.vmul(f.sigma.vapply(vals, i), c))
    return acc


def sp_compose(f: SigmaPoly, g: SigmaPoly) -> SigmaPoly:
    """f o g, using (f_i x^(s^i)) o (g_j x^(s^j)) = f_i s^i(g_j) x^(s^(i+j))."""
    _same_ring(f, g)
    ctx, n = f.ctx, f.ctx.n
    out = [0] * n
    for i, fi in enumerate(f.coeffs):
        if not fi:
            continue
        for j, gj in enumerate(g.coeffs):
            if gj:
                k = (i + j) % n
                out[k] = ctx.add(out[k], ctx.mul(fi, f.sigma.apply(gj, i)))
    return SigmaPoly(ctx, f.sigma, tuple(out))


def sp_adjoint(f: SigmaPoly) -> SigmaPoly:
    """f^T = sum sigma^(n-i)(f_i) x^(sigma^(n-i)), the adjoint for the trace form."""
    n = f.ctx.n
    out = [0] * n
    for i, c in enumerate(f.coeffs):
        if c:
            out[(n - i) % n] = f.sigma.apply(c, n - i)
    return SigmaPoly(f.ctx, f.sigma, tuple(out))


def sp_apply_field_aut(f: SigmaPoly, e: int) -> SigmaPoly:
    """Apply a -> a^(p^e) to every coefficient."""
    return SigmaPoly(f.ctx, f.sigma, tuple(f.ctx.frobenius(c, e) for c in f.coeffs))


# -- reindexing -------------------------------------------------------------------


def sp_phi_map(f: SigmaPoly, target: SigmaAut | int) -> SigmaPoly:
    """Keep the coefficients and reread x^(sigma^i) as x^((sigma^s)^i).

    ``target`` is the new generator, or the exponent s with target = sigma^s.
    """
    if isinstance(target, int):
        if math.gcd(target, f.ctx.n) != 1:
            raise SkewError(f"exponent {target} is not coprime to n = {f.ctx.n}")
        target = f.sigma.power(target)
    if target.ctx != f.ctx:
        raise SkewError("target automorphism over a different field")
    return SigmaPoly(f.ctx, target, f.coeffs)


def sp_to_frobenius_form(f: SigmaPoly) -> SigmaPoly:
    """The same endomorphism written over theta: index i moves to s*i mod n."""
    n = f.ctx.n
    out = [0] * n
    for i, c in enumerate(f.coeffs):
        out[(f.s * i) % n] = c
    return SigmaPoly(f.ctx, theta(f.ctx), tuple(out))


def sp_from_frobenius_form(g: SigmaPoly, sigma: SigmaAut) -> SigmaPoly:
    """Inverse of :func:`sp_to_frobenius_form` toward the generator ``sigma``."""
    if g.s != 1:
        g = sp_to_frobenius_form(g)
    n = g.ctx.n
    out = [0] * n
    for i in range(n):
        out[i] = g.coeffs[(sigma.s * i) % n]
    return SigmaPoly(g.ctx, sigma, tuple(out))


def sp_compose_any(f: SigmaPoly, g: SigmaPoly) -> SigmaPoly:
    """Composition of polynomials over possibly different generators, in Frobenius form."""
    return sp_compose(sp_to_frobenius_form(f), sp_to_frobenius_form(g))


def sp_equal_maps(f: SigmaPoly, g: SigmaPoly) -> bool:
    """Whether f and g define the same endomorphism."""
    return sp_to_frobenius_form(f).coeffs == sp_to_frobenius_form(g).coeffs


# -- rank -------------------------------------------------------------------------


def _basis_images(sigma: SigmaAut) -> np.ndarray:
    """sigma^i(p^j) for i < n, j < rn: the F_p power basis under each automorphism."""
    ctx = sigma.ctx
    e = np.array([ctx.p ** j for j in range(ctx.m)], dtype=np.int64)
    return np.stack([sigma.vapply(e, i) for i in range(ctx.n)])


def eval_matrix(f: SigmaPoly) -> np.ndarray:
    """F_p matrix of f on the power basis: column j holds the digits of f(X^j)."""
    ctx = f.ctx
    e = np.array([ctx.p ** j for j in range(ctx.m)], dtype=np.int64)
    return ctx.digits(sp_eval_all(f, e)).T


def sp_rank_eval(f: SigmaPoly) -> int:
    """Rank over F_q by Gaussian elimination of the evaluation matrix."""
    if f.is_zero():
        return 0
    return kernels.rank_mod_p(eval_matrix(f), f.ctx.p) // f.ctx.r


def companion_matrix(f: SigmaPoly) -> list[list[int]]:
    ctx = f.ctx
    k = f.degree()
    ak_inv = ctx.inv(f.coeffs[k])
    mat = [[0] * k for _ in range(k)]
    for i in range(1, k):
        mat[i][i - 1] = 1
    for i in range(k):
        mat[i][k - 1] = ctx.neg(ctx.mul(f.coeffs[i], ak_inv))
    return mat


def sp_rank_companion(f: SigmaPoly) -> int:
    """rk(f) = n - k + rk(C_f C_f^sigma ... C_f^(sigma^(n-1)) - I_k)."""
    ctx, n = f.ctx, f.ctx.n
    if f.is_zero():
        return 0
    k = f.degree()
    if k == 0:
        return n
    cf = companion_matrix(f)
    last = [row[k - 1] for row in cf]
    prod = [row[:] for row in cf]
    for i in range(1, n):
        c = [f.sigma.apply(x, i) for x in last]
        # M * C' = [M[:, 1:], M c'] since C' shifts columns and ends with c'
        new_last = []
        for row in prod:
            acc = 0
            for a, b in zip(row, c):
                if a and b:
                    acc = ctx.add(acc, ctx.mul(a, b))
            new_last.append(acc)
        prod = [row[1:] + [v] for row, v in zip(prod, new_last)]
    for i in range(k):
        prod[i][i] = ctx.sub(prod[i][i], 1)
    return n - k + rank_ext(ctx, prod)


def batch_rank_eval(sigma: SigmaAut, coeffs) -> np.ndarray:
    """sp_rank_eval for every row of a (B, n) coefficient array."""
    ctx = sigma.ctx
    coeffs = np.asarray(coeffs, dtype=np.int64)
    imgs = _basis_images(sigma)  # (n, m)
    vals = np.zeros((coeffs.shape[0], ctx.m), dtype=np.int64)
    for i in range(ctx.n):
        col = coeffs[:, i]
        if np.any(col):
            vals = ctx.vadd(vals, ctx.vmul(col[:, None], imgs[i][None, :]))
    mats = ctx.digits(vals)  # rows = images; rank is transpose-invariant
    return kernels.batch_rank_mod_p(mats, ctx.p) // ctx.r


def batch_rank_companion(sigma: SigmaAut, coeffs) -> np.ndarray:
    """sp_rank_companion for every row of a (B, n) coefficient array."""
    ctx, n = sigma.ctx, sigma.ctx.n
    coeffs = np.asarray(coeffs, dtype=np.int64)
    bsz = coeffs.shape[0]
    out = np.zeros(bsz, dtype=np.int64)
    nzmask = coeffs != 0
    degs = np.where(nzmask.any(axis=1), n - 1 - np.argmax(nzmask[:, ::-1], axis=1), -1)
    out[degs == 0] = n
    for k in range(1, n):
        idx = np.flatnonzero(degs == k)
        if idx.size == 0:
            continue
        c = coeffs[idx]
        ak_inv = ctx.vinv(c[:, k])
        last = ctx.vneg(ctx.vmul(c[:, :k], ak_inv[:, None]))  # (B, k)
        prod = np.zeros((idx.size, k, k), dtype=np.int64)
        for i in range(1, k):
            prod[:, i, i - 1] = 1
        prod[:, :, k - 1] = last
        for i in range(1, n):
            ci = sigma.vapply(last, i)
            acc = np.zeros((idx.size, k), dtype=np.int64)
            for j in range(k):
                acc = ctx.vadd(acc, ctx.vmul(prod[:, :, j], ci[:, j][:, None]))
            prod = np.concatenate([prod[:, :, 1:], acc[:, :, None]], axis=2)
        diag = np.arange(k)
        prod[:, diag, diag] = ctx.vadd(prod[:, diag, diag], ctx.minus_one)
        if ctx.tables:
            neg_shift = ctx.order // 2 if ctx.p != 2 else 0
            rk = kernels.batch_rank_ext(prod, ctx.exp2, ctx.log, ctx.zech, ctx.order, neg_shift)
        else:
            rk = np.array([rank_ext(ctx, m.tolist()) for m in prod], dtype=np.int64)
        out[idx] = n - k + rk
    return out


def sp_rank(f: SigmaPoly) -> int:
    return sp_rank_eval(f)
