"""Counting equivalence classes of the codes C_{h,t,sigma}.

Three routes: the closed form as a sum of gcd degrees of binomials over F_p,
an explicit lower bound, and a direct orbit enumeration that applies Burnside's
lemma to the sets A_{h,t} = K h inside the field.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import polyfp
from .gf import FieldCtx, get_field

DENSE_LIMIT = 10 ** 6


class CensusError(ArithmeticError):
    """A division that must be exact was not; indicates a bug rather than data."""


class SmallParameterWarning(UserWarning):
    """The class-count formulas are stated for t >= 5."""


@dataclass(frozen=True)
class CensusParams:
    p: int
    r: int
    t: int

    def __post_init__(self):
        if not polyfp.is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.r < 1 or self.t < 1:
            raise ValueError("r and t must be positive")

    @property
    def q(self) -> int:
        return self.p ** self.r

    @property
    def n(self) -> int:
        return 2 * self.t

    @property
    def j_t(self) -> int:
        return self.p ** (2 * self.r) + 1 if self.t % 4 == 2 else 2

    @property
    def group_order(self) -> int:
        """|Aut(F_{q^n})| = 2rt."""
        return 2 * self.r * self.t


@dataclass
class CensusReport:
    params: CensusParams
    exact: int
    lower_bound: int
    enumerated: int | None = None
    fixed_sets: list = field(default_factory=list)

    def to_json(self) -> dict:
        pr = self.params
        return {"p": pr.p, "r": pr.r, "t": pr.t, "j_t": pr.j_t,
                "exact": self.exact, "lower_bound": self.lower_bound,
                "enumerated": self.enumerated, "fixed_sets": list(self.fixed_sets)}


def euler_phi(m: int) -> int:
    if m < 1:
        raise ValueError("euler_phi needs m >= 1")
    out = m
    for f in polyfp.prime_factors(m):
        out -= out // f
    return out


def _common_roots(M: int, N: int, p: int) -> int:
    """#{z : z^N = 1, z^M = -1} in the algebraic closure, for p coprime to M and N."""
    if p == 2:
        return math.gcd(N, M)
    return math.gcd(N, 2 * M) - math.gcd(N, M)


def binomial_gcd_degree(M: int, N: int, p: int, method: str = "auto") -> int:
    """deg gcd(x^M + 1, x^N - 1) over F_p.

    N = 0 reads x^0 - 1 as the zero polynomial, so the gcd is x^M + 1.  The
    ``roots`` method counts common roots in cyclic groups; ``dense`` runs the
    Euclidean algorithm on coefficient arrays; ``auto`` picks roots whenever p
    divides neither M nor N.
    """
    if M < 1 or N < 0:
        raise ValueError("need M >= 1 and N >= 0")
    if method not in ("auto", "roots", "dense"):
        raise ValueError(f"unknown method {method!r}")
    if N == 0:
        return M
    coprime = M % p != 0 and N % p != 0
    if method == "roots" and not coprime:
        raise ValueError("root counting needs p coprime to M and N")
    if method == "roots" or (method == "auto" and coprime):
        return _common_roots(M, N, p)
    if max(M, N) > DENSE_LIMIT * 8:
        raise ValueError(f"dense gcd with degree {max(M, N)} is too large")
    a = polyfp.dense_binomial(M, 1, p)
    b = polyfp.dense_binomial(N, -1, p)
    return polyfp.dense_gcd_degree(a, b, p)


def _check_t(params: CensusParams):
    if params.t < 5:
        warnings.warn(f"t = {params.t} is below the range t >= 5 of the class-count formulas",
                      SmallParameterWarning, stacklevel=3)


def gcd_degrees(params: CensusParams, method: str = "auto") -> list[int]:
    """deg gcd(x^(p^(rt)+1) + 1, x^(j_t (p^i - 1)) - 1) for i = 0 .. 2rt-1."""
    p, M = params.p, params.p ** (params.r * params.t) + 1
    return [binomial_gcd_degree(M, params.j_t * (p ** i - 1), p, method)
            for i in range(params.group_order)]


def _exact_div(num: int, den: int, what: str) -> int:
    if num % den:
        raise CensusError(f"{what}: {num} is not divisible by {den}")
    return num // den


def exact_count(params: CensusParams, method: str = "auto") -> int:
    """phi(t) / (4 r t j_t) * sum_i deg gcd(...), with the division checked."""
    _check_t(params)
    total = sum(gcd_degrees(params, method))
    pr = params
    return _exact_div(euler_phi(pr.t) * total, 4 * pr.r * pr.t * pr.j_t, "exact count")


def fixed_set_sizes(params: CensusParams, method: str = "auto") -> list[int]:
    """|X^(theta^i)| = deg gcd(...) / j_t from the gcd degrees."""
    return [_exact_div(d, params.j_t, f"fixed set {i}")
            for i, d in enumerate(gcd_degrees(params, method))]


def simplified_fixed_sets(params: CensusParams) -> list[int] | None:
    """gcd(p^(rt)+1, j_t (p^i - 1)) per i when p = 1 mod 4 or rt is even, else None."""
    pr = params
    if not (pr.p % 4 == 1 or (pr.r * pr.t) % 2 == 0):
        return None
    M = pr.p ** (pr.r * pr.t) + 1
    return [math.gcd(M, pr.j_t * (pr.p ** i - 1)) for i in range(pr.group_order)]


def lower_bound(params: CensusParams) -> int:
    _check_t(params)
    pr = params
    phi, qt = euler_phi(pr.t), pr.q ** pr.t
    if pr.t % 4 == 2:
        return phi * (qt + 1) // (4 * pr.r * pr.t * (pr.q ** 2 + 1))
    return phi * (qt + 1) // (8 * pr.r * pr.t)


# -- enumeration oracle -----------------------------------------------------------


class _UnionFind:
    def __init__(self, size: int):
        self.parent = np.arange(size)

    def find(self, i: int) -> int:
        par = self.parent
        root = i
        while par[root] != root:
            root = par[root]
        while par[i] != root:
            par[i], i = root, par[i]
        return int(root)

    def union(self, i: int, j: int):
        a, b = self.find(i), self.find(j)
        if a != b:
            self.parent[max(a, b)] = min(a, b)

    def labels(self) -> np.ndarray:
        return np.array([self.find(i) for i in range(len(self.parent))])


def k_group(params: CensusParams, ctx: FieldCtx) -> list[int]:
    """K = {1, -1}, or {l : l^(q^2+1) = 1} when t = 2 mod 4."""
    if params.t % 4 != 2:
        return [1, ctx.minus_one]
    f4 = ctx.subfield_elements(4 * params.r)
    return [x for x in f4 if x and ctx.pow(x, params.q ** 2 + 1) == 1]


@dataclass
class Enumeration:
    h_values: list
    sets: int
    orbits: int
    fixed_sets: list
    partition_ok: bool


def enumerate_orbits(params: CensusParams, ctx: FieldCtx | None = None) -> Enumeration:
    """Partition H = {h : h^(q^t+1) = -1} into the sets K h and count p-Frobenius orbits."""
    pr = params
    if ctx is None:
        ctx = get_field(pr.p, pr.r, pr.t)
    if (ctx.p, ctx.r, ctx.t) != (pr.p, pr.r, pr.t):
        raise ValueError("field does not match the census parameters")
    if ctx.size > 2 ** 24:
        raise ValueError(f"field of size {ctx.size} is too large to enumerate")
    hs = np.array(ctx.norm_fiber(-1), dtype=np.int64)
    index = {int(h): i for i, h in enumerate(hs)}
    cls = _UnionFind(len(hs))
    for kappa in k_group(pr, ctx):
        imgs = ctx.vmul(hs, kappa)
        for i, v in enumerate(imgs):
            cls.union(i, index[int(v)])
    set_of = cls.labels()
    reps = sorted(set(set_of.tolist()))
    orb = _UnionFind(len(hs))
    for i, j in enumerate(set_of):
        orb.union(i, int(j))
    fixed = []
    partition_ok = True
    for e in range(pr.group_order):
        imgs = ctx.vfrob(hs, e)
        count = 0
        for rep in reps:
            # rho(K h) is either K h or disjoint from it
            members = np.flatnonzero(set_of == rep)
            targets = {int(set_of[index[int(imgs[m])]]) for m in members}
            partition_ok &= len(targets) == 1
            count += rep in targets
        fixed.append(count)
        if e == 1:
            for i, v in enumerate(imgs):
                orb.union(i, index[int(v)])
    orbits = len(set(orb.labels().tolist()))
    return Enumeration([int(h) for h in hs], len(reps), orbits, fixed, bool(partition_ok))


def burnside_enumerate(params: CensusParams, ctx: FieldCtx | None = None) -> int:
    """Class count from direct orbit enumeration, assembled as |X/G| * phi(t) / 2."""
    _check_t(params)
    enum = enumerate_orbits(params, ctx)
    burnside = Fraction(sum(enum.fixed_sets), params.group_order)
    if burnside != enum.orbits:
        raise CensusError(f"Burnside average {burnside} differs from {enum.orbits} orbits")
    return _exact_div(enum.orbits * euler_phi(params.t), 2, "enumerated count")


def census_report(params: CensusParams, enumerate_: bool = False,
                  ctx: FieldCtx | None = None, method: str = "auto") -> CensusReport:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SmallParameterWarning)
        exact = exact_count(params, method)
        lb = lower_bound(params)
        enumerated = burnside_enumerate(params, ctx) if enumerate_ else None
    if params.t < 5:
        warnings.warn(f"t = {params.t} is below the range t >= 5 of the class-count formulas",
                      SmallParameterWarning, stacklevel=2)
    return CensusReport(params, exact, lb, enumerated, fixed_set_sizes(params, method))
