"""Dense polynomials over a prime field F_p.

A polynomial a_0 + a_1 X + ... + a_d X^d is a list ``[a_0, ..., a_d]`` of
integers in ``range(p)`` with nonzero last entry; ``[]`` is the zero
polynomial.  These helpers back modulus selection in :mod:`skewmrd.gf` and
the dense-gcd oracle in :mod:`skewmrd.census`.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


def is_prime(m: int) -> bool:
    if m < 2:
        return False
    if m % 2 == 0:
        return m == 2
    for d in range(3, math.isqrt(m) + 1, 2):
        if m % d == 0:
            return False
    return True


@lru_cache(maxsize=None)
def prime_factors(m: int) -> tuple[int, ...]:
    """Distinct prime factors of ``m`` by trial division."""
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1 if d == 2 else 2
    if m > 1:
        out.append(m)
    return tuple(out)


def trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def deg(a: list[int]) -> int:
    return len(a) - 1


def add(a, b, p):
    n = max(len(a), len(b))
    return trim([((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p
                 for i in range(n)])


def mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return trim([c % p for c in out])


def divmod_(a, b, p):
    """Quotient and remainder of ``a`` by nonzero ``b``."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    db = len(b) - 1
    inv = pow(b[-1], p - 2, p)
    if len(a) <= db:
        return [], trim(a)
    q = [0] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] % p
        if c:
            c = c * inv % p
            q[i - db] = c
            for j in range(db + 1):
                a[i - db + j] = (a[i - db + j] - c * b[j]) % p
    return trim(q), trim([c % p for c in a[:db]])


def mod(a, b, p):
    return divmod_(a, b, p)[1]


def mulmod(a, b, m, p):
    return mod(mul(a, b, p), m, p)


def powmod(a, e, m, p):
    result = [1]
    base = mod(list(a), m, p)
    while e:
        if e & 1:
            result = mulmod(result, base, m, p)
        base = mulmod(base, base, m, p)
        e >>= 1
    return result


def monic(a, p):
    inv = pow(a[-1], p - 2, p)
    return [c * inv % p for c in a]


def gcd(a, b, p):
    a, b = trim(list(a)), trim(list(b))
    while b:
        a, b = b, mod(a, b, p)
    return monic(a, p) if a else []


def is_irreducible(f, p) -> bool:
    """Rabin's irreducibility test for ``f`` over F_p."""
    f = trim(list(f))
    d = deg(f)
    if d < 1:
        return False
    if d == 1:
        return True
    x = [0, 1]
    for ell in prime_factors(d):
        h = powmod(x, p ** (d // ell), f, p)
        if deg(gcd(f, add(h, [0, p - 1], p), p)) != 0:
            return False
    return powmod(x, p ** d, f, p) == x


def is_primitive(f, p) -> bool:
    """True iff the class of X generates (F_p[X]/f)^*, which forces ``f`` irreducible."""
    f = trim(list(f))
    d = deg(f)
    if d < 1 or f[0] == 0:
        return False
    order = p ** d - 1
    x = [0, 1]
    if powmod(x, order, f, p) != [1]:
        return False
    return all(powmod(x, order // ell, f, p) != [1] for ell in prime_factors(order))


def smallest_primitive(p: int, d: int) -> list[int]:
    """Monic primitive polynomial of degree ``d`` with the smallest integer encoding.

    The encoding is sum(c_i p^i) with c_0 the least significant digit; the leading
    coefficient is fixed to 1, so the scan runs over the lower ``d`` digits.
    """
    for code in range(1, p ** d):
        low = [(code // p ** i) % p for i in range(d)]
        if low[0] == 0:
            continue
        f = low + [1]
        if is_primitive(f, p):
            return f
    raise ValueError(f"no primitive polynomial of degree {d} over F_{p}")


# ---------------------------------------------------------------------------
# numpy-backed dense remainder, for large sparse inputs such as X^N - 1


def dense_binomial(e: int, c: int, p: int) -> np.ndarray:
    """Coefficient array of X^e + c (low-degree first); e = 0 gives the constant 1 + c."""
    a = np.zeros(e + 1, dtype=np.int64)
    a[e] = 1
    a[0] = (a[0] + c) % p
    return a


def dense_gcd_degree(a: np.ndarray, b: np.ndarray, p: int) -> int:
    """Degree of gcd(a, b) over F_p by the Euclidean algorithm on dense arrays.

    Returns -1 when both inputs are zero.
    """
    a = _dense_trim(np.asarray(a, dtype=np.int64) % p)
    b = _dense_trim(np.asarray(b, dtype=np.int64) % p)
    while b.size:
        a, b = b, _dense_rem(a, b, p)
    return a.size - 1


def _dense_trim(a: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(a)
    return a[: nz[-1] + 1].copy() if nz.size else a[:0].copy()


def _dense_rem(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    a = a.copy()
    db = b.size - 1
    inv = pow(int(b[-1]), p - 2, p)
    bb = b[:db]
    i = a.size - 1
    while i >= db:
        c = int(a[i])
        if c:
            c = c * inv % p
            a[i - db:i] = (a[i - db:i] - c * bb) % p
            a[i] = 0
        i -= 1
    return _dense_trim(a[:db] if db else a[:0])
