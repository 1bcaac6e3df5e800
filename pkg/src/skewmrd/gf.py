"""Arithmetic in the tower F_p < F_q < F_{q^n} with q = p^r and n = 2t.

Elements of F_{q^n} = F_p[X]/(modulus) are plain Python (or numpy) integers in
``range(p**(r*n))``.  The base-p digits of an integer, least significant first,
are its coordinates in the power basis 1, X, X^2, ...  So ``0`` is zero, ``1``
is one, ``p - 1`` is minus one and ``p`` is the class of X.

Two backends sit behind one interface.  For fields with at most ``table_cap``
elements the constructor builds exp/log/Zech tables; larger fields use digit
vectors with precomputed multiplication and Frobenius matrices over F_p.
"""

from __future__ import annotations

import json
import math
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import polyfp

DEFAULT_TABLE_CAP = 2 ** 24
# Table-free fields above this size are outside what the package supports.
MAX_FIELD_SIZE = 2 ** 40


class FieldError(ValueError):
    """Invalid field parameters or an undefined field operation."""


def _digits_of(a: int, p: int, m: int) -> list[int]:
    out = []
    for _ in range(m):
        a, d = divmod(a, p)
        out.append(d)
    return out


class FieldCtx:
    """The field F_{p^{rn}} together with its subfields F_q and F_{q^t}.

    Build through :func:`field_ctx_new` or :func:`get_field`; instances are
    immutable and compare equal when their parameters and modulus agree.
    """

    def __init__(self, p: int, r: int, t: int, modulus: Sequence[int] | None = None,
                 table_cap: int = DEFAULT_TABLE_CAP):
        if not isinstance(p, int) or not polyfp.is_prime(p):
            raise FieldError(f"p = {p!r} is not prime")
        if r < 1 or t < 1:
            raise FieldError("r and t must be positive")
        self.p = p
        self.r = r
        self.t = t
        self.n = 2 * t
        self.q = p ** r
        self.m = r * self.n
        self.size = p ** self.m
        self.order = self.size - 1
        if self.size > MAX_FIELD_SIZE:
            raise FieldError(f"field of size {p}^{self.m} is beyond the supported range")

        if modulus is None:
            mod = polyfp.smallest_primitive(p, self.m)
            primitive = True
        else:
            mod = polyfp.trim([int(c) % p for c in modulus])
            if len(mod) - 1 != self.m:
                raise FieldError(f"modulus must have degree {self.m}, got {len(mod) - 1}")
            mod = polyfp.monic(mod, p)
            if not polyfp.is_irreducible(mod, p):
                raise FieldError("modulus is reducible over F_p")
            primitive = polyfp.is_primitive(mod, p)
        self.modulus = tuple(mod)
        self._pw = np.array([p ** i for i in range(self.m)], dtype=np.int64)
        # X^k mod modulus for k < 2m - 1, as digit rows; drives all matrix products.
        red = np.zeros((2 * self.m - 1, self.m), dtype=np.int64)
        cur = [1]
        for k in range(2 * self.m - 1):
            red[k, :len(cur)] = cur
            cur = polyfp.mod(polyfp.mul(cur, [0, 1], p), list(mod), p)
        self._red = red
        self._conv = np.array([red[i + j] for i in range(self.m) for j in range(self.m)],
                              dtype=np.int64)
        self.primitive_root = p if primitive else self._find_generator()
        self.tables = self.size <= table_cap
        if self.tables:
            self._build_tables()
        else:
            self.exp2 = self.log = self.zech = None
        self._frob_cache: dict[int, np.ndarray] = {}

    # -- construction helpers ------------------------------------------------

    def _find_generator(self) -> int:
        factors = polyfp.prime_factors(self.order)
        for g in range(2, self.size):
            if all(self._slow_pow(g, self.order // ell) != 1 for ell in factors):
                return g
        raise FieldError("no generator found")  # unreachable for a field

    def _mul_matrix(self, c: int) -> np.ndarray:
        """Matrix M over F_p with digits(a*c) = digits(a) @ M."""
        cd = np.array(_digits_of(c, self.p, self.m), dtype=np.int64)
        rows = np.zeros((self.m, self.m), dtype=np.int64)
        for j in range(self.m):
            e = np.zeros(self.m, dtype=np.int64)
            e[j] = 1
            rows[j] = self._dmul(e[None, :], cd[None, :])[0]
        return rows

    def _build_tables(self):
        p, m, order = self.p, self.m, self.order
        block = min(order, max(1, math.isqrt(order)) + 1)
        g = self.primitive_root
        first = np.zeros((block, m), dtype=np.int64)
        first[0, 0] = 1
        step = self._mul_matrix(g)
        for i in range(1, block):
            first[i] = first[i - 1] @ step % p
        jump = self._mul_matrix(self._slow_pow(g, block))
        digs = np.empty((order, m), dtype=np.int64)
        cur = first
        for start in range(0, order, block):
            stop = min(order, start + block)
            digs[start:stop] = cur[: stop - start]
            cur = cur @ jump % p
        exp = (digs @ self._pw).astype(np.int64)
        if np.unique(exp).size != order:
            raise FieldError("primitive root has the wrong order")
        log = np.full(self.size, -1, dtype=np.int64)
        log[exp] = np.arange(order, dtype=np.int64)
        one_plus = exp - exp % p + (exp % p + 1) % p
        zech = log[one_plus]
        self.exp2 = np.concatenate([exp, exp]).astype(np.int64)
        self.log = log
        self.zech = zech
        self._exp_l = self.exp2.tolist()
        self._log_l = log.tolist()
        self._zech_l = zech.tolist()

    # -- digit level ---------------------------------------------------------

    def to_coeffs(self, a: int) -> list[int]:
        """Coordinates of ``a`` in the power basis, low degree first."""
        return _digits_of(int(a), self.p, self.m)

    def from_coeffs(self, coeffs: Iterable[int]) -> int:
        coeffs = [int(c) % self.p for c in coeffs]
        if len(coeffs) > self.m:
            coeffs = polyfp.mod(polyfp.trim(coeffs), list(self.modulus), self.p)
        return sum(c * self.p ** i for i, c in enumerate(coeffs))

    def digits(self, arr) -> np.ndarray:
        """Digit array of shape ``arr.shape + (m,)``."""
        a = np.asarray(arr, dtype=np.int64)
        return (a[..., None] // self._pw) % self.p

    def undigits(self, digs) -> np.ndarray:
        return (np.asarray(digs, dtype=np.int64) % self.p) @ self._pw

    def _dmul(self, da: np.ndarray, db: np.ndarray) -> np.ndarray:
        outer = (da[:, :, None] * db[:, None, :]).reshape(da.shape[0], -1)
        return outer @ self._conv % self.p

    def _slow_mul(self, a: int, b: int) -> int:
        da = np.array([_digits_of(a, self.p, self.m)], dtype=np.int64)
        db = np.array([_digits_of(b, self.p, self.m)], dtype=np.int64)
        return int(self._dmul(da, db)[0] @ self._pw)

    def _slow_pow(self, a: int, e: int) -> int:
        result, base = 1, a
        while e:
            if e & 1:
                result = self._slow_mul(result, base)
            base = self._slow_mul(base, base)
            e >>= 1
        return result

    def _frob_matrix(self, e: int) -> np.ndarray:
        e %= self.m
        mat = self._frob_cache.get(e)
        if mat is None:
            rows = np.zeros((self.m, self.m), dtype=np.int64)
            for j in range(self.m):
                rows[j] = self.to_coeffs(self._slow_pow(self.p ** j, self.p ** e))
            mat = rows
            self._frob_cache[e] = mat
        return mat

    # -- scalar arithmetic ---------------------------------------------------

    @property
    def minus_one(self) -> int:
        return self.p - 1

    def elem(self, k: int) -> int:
        """Power g^k of the fixed primitive root."""
        if self.tables:
            return self._exp_l[k % self.order]
        return self._slow_pow(self.primitive_root, k % self.order)

    def log_of(self, a: int) -> int:
        if a == 0:
            raise FieldError("logarithm of zero")
        if self.tables:
            return self._log_l[a]
        raise FieldError("discrete logarithms need table mode")

    def add(self, a: int, b: int) -> int:
        if a == 0:
            return b
        if b == 0:
            return a
        if self.tables:
            la, lb = self._log_l[a], self._log_l[b]
            z = self._zech_l[(lb - la) % self.order]
            return 0 if z < 0 else self._exp_l[la + z]
        p = self.p
        out, w = 0, 1
        while a or b:
            a, da = divmod(a, p)
            b, db = divmod(b, p)
            out += ((da + db) % p) * w
            w *= p
        return out

    def neg(self, a: int) -> int:
        if a == 0:
            return 0
        if self.tables:
            return self._exp_l[self._log_l[a] + (self.order // 2 if self.p != 2 else 0)]
        return self.from_coeffs([-d for d in self.to_coeffs(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.tables:
            return self._exp_l[self._log_l[a] + self._log_l[b]]
        return self._slow_mul(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        if self.tables:
            return self._exp_l[(-self._log_l[a]) % self.order]
        return self._slow_pow(a, self.order - 1)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("negative power of zero")
            return 1 if e == 0 else 0
        if self.tables:
            return self._exp_l[(self._log_l[a] * e) % self.order]
        if e < 0:
            a, e = self.inv(a), -e
        return self._slow_pow(a, e % self.order)

    def frobenius(self, a: int, e: int) -> int:
        """a^(p^e), with e read modulo rn."""
        e %= self.m
        if e == 0 or a == 0:
            return a
        if self.tables:
            return self._exp_l[(self._log_l[a] * pow(self.p, e, self.order)) % self.order]
        return int(np.array(self.to_coeffs(a)) @ self._frob_matrix(e) % self.p @ self._pw)

    def sigma(self, a: int, s: int) -> int:
        """a^(q^s): the F_q-automorphism with exponent s."""
        return self.frobenius(a, self.r * s)

    def rel_norm(self, a: int, sub: str = "q") -> int:
        """N_{q^n/q}(a) for ``sub='q'`` and N_{q^n/q^t}(a) = a^(q^t+1) for ``sub='q^t'``."""
        if sub == "q":
            return self.pow(a, self.order // (self.q - 1))
        if sub in ("q^t", "qt"):
            return self.pow(a, self.q ** self.t + 1)
        raise FieldError(f"unknown subfield {sub!r}")

    def rel_trace(self, a: int, sub: str = "q") -> int:
        """Tr_{q^n/q}(a) = sum of a^(q^i) for i < n."""
        if sub != "q":
            raise FieldError(f"unknown subfield {sub!r}")
        acc = 0
        for i in range(self.n):
            acc = self.add(acc, self.sigma(a, i))
        return acc

    def in_subfield(self, a: int, mdeg: int) -> bool:
        """Membership in F_{p^mdeg} (which needs mdeg | rn)."""
        if self.m % mdeg:
            raise FieldError(f"F_{{p^{mdeg}}} is not a subfield")
        return self.frobenius(a, mdeg) == a

    def subfield_elements(self, mdeg: int) -> list[int]:
        """Elements of F_{p^mdeg}, zero first then in log order of a subfield generator."""
        if self.m % mdeg:
            raise FieldError(f"F_{{p^{mdeg}}} is not a subfield")
        sub_order = self.p ** mdeg - 1
        gen = self.pow(self.primitive_root, self.order // sub_order)
        out = [0]
        cur = 1
        for _ in range(sub_order):
            out.append(cur)
            cur = self.mul(cur, gen)
        return out

    # -- vector arithmetic (numpy int64 arrays of elements) -------------------

    def vadd(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if not self.tables:
            da, db = self.digits(a), self.digits(b)
            return self.undigits(da + db)
        a, b = np.broadcast_arrays(a, b)
        out = np.where(a == 0, b, a).astype(np.int64)
        both = (a != 0) & (b != 0)
        if both.any():
            la = self.log[a[both]]
            lb = self.log[b[both]]
            z = self.zech[(lb - la) % self.order]
            out[both] = np.where(z < 0, 0, self.exp2[la + np.maximum(z, 0)])
        return out

    def vneg(self, a) -> np.ndarray:
        return self.undigits(-self.digits(a))

    def vsub(self, a, b) -> np.ndarray:
        return self.vadd(a, self.vneg(b))

    def vmul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        a, b = np.broadcast_arrays(a, b)
        if not self.tables:
            shape = a.shape
            da = self.digits(a.reshape(-1))
            db = self.digits(b.reshape(-1))
            return self.undigits(self._dmul(da, db)).reshape(shape)
        nz = (a != 0) & (b != 0)
        out = np.zeros(a.shape, dtype=np.int64)
        out[nz] = self.exp2[self.log[a[nz]] + self.log[b[nz]]]
        return out

    def vscale_linear(self, a, c: int) -> np.ndarray:
        """c * a for a fixed scalar c, by one F_p matrix product (any backend)."""
        a = np.asarray(a, dtype=np.int64)
        return self.undigits(self.digits(a) @ self._mul_matrix(c) % self.p)

    def vinv(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero in a finite field")
        if self.tables:
            return self.exp2[(-self.log[a]) % self.order]
        flat = [self.inv(int(x)) for x in a.reshape(-1)]
        return np.array(flat, dtype=np.int64).reshape(a.shape)

    def vfrob(self, a, e: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        e %= self.m
        if e == 0:
            return a.copy()
        if self.tables:
            out = np.zeros(a.shape, dtype=np.int64)
            nz = a != 0
            out[nz] = self.exp2[(self.log[a[nz]] * pow(self.p, e, self.order)) % self.order]
            return out
        return self.undigits(self.digits(a) @ self._frob_matrix(e) % self.p)

    def vsigma(self, a, s: int) -> np.ndarray:
        return self.vfrob(a, self.r * s)

    def vpow(self, a, e: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.tables:
            out = np.zeros(a.shape, dtype=np.int64)
            nz = a != 0
            out[nz] = self.exp2[(self.log[a[nz]] * e) % self.order]
            if e == 0:
                out[:] = 1
            return out
        flat = [self.pow(int(x), e) for x in a.reshape(-1)]
        return np.array(flat, dtype=np.int64).reshape(a.shape)

    def all_elements(self) -> np.ndarray:
        if self.size > 2 ** 26:
            raise FieldError("field too large to list")
        return np.arange(self.size, dtype=np.int64)

    def norm_fiber(self, value: int = -1) -> list[int]:
        """All h with h^(q^t+1) equal to ``value`` (default minus one).

        The exponent e of h = g^e must satisfy e*(q^t+1) = log(value) mod (q^n-1),
        so the fiber is a coset of the (q^t+1)-torsion and is generated directly.
        """
        target = self.minus_one if value == -1 else value
        qt = self.q ** self.t
        k = qt + 1
        if target == 1:
            base_exp = 0
        elif target == self.minus_one:
            base_exp = self.order // 2
        else:
            base_exp = self.log_of(target)
        if base_exp % k:
            return []
        step = self.order // k  # = q^t - 1
        e0 = base_exp // k
        start = self.elem(e0)
        w = self.elem(step)
        out, cur = [], start
        for _ in range(k):
            out.append(cur)
            cur = self.mul(cur, w)
        return sorted(out)

    # -- identity & serialization -------------------------------------------

    def _key(self):
        return (self.p, self.r, self.t, self.modulus)

    def __eq__(self, other):
        return isinstance(other, FieldCtx) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __reduce__(self):
        return (get_field, (self.p, self.r, self.t, self.modulus))

    def __repr__(self):
        return f"FieldCtx(p={self.p}, r={self.r}, t={self.t}, modulus={list(self.modulus)})"

    def to_json(self) -> dict:
        return {"p": self.p, "r": self.r, "t": self.t, "modulus": list(self.modulus)}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def from_json(cls, data) -> "FieldCtx":
        if isinstance(data, str):
            data = json.loads(data)
        return get_field(int(data["p"]), int(data["r"]), int(data["t"]),
                         tuple(data["modulus"]) if data.get("modulus") is not None else None)


@lru_cache(maxsize=32)
def get_field(p: int, r: int, t: int, modulus: tuple | None = None) -> FieldCtx:
    """Cached constructor; fields are immutable so sharing is safe."""
    return FieldCtx(p, r, t, modulus)


def field_ctx_new(p: int, r: int, t: int, modulus: Sequence[int] | None = None) -> FieldCtx:
    return get_field(p, r, t, tuple(modulus) if modulus is not None else None)


def fe_arith(ctx: FieldCtx, a: int, b: int | None, op: str) -> int:
    """Dispatch one of add, sub, mul, inv, pow (``b`` is the exponent for pow)."""
    if op == "add":
        return ctx.add(a, b)
    if op == "sub":
        return ctx.sub(a, b)
    if op == "mul":
        return ctx.mul(a, b)
    if op == "inv":
        return ctx.inv(a)
    if op == "pow":
        return ctx.pow(a, b)
    if op == "div":
        return ctx.div(a, b)
    raise FieldError(f"unknown operation {op!r}")
