import itertools
import json
import pickle

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from skewmrd import FieldError, field_ctx_new, get_field
from skewmrd.gf import fe_arith
from skewmrd.skew import generator_exponents


def _poly_mulmod(a, b, f, p):
    """Schoolbook product mod a monic f; independent of the library."""
    m = len(f) - 1
    out = [0] * (2 * m)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    for d in range(len(out) - 1, m - 1, -1):
        c = out[d]
        if c:
            for k in range(m + 1):
                out[d - m + k] = (out[d - m + k] - c * f[k]) % p
    return out[:m]


def _order_of_x(f, p):
    m = len(f) - 1
    one = [1] + [0] * (m - 1)
    x = [0, 1] + [0] * (m - 2)
    cur, k = x, 1
    while cur != one:
        cur = _poly_mulmod(cur, x, f, p)
        k += 1
        if k > p ** m:
            return 0
    return k


# -- construction --------------------------------------------------------------------


def test_f9_with_x2_plus_1(f9):
    assert f9.size == 9 and f9.modulus == (1, 0, 1)
    alpha = 3  # class of x
    assert f9.mul(alpha, alpha) == 2
    assert f9.pow(alpha, 8) == 1
    assert f9.frobenius(alpha, 1) == 2 * 3  # 2*alpha
    assert f9.rel_norm(alpha, "q") == 1
    assert f9.rel_trace(alpha) == 0


def test_default_modulus_is_smallest_primitive():
    # brute force over monic polynomials in increasing integer encoding of the low digits
    for p, r, t in [(3, 1, 1), (3, 1, 2), (5, 1, 1), (2, 1, 2), (3, 1, 3), (7, 1, 1)]:
        m = r * 2 * t
        best = None
        for code in range(p ** m):
            low = [(code // p ** i) % p for i in range(m)]
            if _order_of_x(low + [1], p) == p ** m - 1:
                best = tuple(low + [1])
                break
        assert get_field(p, r, t).modulus == best
    assert get_field(3, 1, 1).modulus == (2, 1, 1)


def test_f36_default():
    ctx = get_field(3, 1, 3)
    assert len(ctx.modulus) == 7 and ctx.modulus[-1] == 1
    assert _order_of_x(list(ctx.modulus), 3) == 3 ** 6 - 1
    assert ctx.primitive_root == 3
    assert get_field(3, 1, 3) is ctx


def test_constructor_errors():
    with pytest.raises(FieldError):
        field_ctx_new(4, 1, 3)
    with pytest.raises(FieldError):
        field_ctx_new(3, 1, 1, (2, 0, 1))  # x^2 - 1 is reducible
    with pytest.raises(FieldError):
        field_ctx_new(3, 1, 1, (1, 0, 0, 1))  # wrong degree
    with pytest.raises(FieldError):
        field_ctx_new(3, 0, 3)


def test_nonprimitive_modulus_gets_a_generator(f9):
    g = f9.primitive_root
    assert len({f9.pow(g, k) for k in range(8)}) == 8


def test_inverse_of_zero(f36):
    with pytest.raises(ZeroDivisionError):
        f36.inv(0)


def test_fe_arith_dispatch(f9):
    assert fe_arith(f9, 3, 3, "mul") == 2
    assert fe_arith(f9, 3, 5, "add") == f9.add(3, 5)
    assert fe_arith(f9, 3, 5, "sub") == f9.sub(3, 5)
    assert fe_arith(f9, 3, None, "inv") == f9.inv(3)
    assert fe_arith(f9, 3, 8, "pow") == 1


def test_norm_fiber_size(f36):
    hs = [h for h in range(1, f36.size) if f36.pow(h, 28) == f36.minus_one]
    assert len(hs) == 28
    assert sorted(f36.norm_fiber(-1)) == hs


def test_trace_of_one(f36):
    assert f36.rel_trace(1) == f36.n % f36.p
    assert f36.rel_trace(0) == 0
    assert f36.rel_norm(1, "q") == 1


def test_arith_against_polynomials(f36):
    rng = np.random.default_rng(7)
    mod = list(f36.modulus)
    for _ in range(300):
        a, b = (int(x) for x in rng.integers(0, f36.size, 2))
        prod = _poly_mulmod(f36.to_coeffs(a), f36.to_coeffs(b), mod, 3)
        assert f36.mul(a, b) == f36.from_coeffs(prod)
        s = [(x + y) % 3 for x, y in zip(f36.to_coeffs(a), f36.to_coeffs(b))]
        assert f36.add(a, b) == f36.from_coeffs(s)


def test_table_free_matches_tables():
    big = get_field(3, 1, 3)
    free = type(big)(3, 1, 3, table_cap=1)
    assert not free.tables and big.tables
    rng = np.random.default_rng(2)
    a = rng.integers(0, big.size, 500)
    b = rng.integers(0, big.size, 500)
    assert np.array_equal(big.vmul(a, b), free.vmul(a, b))
    assert np.array_equal(big.vadd(a, b), free.vadd(a, b))
    assert np.array_equal(big.vfrob(a, 2), free.vfrob(a, 2))
    nz = a[a != 0]
    assert np.array_equal(big.vinv(nz), free.vinv(nz))
    assert sorted(big.norm_fiber(-1)) == sorted(free.norm_fiber(-1))


def test_vector_ops_match_scalar(f36):
    rng = np.random.default_rng(3)
    a = rng.integers(0, f36.size, 200)
    b = rng.integers(0, f36.size, 200)
    assert list(f36.vmul(a, b)) == [f36.mul(int(x), int(y)) for x, y in zip(a, b)]
    assert list(f36.vsub(a, b)) == [f36.sub(int(x), int(y)) for x, y in zip(a, b)]
    assert list(f36.vneg(a)) == [f36.neg(int(x)) for x in a]
    assert list(f36.vpow(a, 5)) == [f36.pow(int(x), 5) for x in a]
    assert list(f36.vsigma(a, 2)) == [f36.sigma(int(x), 2) for x in a]


def test_subfields(f36):
    f3 = f36.subfield_elements(1)
    assert sorted(f3) == [0, 1, 2]
    f9 = f36.subfield_elements(2)
    assert len(f9) == 9 and f9[0] == 0
    assert all(f36.in_subfield(x, 2) for x in f9)
    assert sum(f36.in_subfield(x, 3) for x in range(f36.size)) == 27
    with pytest.raises(FieldError):
        f36.subfield_elements(4)


def test_serialization(f36):
    data = f36.to_json()
    assert data == {"p": 3, "r": 1, "t": 3, "modulus": list(f36.modulus)}
    assert type(f36).from_json(f36.dumps()) == f36
    assert pickle.loads(pickle.dumps(f36)) == f36
    assert json.loads(f36.dumps())["modulus"][-1] == 1


def test_field_identity_includes_modulus():
    a = get_field(3, 1, 1)
    b = get_field(3, 1, 1, (1, 0, 1))
    assert a != b
    assert get_field(3, 1, 1, (1, 0, 1)) == b


def test_norm_identity_for_every_generator():
    """N_{q^n/q^t}(h) = sigma^t(h) h for every generator sigma (exhaustive)."""
    for p, r, t in [(3, 1, 3), (5, 1, 2), (3, 2, 2), (3, 1, 5)]:
        ctx = get_field(p, r, t)
        a = ctx.all_elements()
        norms = ctx.vpow(a, ctx.q ** t + 1)
        for s in generator_exponents(ctx.n):
            assert np.array_equal(norms, ctx.vmul(ctx.vsigma(a, s * t), a)), (p, r, t, s)


def test_trace_form_nondegenerate(f36):
    basis = [3 ** i for i in range(f36.m)]
    for bi in basis:
        assert any(f36.rel_trace(f36.mul(bi, bj)) != 0 for bj in basis)


def test_frobenius_is_automorphism_exhaustive(f9):
    for a, b in itertools.product(range(9), repeat=2):
        for e in range(3):
            fa, fb = f9.frobenius(a, e), f9.frobenius(b, e)
            assert f9.frobenius(f9.add(a, b), e) == f9.add(fa, fb)
            assert f9.frobenius(f9.mul(a, b), e) == f9.mul(fa, fb)


# -- properties ----------------------------------------------------------------------

FIELDS = [(3, 1, 3), (5, 1, 3), (3, 2, 2), (2, 1, 3), (3, 1, 5)]
field_st = st.sampled_from(FIELDS).map(lambda prt: get_field(*prt))


@settings(max_examples=200, deadline=None)
@given(field_st, st.data())
def test_frobenius_composes(ctx, data):
    a = data.draw(st.integers(0, ctx.size - 1))
    i = data.draw(st.integers(-20, 20))
    j = data.draw(st.integers(-20, 20))
    assert ctx.frobenius(ctx.frobenius(a, i), j) == ctx.frobenius(a, i + j)
    assert ctx.frobenius(a, ctx.m) == a and ctx.frobenius(a, 0) == a


@settings(max_examples=200, deadline=None)
@given(field_st, st.data())
def test_field_axioms(ctx, data):
    a, b, c = (data.draw(st.integers(0, ctx.size - 1)) for _ in range(3))
    assert ctx.mul(a, ctx.add(b, c)) == ctx.add(ctx.mul(a, b), ctx.mul(a, c))
    assert ctx.add(a, ctx.neg(a)) == 0
    assert ctx.sub(ctx.add(a, b), b) == a
    if a:
        assert ctx.mul(a, ctx.inv(a)) == 1
        assert ctx.pow(a, ctx.order) == 1
        assert ctx.div(ctx.mul(a, b), a) == b


@settings(max_examples=200, deadline=None)
@given(field_st, st.data())
def test_norm_and_trace(ctx, data):
    a = data.draw(st.integers(0, ctx.size - 1))
    b = data.draw(st.integers(0, ctx.size - 1))
    r = ctx.r
    assert ctx.rel_norm(ctx.mul(a, b), "q") == ctx.mul(ctx.rel_norm(a, "q"), ctx.rel_norm(b, "q"))
    assert ctx.in_subfield(ctx.rel_norm(a, "q"), r)
    assert ctx.in_subfield(ctx.rel_norm(a, "q^t"), r * ctx.t)
    assert ctx.in_subfield(ctx.rel_trace(a), r)
    assert ctx.rel_trace(ctx.add(a, b)) == ctx.add(ctx.rel_trace(a), ctx.rel_trace(b))
