import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from skewmrd import get_field
from skewmrd.rankcodes import (
    CapExceededError, FpSpanCode, NewFamilyParams, NormConditionError, RankCode, code_span,
    code_sum, codeword_ranks_enumerate, codeword_ranks_fiber, gabidulin, is_mrd, is_scattered,
    linear_set_size, min_distance, min_distance_report, new_family, psi_poly, special_case,
    twisted_gabidulin, valid_h,
)
from skewmrd.invariants import code_shift
from skewmrd.skew import (SigmaAut, SkewError, identity, monomial, random_poly, sp_phi_map,
                          sp_rank_eval, sp_scale, trace_poly)


@pytest.fixture(scope="module")
def ctx():
    return get_field(3, 1, 3)


@pytest.fixture(scope="module")
def sig(ctx):
    return SigmaAut(ctx, 1)


def _valid_eta(ctx, k, rng):
    target = 1 if (ctx.n * k) % 2 == 0 else ctx.minus_one
    while True:
        eta = int(rng.integers(1, ctx.size))
        if ctx.rel_norm(eta, "q") != target:
            return eta


def test_span_examples(ctx, sig):
    assert code_span([identity(sig), monomial(sig, 0, 2)]).dim == 1
    assert code_span([identity(sig), monomial(sig, 1)]).dim == 2
    h = valid_h(ctx)[0]
    psi = psi_poly(NewFamilyParams(h, 3, sig))
    # D^(t) = <x, x^(s^t), psi, s^t(psi)>
    shifted = code_shift(code_span([psi]), 3).basis[0]
    d = code_span([identity(sig), monomial(sig, 3), psi, shifted])
    assert d.dim == 4
    assert code_span([], sigma=sig).dim == 0
    with pytest.raises(SkewError):
        code_span([])


def test_span_is_echelon_and_membership(ctx, sig):
    rng = np.random.default_rng(0)
    polys = [random_poly(sig, rng) for _ in range(3)]
    code = code_span(polys)
    assert code.dim == 3
    assert all(code.contains(f) for f in polys)
    assert not code.contains(monomial(sig, 0)) or code.dim == ctx.n
    assert code.same_space(code_span(list(reversed(polys))))
    piv = code.pivots
    assert piv == sorted(piv) and len(set(piv)) == 3


def test_gabidulin_examples(ctx, sig):
    g1 = gabidulin(1, sig)
    assert g1.dim == 1 and min_distance(g1) == ctx.n
    g2 = gabidulin(2, sig)
    assert min_distance(g2) == 5 and is_mrd(g2)
    gn = gabidulin(ctx.n, sig)
    assert gn.contains(trace_poly(sig))
    small = SigmaAut(get_field(3, 1, 1), 1)
    full = gabidulin(2, small)
    assert min_distance(full) == 1 and is_mrd(full)
    with pytest.raises(ValueError):
        gabidulin(0, sig)
    with pytest.raises(ValueError):
        gabidulin(ctx.n + 1, sig)


def test_twisted_examples(ctx):
    rng = np.random.default_rng(1)
    for s in (1, 5):
        sig = SigmaAut(ctx, s)
        assert twisted_gabidulin(2, sig, 0).same_space(gabidulin(2, sig))
        for _ in range(3):
            eta = _valid_eta(ctx, 2, rng)
            code = twisted_gabidulin(2, sig, eta)
            assert isinstance(code, RankCode) and min_distance(code) == 5
    sig = SigmaAut(ctx, 1)
    bad = next(e for e in range(1, ctx.size) if ctx.rel_norm(e, "q") == 1)  # (-1)^(6*2) = 1
    with pytest.raises(NormConditionError):
        twisted_gabidulin(2, sig, bad)


def test_twisted_h_nonzero_is_fq_linear(ctx, sig):
    eta = _valid_eta(ctx, 2, np.random.default_rng(2))
    code = twisted_gabidulin(2, sig, eta, h=1)
    assert isinstance(code, FpSpanCode)
    assert code.fp_dim == 2 * ctx.m
    with pytest.raises(ValueError):
        twisted_gabidulin(2, sig, eta, h=ctx.n)


def test_fp_span_of_linear_code(ctx, sig):
    g = gabidulin(2, sig)
    fp = FpSpanCode.from_code(g)
    assert fp.fp_dim == g.dim * ctx.m
    assert code_span(fp.basis_polys()).same_space(g)


def test_psi_support_and_coefficients(ctx):
    for s in (1, 5):
        sig = SigmaAut(ctx, s)
        for h in valid_h(ctx):
            psi = psi_poly(NewFamilyParams(h, 3, sig))
            assert psi.support() == {1, 2, 4, 5}
            assert psi.coeffs[4] == ctx.mul(h, sig.apply(h, 1))
            assert psi.coeffs[5] == ctx.mul(h, sig.apply(ctx.inv(h), -1))
    big = get_field(3, 1, 5)
    h = valid_h(big)[0]
    assert psi_poly(NewFamilyParams(h, 5, SigmaAut(big, 3))).support() == {1, 4, 6, 9}


def test_psi_for_h_in_fq():
    """q = 1 mod 4 and h^2 = -1 in F_q gives coefficients (1, 1, -1, 1)."""
    ctx = get_field(5, 1, 3)
    hs = [h for h in range(1, 5) if (h * h) % 5 == 4]
    assert hs == [2, 3]
    for h in hs:
        assert h in valid_h(ctx) and special_case(ctx, h) == "h in F_q"
        psi = psi_poly(NewFamilyParams(h, 3, SigmaAut(ctx, 1)))
        assert [psi.coeffs[i] for i in (1, 2, 4, 5)] == [1, 1, ctx.minus_one, 1]
    # no such h when q = 3 mod 4
    f36 = get_field(3, 1, 3)
    assert all(special_case(f36, h) != "h in F_q" for h in valid_h(f36))


def test_new_family_params_errors(ctx, sig):
    with pytest.raises(NormConditionError):
        NewFamilyParams(1, 3, sig)
    with pytest.raises(NormConditionError):
        NewFamilyParams(0, 3, sig)
    with pytest.raises(ValueError):
        NewFamilyParams(valid_h(ctx)[0], 4, sig)
    two = get_field(2, 1, 3)
    with pytest.raises(NormConditionError):
        NewFamilyParams(1, 3, SigmaAut(two, 1))
    small = get_field(3, 1, 2)
    with pytest.raises(ValueError):
        NewFamilyParams(valid_h(small)[0], 2, SigmaAut(small, 1))


def test_valid_h_count(ctx):
    assert len(valid_h(ctx)) == ctx.q ** ctx.t + 1


def test_new_family_mrd_small(ctx):
    for s in (1, 5):
        sig = SigmaAut(ctx, s)
        for h in valid_h(ctx):
            code = new_family(NewFamilyParams(h, 3, sig))
            assert code.dim == 2 and code.label["family"] == "new"
            assert min_distance(code) == 5
    f56 = get_field(5, 1, 3)
    h = valid_h(f56)[3]
    assert is_mrd(new_family(NewFamilyParams(h, 3, SigmaAut(f56, 5))))


def test_min_distance_examples(ctx, sig):
    assert min_distance(code_span([identity(sig)])) == ctx.n
    assert min_distance(code_span([trace_poly(sig)])) == 1
    assert not is_mrd(code_span([identity(sig), trace_poly(sig)]))
    rep = min_distance_report(code_span([identity(sig), trace_poly(sig)]))
    assert rep["min_distance"] == 1 and not rep["mrd"]
    # the witness coordinates reproduce a codeword of that rank
    code = code_span([identity(sig), trace_poly(sig)])
    coords = [ctx.from_coeffs(c) for c in rep["witness"]]
    assert sp_rank_eval(code.codeword(coords)) == 1
    with pytest.raises(ValueError):
        min_distance(code_span([], sigma=sig))


def test_fiber_matches_enumeration(ctx):
    rng = np.random.default_rng(3)
    for s in (1, 5):
        sig = SigmaAut(ctx, s)
        for _ in range(4):
            code = code_span([random_poly(sig, rng), random_poly(sig, rng)])
            if code.dim != 2:
                continue
            fib = codeword_ranks_fiber(code)
            enum = codeword_ranks_enumerate(code)
            assert np.array_equal(fib, enum)


def test_three_dim_enumeration(ctx, sig):
    code = gabidulin(3, sig)
    ranks = codeword_ranks_enumerate(code)
    assert len(ranks) == (ctx.size ** 3 - 1) // (ctx.size - 1)
    assert ranks.min() == ctx.n - 2


def test_cap(ctx, sig, monkeypatch):
    code = gabidulin(3, sig)
    with pytest.raises(CapExceededError):
        codeword_ranks_enumerate(code, cap=1000)
    monkeypatch.setenv("SKEWMRD_CAP", "10")
    with pytest.raises(CapExceededError):
        min_distance(code)
    with pytest.raises(ValueError):
        codeword_ranks_fiber(code)


def test_linear_set_examples(ctx, sig):
    assert linear_set_size(identity(sig)) == 1
    h = valid_h(ctx)[0]
    psi = psi_poly(NewFamilyParams(h, 3, sig))
    assert linear_set_size(psi) == 364 and is_scattered(psi)
    assert not is_scattered(trace_poly(sig))


def test_scattered_iff_mrd_random(ctx):
    rng = np.random.default_rng(4)
    for _ in range(20):
        sig = SigmaAut(ctx, (1, 5)[int(rng.integers(2))])
        f = random_poly(sig, rng)
        code = code_span([identity(sig), f])
        if code.dim != 2:
            continue
        assert is_scattered(f) == is_mrd(code)


def test_phi_preserves_distance(ctx, sig):
    g2 = gabidulin(2, sig)
    img = code_span([sp_phi_map(b, 5) for b in g2.basis])
    assert img.same_space(gabidulin(2, SigmaAut(ctx, 5)))
    assert min_distance(img) == min_distance(g2)


def test_code_sum_across_generators(ctx):
    a = gabidulin(1, SigmaAut(ctx, 1))
    b = code_span([monomial(SigmaAut(ctx, 5), 1)])
    total = code_sum([a, b])
    assert total.dim == 2 and total.sigma.s == 1
    assert total.contains(monomial(SigmaAut(ctx, 1), 5))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([1, 5]))
def test_distance_invariant_under_scaling(seed, s):
    ctx = get_field(3, 1, 3)
    sig = SigmaAut(ctx, s)
    rng = np.random.default_rng(seed)
    f, g = random_poly(sig, rng), random_poly(sig, rng)
    code = code_span([f, g])
    if code.dim != 2:
        return
    c = int(rng.integers(1, ctx.size))
    scaled = code_span([sp_scale(f, c), g])
    d = min_distance(code)
    assert d == min_distance(scaled)
    assert d <= ctx.n - 1
