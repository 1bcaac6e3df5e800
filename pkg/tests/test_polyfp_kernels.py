import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from skewmrd import kernels, polyfp
from skewmrd.linalg import nullspace_mod_p, rank_ext, rref_mod_p, solve_mod_p
from skewmrd import get_field


def test_primes_and_factors():
    assert [m for m in range(20) if polyfp.is_prime(m)] == [2, 3, 5, 7, 11, 13, 17, 19]
    assert polyfp.prime_factors(360) == (2, 3, 5)
    assert polyfp.prime_factors(3 ** 10 - 1) == (2, 11, 61)


def test_irreducibility():
    assert polyfp.is_irreducible([1, 0, 1], 3)
    assert not polyfp.is_irreducible([2, 0, 1], 3)
    assert polyfp.is_primitive([2, 1, 1], 3)
    assert not polyfp.is_primitive([1, 0, 1], 3)  # x has order 4
    assert polyfp.smallest_primitive(3, 2) == [2, 1, 1]


def test_poly_gcd():
    a = polyfp.mul([1, 1], [2, 0, 1], 3)
    b = polyfp.mul([1, 1], [1, 0, 1], 3)
    assert polyfp.gcd(a, b, 3) == [1, 1]


def test_dense_gcd_degree_examples():
    x2p1 = polyfp.dense_binomial(2, 1, 3)
    x2m1 = polyfp.dense_binomial(2, -1, 3)
    assert polyfp.dense_gcd_degree(x2p1, x2m1, 3) == 0
    m = 7
    assert polyfp.dense_gcd_degree(polyfp.dense_binomial(m, 1, 3),
                                   polyfp.dense_binomial(2 * m, -1, 3), 3) == m


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3, 5, 7]), st.integers(1, 40), st.integers(1, 40))
def test_dense_gcd_matches_list_gcd(p, m, n):
    a = [1] + [0] * (m - 1) + [1]
    b = [p - 1] + [0] * (n - 1) + [1]
    g = polyfp.gcd(a, b, p)
    assert polyfp.dense_gcd_degree(np.array(a), np.array(b), p) == len(g) - 1


# -- linear algebra -------------------------------------------------------------------


def test_rref_nullspace_solve():
    rng = np.random.default_rng(0)
    for _ in range(50):
        a = rng.integers(0, 5, size=(4, 6))
        red, piv = rref_mod_p(a, 5)
        assert len(piv) == kernels.rank_mod_p(a, 5)
        ns = nullspace_mod_p(a, 5)
        assert ns.shape[0] == 6 - len(piv)
        assert not (a @ ns.T % 5).any()
        x = rng.integers(0, 5, size=6)
        sol = solve_mod_p(a, a @ x % 5, 5)
        assert sol is not None and np.array_equal(a @ sol % 5, a @ x % 5)


def test_rank_ext_agrees_with_kernel(f36):
    rng = np.random.default_rng(5)
    mats = rng.integers(0, f36.size, size=(200, 3, 5))
    mats[::7, 2] = mats[::7, 0]
    shift = f36.order // 2
    fast = kernels.batch_rank_ext(mats, f36.exp2, f36.log, f36.zech, f36.order, shift)
    assert list(fast) == [rank_ext(f36, m.tolist()) for m in mats]


# -- backend agreement ----------------------------------------------------------------


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")
    assert "python" in kernels.backends()


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_backends_agree_mod_p(p):
    mods = kernels.backends()
    rng = np.random.default_rng(p)
    mats = rng.integers(0, p, size=(500, 7, 9))
    mats[::5, 3] = (mats[::5, 1] * 2 + mats[::5, 2]) % p
    mats[:3] = 0
    outs = [m.batch_rank_mod_p(mats, p) for m in mods.values()]
    for o in outs[1:]:
        assert np.array_equal(outs[0], o)
    assert all(m.rank_mod_p(mats[4], p) == outs[0][4] for m in mods.values())


@pytest.mark.parametrize("prt", [(3, 1, 3), (2, 1, 3), (5, 1, 2)])
def test_backends_agree_ext(prt):
    ctx = get_field(*prt)
    mods = kernels.backends()
    rng = np.random.default_rng(11)
    mats = rng.integers(0, ctx.size, size=(300, 4, 6))
    mats[::3, 2] = ctx.vmul(mats[::3, 0], 7 % ctx.size)
    shift = ctx.order // 2 if ctx.p != 2 else 0
    outs = [m.batch_rank_ext(mats, ctx.exp2, ctx.log, ctx.zech, ctx.order, shift)
            for m in mods.values()]
    for o in outs[1:]:
        assert np.array_equal(outs[0], o)


def test_pure_python_fallback_env():
    env = dict(os.environ, SKEWMRD_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import skewmrd; print(skewmrd.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_benchmark_runs():
    sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "benchmarks"))
    try:
        import bench_kernels
    finally:
        sys.path.pop(0)
    rows = bench_kernels.run(batch=50, repeat=1)
    assert rows and all(r["agree"] for r in rows)
