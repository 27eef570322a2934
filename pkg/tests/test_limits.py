import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gmdtrend.errors import DegenerateDataError, InputError
from gmdtrend.limits import (
    PSI_SQ_UNIT,
    folded_conditional_mean,
    normal_cdf,
    normal_quantile,
    pair_centring_term,
    psi_hat_sq,
    psi_sq_constant,
)

# 2-D quadrature of 4 f_2 over (Z, Z'), inner expectation integrated numerically
# (scipy.integrate.quad, absolute integrand, no folded-normal closed form).
QUAD_PSI_11 = 0.6510063177670187
QUAD_PSI_12 = 2.303950228933035
# E|1 - Z'| by quadrature
QUAD_FOLDED_111 = 1.1666309411753666


def bisect_quantile(p, lo=-40.0, hi=40.0):
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if normal_cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestNormal:
    def test_cdf_values(self):
        assert normal_cdf(0.0) == 0.5
        assert normal_cdf(1.0) == pytest.approx(0.841345, abs=1e-6)
        assert normal_cdf(-1.0) == pytest.approx(1 - normal_cdf(1.0), abs=1e-15)

    @pytest.mark.parametrize("x", np.linspace(-8, 8, 81))
    def test_cdf_against_mpmath(self, x):
        with mpmath.workdps(40):
            exact = float(mpmath.ncdf(mpmath.mpf(float(x))))
        assert normal_cdf(float(x)) == pytest.approx(exact, rel=1e-12, abs=1e-16)

    def test_cdf_monotone(self):
        xs = np.linspace(-10, 10, 2001)
        vals = [normal_cdf(float(x)) for x in xs]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_quantile_values(self):
        assert normal_quantile(0.5) == pytest.approx(0.0, abs=1e-15)
        assert normal_quantile(0.95) == pytest.approx(1.644854, abs=1e-6)
        assert normal_quantile(0.975) == pytest.approx(1.959964, abs=1e-6)

    @pytest.mark.parametrize("p", [1e-12, 1e-6, 0.01, 0.02425, 0.3, 0.95, 0.975, 0.999, 1 - 1e-9])
    def test_quantile_against_bisection(self, p):
        q = normal_quantile(p)
        assert q == pytest.approx(bisect_quantile(p), abs=1e-8)
        assert abs(normal_cdf(q) - p) <= 1e-8

    @given(st.floats(-6, 6))
    def test_round_trip(self, x):
        assert normal_quantile(normal_cdf(x)) == pytest.approx(x, abs=1e-8)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
    def test_quantile_rejects(self, p):
        with pytest.raises(InputError):
            normal_quantile(p)


class TestFoldedMean:
    def test_values(self):
        assert folded_conditional_mean(1, 1, 0) == pytest.approx(math.sqrt(2 / math.pi), rel=1e-12)
        assert folded_conditional_mean(1, 0, -2) == 2.0
        assert folded_conditional_mean(1, 1, 1) == pytest.approx(QUAD_FOLDED_111, rel=1e-9)

    @given(st.floats(0, 5), st.floats(0, 5), st.floats(-6, 6))
    def test_bounds(self, a, b, z):
        v = folded_conditional_mean(a, b, z)
        assert v >= max(0.0, a * abs(z) - b * math.sqrt(2 / math.pi)) - 1e-12
        assert abs(v - a * abs(z)) <= b * math.sqrt(2 / math.pi) + b + 1e-12

    @pytest.mark.parametrize("a,b", [(1.0, 1.0), (0.5, 2.0), (3.0, 0.2)])
    def test_averages_to_unconditional(self, a, b):
        z = np.random.default_rng(5).standard_normal(200_000)
        vals = folded_conditional_mean(a, b, z)
        target = math.sqrt(a * a + b * b) * math.sqrt(2 / math.pi)
        se = vals.std() / math.sqrt(z.size)
        assert abs(vals.mean() - target) <= 4 * se


class TestCentring:
    def test_unit(self):
        assert pair_centring_term(np.ones(8)) == pytest.approx(2 / math.sqrt(math.pi), rel=1e-14)

    def test_homogeneous(self):
        assert pair_centring_term(np.full(5, 3.0)) == pytest.approx(3 * 2 / math.sqrt(math.pi), rel=1e-14)

    def test_single_pair(self):
        assert pair_centring_term([1.0, 0.0]) == pytest.approx(math.sqrt(2 / math.pi), rel=1e-14)

    def test_matches_double_loop(self):
        s = np.random.default_rng(1).uniform(0.2, 3, size=9)
        total = sum(math.sqrt(s[j] ** 2 + s[k] ** 2) for j in range(9) for k in range(9) if j != k)
        assert pair_centring_term(s) == pytest.approx(total * math.sqrt(2 / math.pi) / 72, rel=1e-13)

    def test_rejects_single(self):
        with pytest.raises(InputError):
            pair_centring_term([1.0])


class TestPsi:
    def test_constant_closed_form(self):
        assert psi_sq_constant(1.0) == pytest.approx(0.651006, abs=2e-6)
        assert psi_sq_constant(0.0) == 0.0
        assert psi_sq_constant(2.0) == pytest.approx(4 * psi_sq_constant(1.0), rel=1e-15)
        assert PSI_SQ_UNIT == pytest.approx(QUAD_PSI_11, rel=1e-12)

    def test_unit_large_b(self):
        est = psi_hat_sq(np.ones(200), mc_reps=200_000, seed=3)
        assert est.value == pytest.approx(PSI_SQ_UNIT, rel=0.05)
        assert (est.mc_reps, est.seed) == (200_000, 3)

    def test_homogeneity(self):
        s = np.random.default_rng(2).uniform(0.5, 2, size=7)
        a = psi_hat_sq(s, 5000, seed=9).value
        b = psi_hat_sq(2.5 * s, 5000, seed=9).value
        assert b == pytest.approx(2.5 ** 2 * a, rel=1e-10)

    @pytest.mark.parametrize("sig,expected", [([1.0, 1.0], QUAD_PSI_11), ([1.0, 2.0], QUAD_PSI_12)])
    def test_two_blocks_against_quadrature(self, sig, expected):
        assert psi_hat_sq(sig, 400_000, seed=1).value == pytest.approx(expected, rel=0.02)

    def test_deduplication_matches_distinct_path(self):
        # tiny perturbations make every value distinct; result must be continuous in the input
        s = np.array([1.0, 1.0, 2.0, 2.0, 2.0, 0.5])
        a = psi_hat_sq(s, 3000, seed=4).value
        b = psi_hat_sq(s + np.arange(6) * 1e-12, 3000, seed=4).value
        assert a == pytest.approx(b, rel=1e-8)

    def test_chunking_does_not_change_result(self):
        s = np.random.default_rng(8).uniform(0.5, 2, size=10)
        a = psi_hat_sq(s, 2000, seed=5).value
        b = psi_hat_sq(s, 2000, seed=5, chunk_elems=700).value
        assert a == pytest.approx(b, rel=1e-12)

    def test_deterministic(self):
        s = [0.7, 1.3, 1.1, 0.9]
        assert psi_hat_sq(s, 1000, seed=42).value == psi_hat_sq(s, 1000, seed=42).value
        assert psi_hat_sq(s, 1000, seed=42).value != psi_hat_sq(s, 1000, seed=43).value

    @given(st.lists(st.floats(0, 10), min_size=2, max_size=12))
    def test_nonnegative(self, s):
        if not any(v > 0 for v in s):
            return
        assert psi_hat_sq(s, 200, seed=0).value >= 0

    def test_rejects(self):
        with pytest.raises(DegenerateDataError):
            psi_hat_sq([0.0, 0.0, 0.0], 100)
        with pytest.raises(InputError):
            psi_hat_sq([1.0], 100)
        with pytest.raises(InputError):
            psi_hat_sq([1.0, 1.0], 0)
