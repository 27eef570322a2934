import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import norm

from gmdtrend.errors import ConfigError, DegenerateDataError, InputError
from gmdtrend.meantest import (
    TestConfig,
    run_test,
    test_mean_constancy,
    test_mean_constancy_simplified,
)

from oracles import brute_kappa_tilde_x


def oracle_statistic(x, s=0.7, q=0.4, c0=10.0, mc_reps=500, seed=0):
    """Loop-level evaluation of the full statistic."""
    n = len(x)
    l = math.floor(n ** s + 1e-9)
    b = n // l
    lt = math.floor(n ** q + 1e-9)
    bt = n // lt
    means = [sum(x[j * l:(j + 1) * l]) / l for j in range(b)]
    sds = [math.sqrt(sum((v - means[j]) ** 2 for v in x[j * l:(j + 1) * l]) / l) for j in range(b)]
    u = sum(abs(means[i] - means[k]) for i in range(b) for k in range(b) if i != k) / (b * (b - 1))
    ktx = brute_kappa_tilde_x(list(x), lt, bt, c0)
    khat = ktx / (sum(sds) / b)
    cent = sum(math.sqrt(2 / math.pi) * math.hypot(sds[j], sds[k])
               for j in range(b) for k in range(b) if j != k) / (b * (b - 1))

    z = np.random.default_rng(seed).standard_normal(mc_reps)
    psi = 0.0
    for j in range(b):
        acc = np.zeros(mc_reps)
        for k in range(b):
            if k == j:
                continue
            c = sds[j] * z
            cond = sds[k] * 2 * norm.pdf(c / sds[k]) + c * (2 * norm.cdf(c / sds[k]) - 1)
            acc += cond - math.sqrt(2 / math.pi) * math.hypot(sds[j], sds[k])
        psi += np.mean((acc / (b - 1)) ** 2)
    psi *= 4 / b
    return math.sqrt(b) / math.sqrt(psi) * (math.sqrt(l) * u / khat - cent)


def oracle_simplified(x, s=0.7, q=0.4, c0=10.0):
    n = len(x)
    l = math.floor(n ** s + 1e-9)
    b = n // l
    lt = math.floor(n ** q + 1e-9)
    means = [sum(x[j * l:(j + 1) * l]) / l for j in range(b)]
    u = sum(abs(means[i] - means[k]) for i in range(b) for k in range(b) if i != k) / (b * (b - 1))
    ktx = brute_kappa_tilde_x(list(x), lt, n // lt, c0)
    psi = 4 / 3 + 8 / math.pi * (math.sqrt(3) - 2)
    return math.sqrt(b) * (math.sqrt(l) * u / ktx - 2 / math.sqrt(math.pi)) / math.sqrt(psi)


class TestConfigValidation:
    @pytest.mark.parametrize("kw", [
        {"s": 0.5}, {"s": 1.0}, {"q": 0.0}, {"q": 0.8}, {"c0": 0.5}, {"alpha": 0.0},
        {"alpha": 1.0}, {"psi_mc_reps": 0}, {"seed": -1}, {"variant": "robust"},
    ])
    def test_rejects(self, kw):
        with pytest.raises(ConfigError):
            TestConfig(**kw)

    def test_defaults(self):
        cfg = TestConfig()
        assert (cfg.s, cfg.q, cfg.c0, cfg.alpha, cfg.psi_mc_reps) == (0.7, 0.4, 10.0, 0.05, 7000)


class TestAgainstOracle:
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_full(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=300) * np.linspace(0.5, 2, 300) + (np.arange(300) > 200)
        cfg = TestConfig(psi_mc_reps=500, seed=seed, c0=3)
        got = test_mean_constancy(x, cfg).statistic
        assert got == pytest.approx(oracle_statistic(list(x), c0=3, mc_reps=500, seed=seed), rel=1e-9)

    @pytest.mark.parametrize("n,c0", [(300, 3), (500, 10)])
    def test_simplified(self, n, c0):
        x = np.random.default_rng(n).normal(size=n)
        got = test_mean_constancy_simplified(x, TestConfig(c0=c0, variant="simplified")).statistic
        assert got == pytest.approx(oracle_simplified(list(x), c0=c0), rel=1e-9)


class TestBehaviour:
    def test_constant_degenerate(self):
        x = np.full(500, 2.0)
        with pytest.raises(DegenerateDataError):
            test_mean_constancy(x)
        with pytest.raises(DegenerateDataError):
            test_mean_constancy_simplified(x)

    def test_too_short(self):
        with pytest.raises(InputError):
            test_mean_constancy(np.arange(10.0))

    @pytest.mark.parametrize("variant", ["full", "simplified"])
    def test_decision_matches_p_value(self, variant):
        rng = np.random.default_rng(7)
        for h in np.linspace(0, 1, 12):
            x = rng.normal(size=500) + h * (np.arange(500) >= 250)
            out = run_test(x, TestConfig(variant=variant, psi_mc_reps=300))
            assert out.reject == (out.p_value < out.alpha)
            assert out.critical_value == pytest.approx(1.6448536269514722, rel=1e-12)
            assert out.p_value == pytest.approx(norm.sf(out.statistic), abs=1e-12)

    def test_outcome_fields(self):
        out = test_mean_constancy(np.random.default_rng(0).normal(size=500), TestConfig(psi_mc_reps=200))
        assert (out.n, out.block_length, out.block_count, out.sub_length, out.sub_count) == (500, 77, 6, 12, 41)
        assert out.kappa_hat is not None and out.psi_mc_reps == 200
        simple = test_mean_constancy_simplified(np.random.default_rng(0).normal(size=500))
        assert simple.kappa_hat is None and simple.psi_mc_reps is None

    def test_simplified_ignores_seed(self):
        x = np.random.default_rng(3).normal(size=400)
        a = run_test(x, TestConfig(variant="simplified", seed=1))
        b = run_test(x, TestConfig(variant="simplified", seed=99))
        assert a.statistic == b.statistic

    def test_full_deterministic(self):
        x = np.random.default_rng(3).normal(size=400)
        cfg = TestConfig(psi_mc_reps=500, seed=11)
        assert test_mean_constancy(x, cfg) == test_mean_constancy(x, cfg)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10_000), st.floats(-1e4, 1e4))
    def test_shift_invariance(self, seed, c):
        x = np.random.default_rng(seed).normal(size=300)
        cfg = TestConfig(psi_mc_reps=200)
        assert run_test(x + c, cfg).statistic == pytest.approx(run_test(x, cfg).statistic, abs=1e-6)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10_000), st.floats(1e-3, 1e3))
    def test_scale_invariance(self, seed, c):
        x = np.random.default_rng(seed).normal(size=300)
        cfg = TestConfig(psi_mc_reps=200)
        assert run_test(c * x, cfg).statistic == pytest.approx(run_test(x, cfg).statistic, rel=1e-6, abs=1e-9)

    def test_power_increases_with_jump(self):
        n, reps = 1000, 500
        rng = np.random.default_rng(2024)
        cfg = TestConfig(psi_mc_reps=200)
        rates = []
        for h in (0.0, 0.1, 0.2, 0.3):
            hits = sum(run_test(rng.standard_normal(n) + h * (np.arange(n) >= n // 2), cfg).reject
                       for _ in range(reps))
            rates.append(hits / reps)
        assert rates == sorted(rates) and len(set(rates)) == 4
        assert rates[0] < 0.12
        assert rates[3] > 0.9
