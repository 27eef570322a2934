"""Studentised test for a constant mean based on block means.

Under a constant mean the statistic is asymptotically standard normal; under
any non-constant cadlag mean it diverges to +infinity, so the test rejects
for large values only.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .blocks import local_block_variances, make_block_scheme, u_statistic
from .errors import ConfigError, DegenerateDataError
from .limits import (
    DEFAULT_PSI_REPS,
    PSI_SQ_UNIT,
    normal_cdf,
    normal_quantile,
    pair_centring_term,
    psi_hat_sq,
)
from .lrv import kappa_tilde_x, make_subsampling_scheme
from .series import as_values

VARIANTS = ("full", "simplified")


@dataclass(frozen=True)
class TestConfig:
    """Tuning parameters; the defaults are the recommended ``s=0.7, q=0.4, c0=10``."""

    __test__ = False

    s: float = 0.7
    q: float = 0.4
    c0: float = 10.0
    alpha: float = 0.05
    psi_mc_reps: int = DEFAULT_PSI_REPS
    seed: int = 0
    variant: str = "full"

    def __post_init__(self):
        if not 0.5 < self.s < 1:
            raise ConfigError(f"s must lie in (0.5, 1), got {self.s}")
        if not 0 < self.q < self.s:
            raise ConfigError(f"q must lie in (0, s), got q={self.q}, s={self.s}")
        if self.c0 < 1:
            raise ConfigError(f"c0 must be >= 1, got {self.c0}")
        if not 0 < self.alpha < 1:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.psi_mc_reps < 1:
            raise ConfigError(f"psi_mc_reps must be positive, got {self.psi_mc_reps}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.variant not in VARIANTS:
            raise ConfigError(f"variant must be one of {VARIANTS}, got {self.variant!r}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TestOutcome:
    __test__ = False

    statistic: float
    p_value: float
    reject: bool
    critical_value: float
    alpha: float
    variant: str
    u_value: float
    kappa_tilde_x: float
    kappa_hat: float | None
    centring: float
    psi_hat_sq: float
    n: int
    block_length: int
    block_count: int
    sub_length: int
    sub_count: int
    c0: float
    psi_mc_reps: int | None
    seed: int

    def to_dict(self) -> dict:
        return asdict(self)


def _decide(stat: float, alpha: float) -> tuple[float, bool, float]:
    crit = normal_quantile(1.0 - alpha)
    p_value = 1.0 - normal_cdf(stat)
    return p_value, bool(stat > crit), crit


def test_mean_constancy(x, cfg: TestConfig | None = None) -> TestOutcome:
    """Heteroscedasticity-robust test of a constant mean.

    ``T = sqrt(b) / psi_hat * (sqrt(l) * U / kappa_hat - centring)`` where
    ``U`` is Gini's mean difference of the block means, ``kappa_hat`` the
    variance-normalised long run standard deviation, ``centring`` the
    pairwise term built from block standard deviations and ``psi_hat`` the
    Monte Carlo limit standard deviation. Rejects when ``T`` exceeds the
    standard normal ``1 - alpha`` quantile.

    Raises
    ------
    DegenerateDataError
        If the long run or limit variance estimate vanishes (e.g. constant data).
    InputError
        If the series is too short for either blocking.
    """
    cfg = cfg or TestConfig()
    x = as_values(x)
    n = x.size
    sch = make_block_scheme(n, cfg.s)
    sub = make_subsampling_scheme(n, cfg.q, cfg.c0)

    u = u_statistic(x, sch)
    sigma_hats = np.sqrt(local_block_variances(x, sch))
    mean_sd = float(np.mean(sigma_hats))
    ktx = kappa_tilde_x(x, sub)
    if mean_sd <= 0.0 or ktx <= 0.0:
        raise DegenerateDataError("long run variance estimate is zero; is the series constant?")
    khat = ktx / mean_sd

    centring = pair_centring_term(sigma_hats)
    psi = psi_hat_sq(sigma_hats, mc_reps=cfg.psi_mc_reps, seed=cfg.seed).value
    if psi <= 0.0:
        raise DegenerateDataError("limit variance estimate is zero")

    b, l = sch.block_count, sch.block_length
    stat = math.sqrt(b) / math.sqrt(psi) * (math.sqrt(l) * u / khat - centring)
    p_value, reject, crit = _decide(stat, cfg.alpha)
    return TestOutcome(
        statistic=stat, p_value=p_value, reject=reject, critical_value=crit,
        alpha=cfg.alpha, variant="full", u_value=u, kappa_tilde_x=ktx,
        kappa_hat=khat, centring=centring, psi_hat_sq=psi, n=n,
        block_length=l, block_count=b, sub_length=sub.sub_length,
        sub_count=sub.sub_count, c0=sub.c0, psi_mc_reps=cfg.psi_mc_reps,
        seed=cfg.seed,
    )


def test_mean_constancy_simplified(x, cfg: TestConfig | None = None) -> TestOutcome:
    """Constant-variance version: ``sqrt(b) (sqrt(l) U / kappa_tilde_x - 2/sqrt(pi)) / sqrt(psi^2)``.

    ``psi^2 = 4/3 + 8/pi (sqrt(3) - 2)``. No Monte Carlo step, so the result
    does not depend on the seed.
    """
    cfg = cfg or TestConfig(variant="simplified")
    x = as_values(x)
    n = x.size
    sch = make_block_scheme(n, cfg.s)
    sub = make_subsampling_scheme(n, cfg.q, cfg.c0)

    u = u_statistic(x, sch)
    ktx = kappa_tilde_x(x, sub)
    if ktx <= 0.0:
        raise DegenerateDataError("long run variance estimate is zero; is the series constant?")
    b, l = sch.block_count, sch.block_length
    centring = 2.0 / math.sqrt(math.pi)
    stat = math.sqrt(b) * (math.sqrt(l) * u / ktx - centring) / math.sqrt(PSI_SQ_UNIT)
    p_value, reject, crit = _decide(stat, cfg.alpha)
    return TestOutcome(
        statistic=stat, p_value=p_value, reject=reject, critical_value=crit,
        alpha=cfg.alpha, variant="simplified", u_value=u, kappa_tilde_x=ktx,
        kappa_hat=None, centring=centring, psi_hat_sq=PSI_SQ_UNIT, n=n,
        block_length=l, block_count=b, sub_length=sub.sub_length,
        sub_count=sub.sub_count, c0=sub.c0, psi_mc_reps=None, seed=cfg.seed,
    )


test_mean_constancy.__test__ = False
test_mean_constancy_simplified.__test__ = False


def run_test(x, cfg: TestConfig | None = None) -> TestOutcome:
    """Dispatch on ``cfg.variant``."""
    cfg = cfg or TestConfig()
    if cfg.variant == "simplified":
        return test_mean_constancy_simplified(x, cfg)
    return test_mean_constancy(x, cfg)
