"""Data-generating processes, mean/variance profiles and Monte Carlo tables.

All noise processes are scaled to a theoretical long run variance of one.
Random streams come from numpy's PCG64 seeded through ``SeedSequence``;
replication ``r`` of scenario ``i`` uses ``SeedSequence(master, spawn_key=(i, r))``,
so every table is reproducible and independent of evaluation order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.signal import lfilter

from .errors import ConfigError, InputError
from .lrv import kappa_tilde_x, make_subsampling_scheme
from .meantest import TestConfig, run_test

DGP_KINDS = ("iid_normal", "iid_exp", "ar1", "arma22", "garch11", "nonlinear_ar1")
MEAN_KINDS = ("H", "A1", "A2", "A3", "A4", "A5", "A1'", "A2'", "A3'", "A4'", "A5'")
VARIANCE_KINDS = ("const", "s1", "s2", "s3")

# batch-means estimate (2e6 x 20 draws) for y_i = 0.5 y_{i-1} cos(y_{i-1}) + e_i
NONLINEAR_AR1_LRV = 1.048


@dataclass(frozen=True)
class DGPSpec:
    kind: str
    params: tuple[float, ...] = ()
    burn_in: int = 1000

    def __post_init__(self):
        if self.kind not in DGP_KINDS:
            raise ConfigError(f"unknown process {self.kind!r}; expected one of {DGP_KINDS}")
        if self.burn_in < 0:
            raise ConfigError("burn_in must be non-negative")
        p = self.params
        if self.kind == "ar1":
            if len(p) != 1 or not abs(p[0]) < 1:
                raise ConfigError(f"ar1 needs one coefficient with |a| < 1, got {p}")
        elif self.kind == "arma22":
            if len(p) != 4:
                raise ConfigError(f"arma22 needs (ar1, ar2, ma1, ma2), got {p}")
            roots = np.roots([-p[1], -p[0], 1.0])
            if np.any(np.abs(roots) <= 1.0):
                raise ConfigError(f"arma22 AR polynomial must have roots outside the unit circle, got {p}")
        elif self.kind == "garch11":
            if len(p) != 3 or p[0] <= 0 or p[1] < 0 or p[2] < 0 or p[1] + p[2] >= 1:
                raise ConfigError(f"garch11 needs (a0 > 0, a1, b1) with a1 + b1 < 1, got {p}")
        elif self.kind == "nonlinear_ar1":
            if p not in ((), (0.5,)):
                raise ConfigError("nonlinear_ar1 is calibrated for lambda = 0.5 only")

    @property
    def label(self) -> str:
        if self.kind == "ar1":
            return f"ar1({self.params[0]:g})"
        return self.kind


STANDARD_DGPS = {
    "N(0,1)": DGPSpec("iid_normal"),
    "Exp(1)": DGPSpec("iid_exp"),
    "AR(1), 0.4": DGPSpec("ar1", (0.4,)),
    "AR(1), 0.7": DGPSpec("ar1", (0.7,)),
    "ARMA(2,2)": DGPSpec("arma22", (0.8, -0.4, 0.5, 0.34)),
    "GARCH(1,1)": DGPSpec("garch11", (0.1, 0.1, 0.8)),
}


def make_dgp(name: str, params: Sequence[float] | None = None, burn_in: int = 1000) -> DGPSpec:
    """Build a DGPSpec; omitted parameters take the values of the standard design."""
    defaults = {"ar1": (0.4,), "arma22": (0.8, -0.4, 0.5, 0.34), "garch11": (0.1, 0.1, 0.8),
                "nonlinear_ar1": (0.5,)}
    p = tuple(float(v) for v in params) if params else defaults.get(name, ())
    return DGPSpec(name, p, burn_in)


def lrv_theoretical(spec: DGPSpec) -> float:
    """Long run variance of the unscaled process (innovations of unit variance)."""
    p = spec.params
    if spec.kind in ("iid_normal", "iid_exp"):
        return 1.0
    if spec.kind == "ar1":
        return 1.0 / (1.0 - p[0]) ** 2
    if spec.kind == "arma22":
        return ((1.0 + p[2] + p[3]) / (1.0 - p[0] - p[1])) ** 2
    if spec.kind == "garch11":
        return p[0] / (1.0 - p[1] - p[2])
    return NONLINEAR_AR1_LRV


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _garch_path(eps: np.ndarray, a0: float, a1: float, b1: float) -> np.ndarray:
    out = np.empty_like(eps)
    var = a0 / (1.0 - a1 - b1)
    y_prev = 0.0
    for i, e in enumerate(eps.tolist()):
        if i:
            var = a0 + a1 * y_prev * y_prev + b1 * var
        y_prev = math.sqrt(var) * e
        out[i] = y_prev
    return out


def _nonlinear_path(eps: np.ndarray, lam: float) -> np.ndarray:
    out = np.empty_like(eps)
    y = 0.0
    for i, e in enumerate(eps.tolist()):
        y = lam * y * math.cos(y) + e
        out[i] = y
    return out


def generate_noise(spec: DGPSpec, n: int, seed=0) -> np.ndarray:
    """Simulate ``n`` values of the process, scaled to unit long run variance.

    ``seed`` may be an int or a ``numpy.random.Generator``. The first
    ``burn_in`` values are discarded for the recursive processes. The GARCH
    recursion starts at its stationary variance.
    """
    if n < 1:
        raise InputError("n must be positive")
    rng = _rng(seed)
    kind, p = spec.kind, spec.params
    if kind == "iid_normal":
        y = rng.standard_normal(n)
    elif kind == "iid_exp":
        y = rng.standard_exponential(n) - 1.0
    else:
        eps = rng.standard_normal(n + spec.burn_in)
        if kind == "ar1":
            path = lfilter([1.0], [1.0, -p[0]], eps)
        elif kind == "arma22":
            path = lfilter([1.0, p[2], p[3]], [1.0, -p[0], -p[1]], eps)
        elif kind == "garch11":
            path = _garch_path(eps, *p)
        else:
            path = _nonlinear_path(eps, p[0] if p else 0.5)
        y = path[spec.burn_in:]
    return y / math.sqrt(lrv_theoretical(spec))


def local_magnitude(n: int) -> float:
    return 0.3 * math.sqrt(1000.0 / n)


FIXED_MAGNITUDE = 0.3 * math.sqrt(2.0)


def mean_profile(kind: str, n: int, theta: float | None = None) -> np.ndarray:
    """Mean function evaluated at ``x = i/n``, ``i = 1..n``.

    ``A1``-``A5`` are local alternatives with magnitude ``0.3 sqrt(1000/n)``
    (half of that for the sine amplitude of ``A2``); primed kinds replace
    ``sqrt(1000/n)`` by ``sqrt(2)``. ``theta`` overrides the magnitude (for
    ``A2``/``A2'`` it is the sine amplitude).
    """
    if kind not in MEAN_KINDS:
        raise ConfigError(f"unknown mean profile {kind!r}; expected one of {MEAN_KINDS}")
    i = np.arange(1, n + 1)
    if kind == "H":
        return np.zeros(n)
    base = kind.rstrip("'")
    if theta is None:
        root = math.sqrt(2.0) if kind.endswith("'") else math.sqrt(1000.0 / n)
        theta = (0.15 if base == "A2" else 0.3) * root
    x = i / n
    # indicator boundaries in exact integer arithmetic
    if base == "A1":
        return theta * x
    if base == "A2":
        return theta * np.sin(4.0 * math.pi * x)
    if base == "A3":
        return theta * (2 * i >= n)
    if base == "A4":
        return theta * ((3 * i >= n) & (3 * i < 2 * n))
    return theta * (((5 * i >= n) & (5 * i < 2 * n)) | ((5 * i >= 3 * n) & (5 * i < 4 * n)))


def variance_profile(kind: str, n: int, theta: float | None = None) -> np.ndarray:
    """Standard deviation function at ``x = i/n``; each integrates to one over [0, 1]."""
    if kind not in VARIANCE_KINDS:
        raise ConfigError(f"unknown variance profile {kind!r}; expected one of {VARIANCE_KINDS}")
    if kind == "const":
        return np.ones(n)
    if theta is None:
        theta = local_magnitude(n)
    if abs(theta) >= 2:
        raise ConfigError(f"|theta_sigma| must be < 2 to keep sigma positive, got {theta}")
    i = np.arange(1, n + 1)
    x = i / n
    if kind == "s1":
        return (1.0 - theta / 2.0) + theta * x
    if kind == "s2":
        return 1.0 + theta / 2.0 * np.sin(4.0 * math.pi * x)
    return np.where(2 * i < n, 1.0 - theta / 2.0, 1.0 + theta / 2.0)


@dataclass(frozen=True)
class ScenarioSpec:
    dgp: DGPSpec
    mean_kind: str = "H"
    var_kind: str = "const"
    n: int = 500
    theta_mu: float | None = None
    theta_sigma: float | None = None
    replications: int | None = None

    def __post_init__(self):
        if self.mean_kind not in MEAN_KINDS:
            raise ConfigError(f"unknown mean profile {self.mean_kind!r}")
        if self.var_kind not in VARIANCE_KINDS:
            raise ConfigError(f"unknown variance profile {self.var_kind!r}")
        if self.n < 4:
            raise ConfigError("n must be at least 4")

    @property
    def label(self) -> str:
        return f"{self.dgp.label}/{self.mean_kind}/{self.var_kind}/n={self.n}"

    def to_dict(self) -> dict:
        return {
            "dgp": self.dgp.kind, "dgp_params": list(self.dgp.params), "burn_in": self.dgp.burn_in,
            "mean": self.mean_kind, "variance": self.var_kind, "n": self.n,
            "theta_mu": self.theta_mu, "theta_sigma": self.theta_sigma,
            "replications": self.replications,
        }


def synthesize(scn: ScenarioSpec, seed=0, noise: np.ndarray | None = None) -> np.ndarray:
    """``X_i = mu(i/n) + sigma(i/n) Y_i``; ``noise`` replaces the simulated ``Y``."""
    if noise is None:
        noise = generate_noise(scn.dgp, scn.n, seed)
    mu = mean_profile(scn.mean_kind, scn.n, scn.theta_mu)
    sigma = variance_profile(scn.var_kind, scn.n, scn.theta_sigma)
    return mu + sigma * noise


def replication_streams(master_seed: int, scenario_id: int, rep: int) -> tuple[np.random.Generator, int]:
    """Noise generator and Monte Carlo seed for one replication."""
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(scenario_id, rep))
    data_ss, psi_ss = ss.spawn(2)
    return np.random.default_rng(data_ss), int(psi_ss.generate_state(1, dtype=np.uint32)[0])


@dataclass
class RateRow:
    scenario: ScenarioSpec
    replications: int
    rejections: int
    statistics: np.ndarray = field(repr=False)

    @property
    def rate(self) -> float:
        return self.rejections / self.replications


def simulate_statistics(scn: ScenarioSpec, cfg: TestConfig, replications: int, seed: int,
                        scenario_id: int = 0) -> RateRow:
    stats = np.empty(replications)
    rejections = 0
    for r in range(replications):
        rng, psi_seed = replication_streams(seed, scenario_id, r)
        x = synthesize(scn, rng)
        out = run_test(x, replace(cfg, seed=psi_seed))
        stats[r] = out.statistic
        rejections += out.reject
    return RateRow(scenario=scn, replications=replications, rejections=rejections, statistics=stats)


def rejection_rate_table(scenarios: Sequence[ScenarioSpec], cfg: TestConfig | None = None,
                         replications: int = 4000, seed: int = 0) -> list[RateRow]:
    """Empirical rejection frequency per scenario.

    A scenario's own ``replications`` overrides the table-wide count.
    """
    cfg = cfg or TestConfig()
    if replications < 1:
        raise ConfigError("replications must be positive")
    return [
        simulate_statistics(scn, cfg, scn.replications or replications, seed, scenario_id=i)
        for i, scn in enumerate(scenarios)
    ]


@dataclass
class BiasRow:
    scenario: ScenarioSpec
    replications: int
    bias: float
    rmse: float
    mean: float


def lrv_bias_rmse(scenarios: Sequence[ScenarioSpec], cfg: TestConfig | None = None,
                  replications: int = 4000, seed: int = 0) -> list[BiasRow]:
    """Bias and RMSE of ``kappa_tilde_x`` against a true long run standard deviation of one."""
    cfg = cfg or TestConfig()
    if replications < 1:
        raise ConfigError("replications must be positive")
    rows = []
    for i, scn in enumerate(scenarios):
        reps = scn.replications or replications
        sub = make_subsampling_scheme(scn.n, cfg.q, cfg.c0)
        est = np.empty(reps)
        for r in range(reps):
            rng, _ = replication_streams(seed, i, r)
            est[r] = kappa_tilde_x(synthesize(scn, rng), sub)
        err = est - 1.0
        rows.append(BiasRow(scenario=scn, replications=reps, bias=float(err.mean()),
                            rmse=float(np.sqrt(np.mean(err * err))), mean=float(est.mean())))
    return rows


def size_corrected_power(stats_under_h, stats_under_a, alpha: float = 0.05) -> float:
    """Rejection rate under the alternative using the empirical null ``1 - alpha`` quantile."""
    h = np.asarray(stats_under_h, dtype=float)
    a = np.asarray(stats_under_a, dtype=float)
    if h.size == 0 or a.size == 0:
        raise InputError("size correction needs non-empty samples")
    if not 0 < alpha < 1:
        raise ConfigError(f"alpha must lie in (0, 1), got {alpha}")
    crit = np.quantile(h, 1.0 - alpha)
    return float(np.mean(a > crit))
