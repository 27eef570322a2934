"""Recursive change-point localisation, trend fitting and seasonal differencing.

Break indices are 1-based and name the last observation before the change:
a break at ``t`` splits the series into ``x[1..t]`` and ``x[t+1..n]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .blocks import BlockScheme, local_block_means, make_block_scheme
from .errors import ConfigError, DegenerateDataError, InputError
from .lrv import make_subsampling_scheme
from .meantest import TestConfig, TestOutcome, run_test
from .series import as_values

DEFAULT_MIN_SEGMENT = 50
DEFAULT_EXCLUSION = 0.1


def _ceil(v: float) -> int:
    return int(math.ceil(v - 1e-9))


def locate_dominant_change(x, sch: BlockScheme, exclusion_fraction: float = DEFAULT_EXCLUSION) -> int:
    """Most likely position of the dominant mean change.

    First finds the adjacent block pair ``(j*, j*+1)`` with the largest gap in
    block means, then the split ``t`` inside those two blocks that maximises
    the gap between the sample means left and right of ``t``. The first and
    last ``ceil(exclusion_fraction * 2l)`` positions of the ``2l`` window are
    excluded. Ties go to the smallest index.

    Returns
    -------
    int
        1-based index of the last observation before the change.
    """
    if not 0 <= exclusion_fraction < 0.5:
        raise ConfigError(f"exclusion_fraction must lie in [0, 0.5), got {exclusion_fraction}")
    x = as_values(x)
    means = local_block_means(x, sch)
    j0 = int(np.argmax(np.abs(np.diff(means))))  # 0-based j*
    length = sch.block_length
    width = 2 * length
    offset = j0 * length
    window = x[offset:offset + width]
    window = window - window.mean()

    skip = _ceil(exclusion_fraction * width)
    # p = number of window observations left of the split
    p = np.arange(max(1, skip + 1), min(width - 1, width - skip) + 1)
    if p.size == 0:
        raise InputError("no admissible split position remains after boundary exclusion")
    csum = np.cumsum(window)
    left = csum[p - 1] / p
    right = (csum[-1] - csum[p - 1]) / (width - p)
    best = int(np.argmax(np.abs(left - right)))
    return offset + int(p[best])


def piecewise_mean(x, breaks) -> np.ndarray:
    """Step function equal to the sample mean of each segment between breaks."""
    x = as_values(x)
    edges = [0, *[int(b) for b in breaks], x.size]
    out = np.empty_like(x)
    for lo, hi in zip(edges[:-1], edges[1:]):
        if not lo < hi:
            raise InputError(f"breaks must be strictly increasing interior indices, got {list(breaks)}")
        out[lo:hi] = x[lo:hi].mean()
    return out


@dataclass(frozen=True)
class Split:
    index: int
    start: int
    stop: int
    outcome: TestOutcome


@dataclass
class ChangePointSet:
    breaks: list[int]
    segment_means: list[float]
    splits: list[Split] = field(default_factory=list)

    @property
    def n_segments(self) -> int:
        return len(self.breaks) + 1


def node_seed(seed: int, start: int, stop: int) -> int:
    """Deterministic seed for the segment ``x[start:stop]`` (0-based, half-open)."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(start, stop))
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def _testable(n: int, cfg: TestConfig) -> bool:
    try:
        make_block_scheme(n, cfg.s)
        make_subsampling_scheme(n, cfg.q, cfg.c0)
    except InputError:
        return False
    return True


def segment_recursively(x, cfg: TestConfig | None = None, min_segment: int = DEFAULT_MIN_SEGMENT,
                        exclusion_fraction: float = DEFAULT_EXCLUSION) -> ChangePointSet:
    """Split the series at the dominant change until no segment rejects.

    Each segment is tested afresh with blocking rebuilt from its own length
    and a seed derived from ``(cfg.seed, start, stop)``. A rejected segment
    is split at :func:`locate_dominant_change` unless either part would be
    shorter than ``min_segment``. Segments that are too short or degenerate
    (constant) count as accepted.
    """
    cfg = cfg or TestConfig()
    x = as_values(x)
    n = x.size
    if min_segment < 4 or not _testable(min_segment, cfg):
        raise ConfigError(f"min_segment={min_segment} is too short for s={cfg.s}, q={cfg.q}, c0={cfg.c0}")
    if n < min_segment:
        raise InputError(f"series of length {n} is shorter than min_segment={min_segment}")

    splits: list[Split] = []

    def visit(start: int, stop: int) -> None:
        seg = x[start:stop]
        if seg.size < min_segment or not _testable(seg.size, cfg):
            return
        try:
            outcome = run_test(seg, replace(cfg, seed=node_seed(cfg.seed, start, stop)))
        except DegenerateDataError:
            return
        if not outcome.reject:
            return
        t = locate_dominant_change(seg, make_block_scheme(seg.size, cfg.s), exclusion_fraction)
        if t < min_segment or seg.size - t < min_segment:
            return
        splits.append(Split(index=start + t, start=start, stop=stop, outcome=outcome))
        visit(start, start + t)
        visit(start + t, stop)

    visit(0, n)
    breaks = sorted(s.index for s in splits)
    edges = [0, *breaks, n]
    seg_means = [float(x[lo:hi].mean()) for lo, hi in zip(edges[:-1], edges[1:])]
    return ChangePointSet(breaks=breaks, segment_means=seg_means, splits=splits)


@dataclass
class TrendFit:
    degree: int
    coefficients: np.ndarray
    fitted: np.ndarray
    residual_test: TestOutcome | None


def trend_basis(n: int, degree: int) -> np.ndarray:
    t = np.arange(1, n + 1) / n
    return np.vander(t, degree + 1, increasing=True)


def fit_polynomial_trend(x, degree: int, cfg: TestConfig | None = None,
                         test_residuals: bool = True) -> TrendFit:
    """Least-squares polynomial trend in ``t = i/n`` and a mean test on the residuals.

    Coefficients are in increasing order of power. Solved through a QR
    factorisation of the design matrix.
    """
    x = as_values(x)
    n = x.size
    if degree < 0 or degree > 10:
        raise ConfigError(f"degree must lie in 0..10, got {degree}")
    if degree + 1 > n:
        raise InputError(f"degree {degree} needs at least {degree + 1} observations")
    design = trend_basis(n, degree)
    qmat, rmat = np.linalg.qr(design)
    coef = np.linalg.solve(rmat, qmat.T @ x)
    fitted = design @ coef
    outcome = run_test(x - fitted, cfg) if test_residuals else None
    return TrendFit(degree=degree, coefficients=coef, fitted=fitted, residual_test=outcome)


def seasonal_difference(x, lag: int):
    """``z_i = x_{i+lag} - x_i``; length ``n - lag``."""
    x = as_values(x)
    if lag < 1:
        raise ConfigError(f"lag must be positive, got {lag}")
    if x.size <= lag:
        raise InputError(f"series of length {x.size} is too short for lag {lag}")
    return x[lag:] - x[:-lag]
