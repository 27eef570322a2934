"""Subsampling estimation of the long run standard deviation.

Each short block is centred by the mean of the observations within ``c0``
blocks on either side, so that slowly varying or piecewise constant means
do not inflate the estimate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .blocks import BlockScheme, _floor_pow, local_block_variances
from .errors import ConfigError, DegenerateDataError, InputError
from .series import as_values


@dataclass(frozen=True)
class SubsamplingScheme:
    n: int
    q: float
    sub_length: int
    sub_count: int
    c0: float


def make_subsampling_scheme(n: int, q: float, c0: float = 10.0) -> SubsamplingScheme:
    if not 0 < q < 1:
        raise ConfigError(f"subsampling exponent q must lie in (0, 1), got {q}")
    if c0 < 1:
        raise ConfigError(f"neighbour radius c0 must be >= 1, got {c0}")
    if n < 2:
        raise InputError(f"series of length {n} is too short")
    length = _floor_pow(n, q)
    count = n // length
    if count < 2:
        raise InputError(f"n={n} with q={q} yields fewer than two subsampling blocks")
    if c0 >= count:
        raise InputError(
            f"c0={c0} must be smaller than the number of subsampling blocks ({count}); "
            "the series is too short for this configuration"
        )
    return SubsamplingScheme(n=n, q=q, sub_length=length, sub_count=count, c0=float(c0))


def centred_block_sums(x, sub: SubsamplingScheme) -> np.ndarray:
    """Block sums minus ``l~`` times the mean of the neighbouring window.

    The window reaches ``c0 * l~`` observations to each side of the block and
    is truncated at the series ends; its mean divides by the number of
    observations actually available. A fractional ``c0`` gives the outermost
    observation a fractional weight.
    """
    x = as_values(x)
    n = x.size
    if n != sub.n:
        raise InputError(f"scheme built for n={sub.n}, series has length {n}")
    # S_j is unaffected by a shift; centring keeps the prefix sums small
    x = x - x.mean()
    prefix = np.concatenate(([0.0], np.cumsum(x)))

    def integral(t):
        # integral over [0, t] of the step function equal to x_i on (i-1, i]
        t = np.clip(t, 0.0, float(n))
        k = np.floor(t).astype(np.int64)
        frac = t - k
        return prefix[k] + frac * x[np.minimum(k, n - 1)]

    length = sub.sub_length
    starts = np.arange(sub.sub_count, dtype=float) * length
    ends = starts + length
    radius = sub.c0 * length
    lo = np.clip(starts - radius, 0.0, float(n))
    hi = np.clip(ends + radius, 0.0, float(n))

    block_sums = prefix[ends.astype(np.int64)] - prefix[starts.astype(np.int64)]
    window_sum = (integral(starts) - integral(lo)) + (integral(hi) - integral(ends))
    window_size = (starts - lo) + (hi - ends)
    return block_sums - length * window_sum / window_size


def kappa_tilde_x(x, sub: SubsamplingScheme) -> float:
    """Mean-robust subsampling estimate of ``kappa_Y * mean(sigma)``.

    ``sqrt(2 c0 / (1 + 2 c0)) * sqrt(pi / 2) * mean_j |S_j| / sqrt(l~)`` with
    ``S_j`` from :func:`centred_block_sums`.
    """
    sums = centred_block_sums(x, sub)
    c0 = sub.c0
    scale = math.sqrt(2.0 * c0 / (1.0 + 2.0 * c0)) * math.sqrt(math.pi / 2.0)
    return float(scale * np.mean(np.abs(sums)) / math.sqrt(sub.sub_length))


def mean_block_sd(x, sch: BlockScheme) -> float:
    return float(np.mean(np.sqrt(local_block_variances(x, sch))))


def kappa_hat(x, sub: SubsamplingScheme, sch: BlockScheme) -> float:
    """Long run standard deviation of the noise, with the variance profile divided out."""
    denom = mean_block_sd(x, sch)
    if denom <= 0.0:
        raise DegenerateDataError("every block is constant; the long run variance is not identifiable")
    return kappa_tilde_x(x, sub) / denom
