"""Non-overlapping blocking of a series and Gini's mean difference of block means.

Blocks are 1-based in the docstrings: block ``j`` covers observations
``(j-1)*l + 1 ... j*l``. Internally block ``j`` is row ``j-1`` of the
``(b, l)`` reshaped prefix of the series; the trailing ``n - b*l``
observations never enter any block statistic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InputError
from .series import as_values

# guards floor(n**s) against n**s landing just below an integer
_POW_EPS = 1e-9


def _floor_pow(n: int, s: float) -> int:
    return int(math.floor(n ** s + _POW_EPS))


@dataclass(frozen=True)
class BlockScheme:
    n: int
    s: float
    block_length: int
    block_count: int

    @property
    def discarded_tail(self) -> int:
        return self.n - self.block_count * self.block_length

    @property
    def used(self) -> int:
        return self.block_count * self.block_length


def make_block_scheme(n: int, s: float) -> BlockScheme:
    """Blocking with ``l = floor(n**s)`` and ``b = floor(n / l)``.

    Raises
    ------
    ConfigError
        If ``s`` is outside (0.5, 1).
    InputError
        If ``n < 4`` or fewer than two blocks fit.
    """
    if not 0.5 < s < 1:
        raise ConfigError(f"block exponent s must lie in (0.5, 1), got {s}")
    if n < 4:
        raise InputError(f"series of length {n} is too short (need at least 4)")
    length = _floor_pow(n, s)
    count = n // length
    if count < 2:
        raise InputError(f"n={n} with s={s} yields fewer than two blocks")
    return BlockScheme(n=n, s=s, block_length=length, block_count=count)


def _check(x, sch: BlockScheme) -> np.ndarray:
    x = as_values(x)
    if x.size != sch.n:
        raise InputError(f"scheme built for n={sch.n}, series has length {x.size}")
    return x


def _block_matrix(x, sch: BlockScheme) -> np.ndarray:
    x = _check(x, sch)
    return x[: sch.used].reshape(sch.block_count, sch.block_length)


def local_block_means(x, sch: BlockScheme) -> np.ndarray:
    return _block_matrix(x, sch).mean(axis=1)


def local_block_variances(x, sch: BlockScheme) -> np.ndarray:
    """Centred second moment of each block, normalised by ``l`` (not ``l - 1``)."""
    blocks = _block_matrix(x, sch)
    dev = blocks - blocks.mean(axis=1, keepdims=True)
    return np.mean(dev * dev, axis=1)


def gini_mean_difference(v, naive: bool = False) -> float:
    """Gini's mean difference ``sum_{j != k} |v_j - v_k| / (m (m - 1))``.

    Uses the sorted identity ``sum_{j<k} (v_(k) - v_(j)) = sum_i (2i - 1 - m) v_(i)``,
    which is O(m log m). ``naive=True`` evaluates the O(m^2) double sum and
    exists for testing.
    """
    v = np.asarray(v, dtype=float)
    m = v.size
    if m < 2:
        raise InputError("Gini's mean difference needs at least two values")
    if naive:
        return float(np.abs(v[:, None] - v[None, :]).sum() / (m * (m - 1)))
    vs = np.sort(v)
    weights = 2.0 * np.arange(1, m + 1) - 1.0 - m
    return float(max(2.0 * np.dot(weights, vs) / (m * (m - 1)), 0.0))


def u_statistic(x, sch: BlockScheme) -> float:
    return gini_mean_difference(local_block_means(x, sch))
