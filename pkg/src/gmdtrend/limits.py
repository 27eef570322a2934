"""Gaussian helpers, the centring term and the limit variance of the statistic."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import DegenerateDataError, InputError

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
# limit variance of sqrt(b) * (GMD - 2/sqrt(pi)) for unit-variance normal arguments
PSI_SQ_UNIT = 4.0 / 3.0 + 8.0 / math.pi * (math.sqrt(3.0) - 2.0)

DEFAULT_PSI_REPS = 7000
FAST_PSI_REPS = 1000

# Acklam's rational approximation to the normal quantile
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def normal_cdf(x: float) -> float:
    """Standard normal distribution function via ``erfc`` (no cancellation in the tails)."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def normal_quantile(p: float) -> float:
    """Inverse of :func:`normal_cdf`.

    Acklam's rational approximation (relative error about 1e-9) followed by
    one Halley step against ``normal_cdf``.
    """
    if not 0.0 < p < 1.0:
        raise InputError(f"quantile level must lie in (0, 1), got {p}")
    if p < _P_LOW:
        r = math.sqrt(-2.0 * math.log(p))
        x = (((((_C[0] * r + _C[1]) * r + _C[2]) * r + _C[3]) * r + _C[4]) * r + _C[5]) / \
            ((((_D[0] * r + _D[1]) * r + _D[2]) * r + _D[3]) * r + 1.0)
    elif p <= 1.0 - _P_LOW:
        r = p - 0.5
        t = r * r
        x = (((((_A[0] * t + _A[1]) * t + _A[2]) * t + _A[3]) * t + _A[4]) * t + _A[5]) * r / \
            (((((_B[0] * t + _B[1]) * t + _B[2]) * t + _B[3]) * t + _B[4]) * t + 1.0)
    else:
        r = math.sqrt(-2.0 * math.log1p(-p))
        x = -(((((_C[0] * r + _C[1]) * r + _C[2]) * r + _C[3]) * r + _C[4]) * r + _C[5]) / \
            ((((_D[0] * r + _D[1]) * r + _D[2]) * r + _D[3]) * r + 1.0)
    err = normal_cdf(x) - p
    u = err * math.sqrt(2.0 * math.pi) * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


def folded_conditional_mean(a, b, z):
    """``E|a z - b Z'|`` for ``Z' ~ N(0, 1)``, i.e. the mean of a folded normal.

    Broadcasts over array arguments. With ``c = a z``:
    ``b sqrt(2/pi) exp(-c^2 / (2 b^2)) + c (2 Phi(c / b) - 1)``, and ``|c|``
    when ``b = 0``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = a * np.asarray(z, dtype=float)
    pos = b > 0
    safe_b = np.where(pos, b, 1.0)
    # tiny b overflows the ratio; the exp term then vanishes and the result is |c|
    with np.errstate(over="ignore"):
        ratio = c / safe_b
        val = safe_b * SQRT_2_OVER_PI * np.exp(-0.5 * ratio * ratio) + c * (2.0 * ndtr(ratio) - 1.0)
    out = np.where(pos, val, np.abs(c))
    return float(out) if out.ndim == 0 else out


def pair_centring_term(sigma_hats) -> float:
    """``sqrt(2/pi) / (b (b-1)) * sum_{j != k} sqrt(s_j^2 + s_k^2)``."""
    s = np.asarray(sigma_hats, dtype=float)
    b = s.size
    if b < 2:
        raise InputError("the centring term needs at least two blocks")
    sq = s * s
    pair = np.sqrt(sq[:, None] + sq[None, :])
    total = pair.sum() - np.sqrt(2.0 * sq).sum()
    return float(SQRT_2_OVER_PI * total / (b * (b - 1)))


def psi_sq_constant(sigma: float) -> float:
    return sigma * sigma * PSI_SQ_UNIT


@dataclass(frozen=True)
class PsiEstimate:
    value: float
    mc_reps: int
    seed: int


def psi_hat_sq(sigma_hats, mc_reps: int = DEFAULT_PSI_REPS, seed: int = 0,
               chunk_elems: int = 2_000_000) -> PsiEstimate:
    """Monte Carlo estimate of the limit variance from block standard deviations.

    For a standard normal ``z`` and each block ``j`` let

        A_j(z) = 1/(b-1) sum_{k != j} [E(|s_j Z - s_k Z'| | Z = z) - E|s_j Z - s_k Z'|]

    where the conditional mean is the folded normal mean and the unconditional
    one is ``sqrt(s_j^2 + s_k^2) sqrt(2/pi)``. The estimate is
    ``4/b sum_j mean_z A_j(z)^2`` over ``mc_reps`` draws of ``z``.

    Blocks sharing a standard deviation share ``A_j``, so the work is
    quadratic in the number of distinct values rather than in ``b``.

    Parameters
    ----------
    sigma_hats : array_like
        Block standard deviations, at least two.
    mc_reps : int
        Number of standard normal draws.
    seed : int
        Seed for ``numpy.random.default_rng`` (PCG64).

    Returns
    -------
    PsiEstimate
    """
    s = np.asarray(sigma_hats, dtype=float)
    b = s.size
    if b < 2:
        raise InputError("the limit variance needs at least two blocks")
    if mc_reps < 1:
        raise InputError("mc_reps must be positive")
    if np.any(s < 0) or not np.all(np.isfinite(s)):
        raise InputError("block standard deviations must be finite and non-negative")
    if not np.any(s > 0):
        raise DegenerateDataError("all block standard deviations vanish")

    z = np.random.default_rng(seed).standard_normal(mc_reps)
    uniq, counts = np.unique(s, return_counts=True)
    m = uniq.size
    uncond = SQRT_2_OVER_PI * np.sqrt(uniq[:, None] ** 2 + uniq[None, :] ** 2)
    weights = counts.astype(float)

    sq_sum = np.zeros(m)
    step = max(1, chunk_elems // (m * m))
    for lo in range(0, mc_reps, step):
        zc = z[lo:lo + step]
        # g[a, c, r] = E(|u_a Z - u_c Z'| | Z = z_r) - E|u_a Z - u_c Z'|
        g = folded_conditional_mean(uniq[:, None, None], uniq[None, :, None], zc[None, None, :])
        g = g - uncond[:, :, None]
        own = g[np.arange(m), np.arange(m), :]
        a_vals = (np.einsum("c,acr->ar", weights, g) - own) / (b - 1)
        sq_sum += np.sum(a_vals * a_vals, axis=1)

    value = 4.0 * float(np.dot(weights, sq_sum / mc_reps)) / b
    return PsiEstimate(value=value, mc_reps=int(mc_reps), seed=int(seed))
