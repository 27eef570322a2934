"""Test for a constant mean in heteroscedastic, weakly dependent time series.

The statistic is Gini's mean difference of non-overlapping block means,
studentised with a mean-robust subsampling estimate of the long run
variance and a Monte Carlo estimate of its limit variance.
"""

__version__ = "0.1.0"

from .blocks import (
    BlockScheme,
    gini_mean_difference,
    local_block_means,
    local_block_variances,
    make_block_scheme,
    u_statistic,
)
from .changepoint import (
    ChangePointSet,
    TrendFit,
    fit_polynomial_trend,
    locate_dominant_change,
    piecewise_mean,
    seasonal_difference,
    segment_recursively,
)
from .errors import ConfigError, DegenerateDataError, GMDTrendError, InputError
from .limits import (
    PsiEstimate,
    folded_conditional_mean,
    normal_cdf,
    normal_quantile,
    pair_centring_term,
    psi_hat_sq,
    psi_sq_constant,
)
from .lrv import SubsamplingScheme, kappa_hat, kappa_tilde_x, make_subsampling_scheme
from .meantest import TestConfig, TestOutcome, run_test, test_mean_constancy, test_mean_constancy_simplified
from .series import TimeSeries

__all__ = [
    "BlockScheme", "ChangePointSet", "ConfigError", "DegenerateDataError", "GMDTrendError",
    "InputError", "PsiEstimate", "SubsamplingScheme", "TestConfig", "TestOutcome", "TimeSeries",
    "TrendFit", "fit_polynomial_trend", "folded_conditional_mean", "gini_mean_difference",
    "kappa_hat", "kappa_tilde_x", "local_block_means", "local_block_variances",
    "locate_dominant_change", "make_block_scheme", "make_subsampling_scheme", "normal_cdf",
    "normal_quantile", "pair_centring_term", "piecewise_mean", "psi_hat_sq", "psi_sq_constant",
    "run_test", "seasonal_difference", "segment_recursively", "test_mean_constancy",
    "test_mean_constancy_simplified", "u_statistic",
]
