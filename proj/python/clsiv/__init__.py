"""Convex combination of OLS and instrumental-variable estimators.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from ._core import (
    BootstrapMoments,
    ClsResult,
    Dataset,
    FitResult,
    McSummary,
    MseParts,
    NumericError,
    PairStats,
    ValidationError,
    __version__,
    assemble,
    bootstrap_mse_optimality_check,
    bootstrap_pi,
    bootstrap_variance_cls,
    draw_model_i,
    draw_model_ii,
    empirical_mse_trace,
    estimate_pi,
    fit_cls,
    fit_jive,
    fit_ols,
    fit_tsls,
    moment_caveat,
    pair_stats,
    run_monte_carlo,
)

__all__ = [
    "BootstrapMoments",
    "ClsResult",
    "Dataset",
    "FitResult",
    "McSummary",
    "MseParts",
    "NumericError",
    "PairStats",
    "ValidationError",
    "__version__",
    "assemble",
    "bootstrap_mse_optimality_check",
    "bootstrap_pi",
    "bootstrap_variance_cls",
    "draw_model_i",
    "draw_model_ii",
    "empirical_mse_trace",
    "estimate_pi",
    "fit_cls",
    "fit_jive",
    "fit_ols",
    "fit_tsls",
    "moment_caveat",
    "pair_stats",
    "run_monte_carlo",
]
