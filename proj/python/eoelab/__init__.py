"""Equation-of-exchange toolkit: velocity fitting, token-economy simulation,
and log-linear price models over daily cryptoasset series."""

from ._eoelab import (
    AssetId,
    AssetSeries,
    CVReport,
    EoEModel,
    Error,
    FitRanking,
    FittedDistribution,
    FittedLinearModel,
    PreprocessStats,
    __version__,
    cross_validate_lookahead,
    eoe_model_from_json,
    fit_eoe,
    fit_lookahead,
    fit_mle,
    load_series,
    rank_fits,
    rss_score,
    run_pipeline,
    simulate_batch,
    velocity_zoo_json,
)

__all__ = [
    "AssetId",
    "AssetSeries",
    "CVReport",
    "EoEModel",
    "Error",
    "FitRanking",
    "FittedDistribution",
    "FittedLinearModel",
    "PreprocessStats",
    "__version__",
    "cross_validate_lookahead",
    "eoe_model_from_json",
    "fit_eoe",
    "fit_lookahead",
    "fit_mle",
    "load_series",
    "rank_fits",
    "rss_score",
    "run_pipeline",
    "simulate_batch",
    "velocity_zoo_json",
]
