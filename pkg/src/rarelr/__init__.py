"""Bayesian likelihood ratios for matches with types unseen in the database.

Two sampling models are covered, each with its proper Bayesian likelihood
ratio and the common plug-in comparator: a beta prior on a single type's
frequency, and symmetric unit-Dirichlet frequencies with a random number of
types.  Independent oracles (quadrature, exact enumeration, importance
sampling) verify both, and a sweep engine reproduces the sensitivity
analyses as CSV grids.
"""

from .beta_binomial import (
    BetaParams,
    BinomialData,
    lr_full,
    lr_joint,
    lr_plugin,
    lr_two_step,
    posterior,
)
from .dirichlet_multinomial import (
    DirichletModel,
    EmptySupportError,
    RareMatchData,
    lr_negbinomial,
    lr_plugin_dirichlet,
    lr_poisson,
    lr_series,
)
from .kpriors import (
    CustomTable,
    Degenerate,
    KPrior,
    NegBinomialTrunc,
    PoissonTrunc,
    nb_from_mean,
    parse_prior_spec,
)
from .numerics import (
    LogValue,
    NonConvergenceError,
    SeriesDiagnostics,
    log_binomial,
    log_gamma,
    log_sum_series,
    series_ratio,
)
from .oracles import (
    DegenerateWeightsError,
    OracleConfig,
    QuadratureError,
    ScaleExceededError,
    TypeAssignment,
    beta_lr_quadrature,
    dirichlet_posterior_mean_exact,
    dirichlet_posterior_mean_mc,
)
from .results import LRResult
from .sweep import (
    BUILTIN_FIGURES,
    SweepRow,
    SweepSpec,
    builtin_figure,
    run_sweep,
    sweep_spec_from_json,
    write_sweep_csv,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BetaParams",
    "BinomialData",
    "posterior",
    "lr_full",
    "lr_plugin",
    "lr_joint",
    "lr_two_step",
    "KPrior",
    "Degenerate",
    "PoissonTrunc",
    "NegBinomialTrunc",
    "CustomTable",
    "nb_from_mean",
    "parse_prior_spec",
    "DirichletModel",
    "RareMatchData",
    "EmptySupportError",
    "lr_series",
    "lr_poisson",
    "lr_negbinomial",
    "lr_plugin_dirichlet",
    "LogValue",
    "SeriesDiagnostics",
    "NonConvergenceError",
    "log_gamma",
    "log_binomial",
    "log_sum_series",
    "series_ratio",
    "LRResult",
    "TypeAssignment",
    "OracleConfig",
    "ScaleExceededError",
    "DegenerateWeightsError",
    "QuadratureError",
    "beta_lr_quadrature",
    "dirichlet_posterior_mean_exact",
    "dirichlet_posterior_mean_mc",
    "SweepSpec",
    "SweepRow",
    "run_sweep",
    "builtin_figure",
    "write_sweep_csv",
    "sweep_spec_from_json",
    "BUILTIN_FIGURES",
]
