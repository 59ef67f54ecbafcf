"""Goodness-of-fit toolkit for logistic regression.

Implements the Hosmer-Lemeshow test, its generalized variant built on a
hat-matrix-corrected central matrix, grouping constructions, and a
reproducible Monte Carlo harness for studying the tests' null behavior
on data with replicated covariate patterns.
"""

from .cli import Recommendation, advise
from .dataset import (
    Dataset,
    EvpSummary,
    LoadOptions,
    aggregate_evps,
    load_dataset,
    make_dataset,
    save_dataset,
)
from .errors import (
    ConfigError,
    DataError,
    DegenerateGroupingError,
    DegenerateTestError,
    FitError,
    GofLabError,
    NonConvergenceError,
    RankDeficientError,
    SeparationError,
    SimulationError,
)
from .ghl import CentralMatrix, central_matrix, ghl_test, pseudo_inverse, residual_vector
from .grouping import (
    Grouping,
    GroupSummary,
    assign_groups,
    group_by_balanced_variance,
    group_by_quantiles,
    summarize_groups,
)
from .hl import TestResult, hl_statistic, hl_test
from .logistic import (
    FitOptions,
    FittedModel,
    fit_logistic,
    inverse_logit,
    log_likelihood,
    predict_prob,
)
from .simulate import (
    Scenario,
    SimSummary,
    gen_covariates,
    gen_responses,
    run_grid,
    run_scenario,
    substream,
    true_beta,
)
from .stats import McSummary, chi2_sf, mc_summary

__version__ = "0.1.0"

__all__ = [
    "CentralMatrix",
    "ConfigError",
    "DataError",
    "Dataset",
    "DegenerateGroupingError",
    "DegenerateTestError",
    "EvpSummary",
    "FitError",
    "FitOptions",
    "FittedModel",
    "GofLabError",
    "GroupSummary",
    "Grouping",
    "LoadOptions",
    "McSummary",
    "NonConvergenceError",
    "RankDeficientError",
    "Recommendation",
    "Scenario",
    "SeparationError",
    "SimSummary",
    "SimulationError",
    "TestResult",
    "advise",
    "aggregate_evps",
    "assign_groups",
    "central_matrix",
    "chi2_sf",
    "fit_logistic",
    "gen_covariates",
    "gen_responses",
    "ghl_test",
    "group_by_balanced_variance",
    "group_by_quantiles",
    "hl_statistic",
    "hl_test",
    "inverse_logit",
    "load_dataset",
    "log_likelihood",
    "make_dataset",
    "mc_summary",
    "predict_prob",
    "pseudo_inverse",
    "residual_vector",
    "run_grid",
    "run_scenario",
    "save_dataset",
    "substream",
    "summarize_groups",
    "true_beta",
]
