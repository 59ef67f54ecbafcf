"""Exception taxonomy shared across the package.

Every exception carries a short ``reason`` slug used by the simulation
harness to tally excluded realizations, and by the CLI to map failures
onto exit codes (input errors exit 2, computational failures exit 1).
"""


class GofLabError(Exception):
    """Base class for all package errors."""

    reason = "error"


class DataError(GofLabError):
    """Invalid input data or file: unparseable, non-binary response, bad shape."""

    reason = "invalid_data"


class ConfigError(DataError):
    """Invalid simulation configuration file."""

    reason = "invalid_config"


class FitError(GofLabError):
    """Logistic regression fit failed."""

    reason = "fit_failure"


class RankDeficientError(FitError):
    """Design matrix is rank deficient (coefficients not identifiable)."""

    reason = "rank_deficient"


class SeparationError(FitError):
    """Complete or quasi-complete separation: the MLE does not exist
    (fitted probabilities pin to 0/1 while the score keeps shrinking)."""

    reason = "separation"


class NonConvergenceError(FitError):
    """Iteration budget exhausted without meeting the score tolerance."""

    reason = "no_convergence"


class DegenerateGroupingError(GofLabError):
    """Requested grouping cannot be formed (ties or too few distinct
    fitted values leave some group empty)."""

    reason = "degenerate_grouping"


class DegenerateTestError(GofLabError):
    """Test statistic is undefined: vanishing group denominator for the
    Pearson form, or a numerically zero central matrix for the
    generalized form."""

    reason = "degenerate_test"


class SimulationError(GofLabError):
    """A Monte Carlo cell could not produce a summary."""

    reason = "simulation_failure"
