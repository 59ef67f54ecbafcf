"""Monte Carlo study of the null behavior of both grouped tests on data
with replicated or near-replicated covariate patterns.

Each scenario cell fixes (n, m, d, G, noise variance, reps, seed): m
unique covariate rows are drawn from a spherical normal, replicated n/m
times each (optionally perturbed by noise of marginal variance
sigma2_e), binary responses are drawn from a fixed true model, and both
tests are computed on a shared grouping of the fitted model.

Reproducibility contract: every realization derives its random streams
from (seed, realization index, purpose) through counter-based Philox
generators, so results are bit-identical regardless of execution order
or worker count.  Cells sharing a master seed also share realization
draws (common random numbers), which sharpens cross-cell comparisons
such as noise sweeps.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .dataset import make_dataset
from .errors import GofLabError, SimulationError
from .ghl import central_matrix, ghl_test
from .grouping import group_by_balanced_variance, group_by_quantiles
from .hl import hl_test
from .logistic import FitOptions, fit_logistic, inverse_logit
from .stats import McSummary, mc_summary

GROUPING_METHODS = ("quantile", "balanced")

_PURPOSES = {"covariates": 0, "responses": 1, "grouping": 2}

_TRUE_INTERCEPT = 0.1
_TRUE_SLOPE_NORM = 0.535


@dataclass(frozen=True)
class Scenario:
    """One simulation cell."""

    n: int
    m: int  # unique covariate rows; must divide n
    d: int  # parameters including intercept, >= 2
    G: int
    reps: int
    seed: int
    sigma2_e: float = 0.0  # per-replicate noise variance (0 = exact replicates)
    sigma2: float = 1.0  # marginal variance of the base covariate rows
    alpha: float = 0.05
    grouping_method: str = "balanced"

    def validate(self) -> "Scenario":
        if self.d < 2:
            raise SimulationError(f"need d >= 2, got d={self.d}")
        if self.m < 1 or self.n % self.m != 0:
            raise SimulationError(
                f"m must divide n for integer replicate counts, got n={self.n}, m={self.m}"
            )
        if self.m < self.G:
            raise SimulationError(f"need m >= G, got m={self.m}, G={self.G}")
        if self.sigma2_e < 0 or self.sigma2 <= 0:
            raise SimulationError("variances must be nonnegative (sigma2 positive)")
        if self.reps < 1:
            raise SimulationError(f"need reps >= 1, got {self.reps}")
        if not 0.0 < self.alpha < 1.0:
            raise SimulationError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.grouping_method not in GROUPING_METHODS:
            raise SimulationError(
                f"unknown grouping method {self.grouping_method!r}; "
                f"expected one of {GROUPING_METHODS}"
            )
        return self


@dataclass(frozen=True)
class SimSummary:
    """Monte Carlo estimates for one scenario cell."""

    scenario: Scenario
    hl: McSummary
    ghl: McSummary
    mean_sigma_diag: float  # average central-matrix diagonal across realizations
    failures: int
    failure_reasons: dict[str, int] = field(default_factory=dict)


def true_beta(d: int) -> np.ndarray:
    """Coefficients of the data-generating model: intercept 0.1 and d-1
    equal slopes scaled so the linear predictor variance stays fixed
    (each slope is 0.535/sqrt(d-1))."""
    if d < 2:
        raise ValueError(f"need d >= 2, got {d}")
    beta = np.full(d, _TRUE_SLOPE_NORM / np.sqrt(d - 1))
    beta[0] = _TRUE_INTERCEPT
    return beta


def substream(seed: int, realization: int, purpose: str) -> np.random.Generator:
    """Counter-based random stream keyed by (seed, realization, purpose).

    Streams are independent across keys and independent of the order in
    which they are created, which is what makes parallel execution
    reproducible.
    """
    code = _PURPOSES[purpose]
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence((seed, realization, code)))
    )


def gen_covariates(scenario: Scenario, rng: np.random.Generator) -> np.ndarray:
    """Draw the design matrix: m base rows from N(0, sigma2 * I), each
    repeated n/m times consecutively, plus optional N(0, sigma2_e * I)
    noise per replicate row; intercept column prepended."""
    n, m, d = scenario.n, scenario.m, scenario.d
    base = rng.normal(scale=np.sqrt(scenario.sigma2), size=(m, d - 1))
    rows = np.repeat(base, n // m, axis=0)
    if scenario.sigma2_e > 0:
        rows = rows + rng.normal(scale=np.sqrt(scenario.sigma2_e), size=(n, d - 1))
    return np.column_stack([np.ones(n), rows])


def gen_responses(
    X: np.ndarray, beta: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """Independent Bernoulli responses with success probability equal to
    the inverse logit of X @ beta.

    Uses the uniform-threshold construction, so responses at nearby
    probabilities stay coupled under common random numbers.
    """
    prob = inverse_logit(X @ np.asarray(beta, dtype=float))
    return (rng.random(X.shape[0]) < prob).astype(float)


@dataclass(frozen=True)
class _Realization:
    hl_stat: float
    hl_p: float
    ghl_stat: float
    ghl_p: float
    sigma_diag_mean: float


def _run_realization(
    scenario: Scenario, index: int, fit_opts: FitOptions
) -> _Realization | str:
    """One realization; returns a record or a failure-reason slug."""
    X = gen_covariates(scenario, substream(scenario.seed, index, "covariates"))
    y = gen_responses(X, true_beta(scenario.d), substream(scenario.seed, index, "responses"))
    data = make_dataset(y, X)
    try:
        model = fit_logistic(data, fit_opts)
        if scenario.grouping_method == "balanced":
            grouping = group_by_balanced_variance(
                model, scenario.G, substream(scenario.seed, index, "grouping")
            )
        else:
            grouping = group_by_quantiles(model, scenario.G)
        hl_result = hl_test(model, data, grouping)
        ghl_result = ghl_test(model, data, grouping)
        sigma = central_matrix(model, data, grouping).sigma
    except GofLabError as exc:
        return exc.reason
    return _Realization(
        hl_stat=hl_result.statistic,
        hl_p=hl_result.p_value,
        ghl_stat=ghl_result.statistic,
        ghl_p=ghl_result.p_value,
        sigma_diag_mean=float(np.mean(np.diag(sigma))),
    )


def run_scenario(scenario: Scenario) -> SimSummary:
    """Run all realizations of one cell and summarize both tests.

    Realizations whose fit or grouping degenerates are excluded and
    tallied by reason; they are never retried (a retry would bias the
    null distribution).
    """
    scenario.validate()
    fit_opts = FitOptions()
    records: list[_Realization] = []
    reasons: dict[str, int] = {}
    for index in range(scenario.reps):
        outcome = _run_realization(scenario, index, fit_opts)
        if isinstance(outcome, str):
            reasons[outcome] = reasons.get(outcome, 0) + 1
        else:
            records.append(outcome)
    if not records:
        raise SimulationError(
            f"all {scenario.reps} realizations failed for {scenario}: {reasons}"
        )
    hl_summary = mc_summary(
        np.array([r.hl_stat for r in records]),
        np.array([r.hl_p for r in records]),
        scenario.alpha,
    )
    ghl_summary = mc_summary(
        np.array([r.ghl_stat for r in records]),
        np.array([r.ghl_p for r in records]),
        scenario.alpha,
    )
    return SimSummary(
        scenario=scenario,
        hl=hl_summary,
        ghl=ghl_summary,
        mean_sigma_diag=float(np.mean([r.sigma_diag_mean for r in records])),
        failures=scenario.reps - len(records),
        failure_reasons=reasons,
    )


def run_grid(
    scenarios: Iterable[Scenario], workers: int = 1
) -> list[SimSummary]:
    """Run a list of cells, optionally across processes.

    Output order follows input order and is bit-identical for any worker
    count.  A failing cell does not abort its siblings; the first error
    is re-raised after every cell has finished.
    """
    cells = list(scenarios)
    if not cells:
        raise SimulationError("empty scenario list")
    results: list[SimSummary | None] = [None] * len(cells)
    errors: list[tuple[int, Exception]] = []
    if workers <= 1:
        for i, cell in enumerate(cells):
            try:
                results[i] = run_scenario(cell)
            except GofLabError as exc:
                errors.append((i, exc))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(run_scenario, cell): i for i, cell in enumerate(cells)}
            for future, i in futures.items():
                try:
                    results[i] = future.result()
                except GofLabError as exc:
                    errors.append((i, exc))
    if errors:
        index, first = sorted(errors, key=lambda e: e[0])[0]
        raise SimulationError(
            f"{len(errors)} of {len(cells)} cells failed; first at index {index}: {first}"
        ) from first
    return results  # type: ignore[return-value]
