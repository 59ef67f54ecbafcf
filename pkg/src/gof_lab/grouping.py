"""Partition observations into groups by fitted value.

Two constructions are provided: the classical grouping at quantiles of
the fitted values ("deciles of risk" for G=10), and a variance-balanced
grouping that places random interval endpoints so the within-group sums
of fitted * (1 - fitted) come out roughly equal.

Groups are defined by interval endpoints on the linear-predictor scale,
-inf = k_0 < k_1 < ... < k_G = +inf, with observation i in group g iff
k_{g-1} < eta_i <= k_g.  Ties are broken by stably sorting on
(eta, original row index), which makes both constructions deterministic
given their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGroupingError
from .logistic import FittedModel


@dataclass(frozen=True)
class Grouping:
    """Interval endpoints and the per-observation group labels (1..G)."""

    endpoints: np.ndarray  # length G+1, endpoints[0] = -inf, endpoints[G] = +inf
    assignment: np.ndarray  # length n, labels in 1..G
    G: int


@dataclass(frozen=True)
class GroupSummary:
    """Per-group observed successes, expected successes, sizes, and mean
    fitted values (all length-G arrays)."""

    observed: np.ndarray
    expected: np.ndarray
    sizes: np.ndarray
    pi_bar: np.ndarray

    @property
    def G(self) -> int:
        return self.observed.size


def assign_groups(endpoints: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """Evaluate the interval indicators: label i with g iff
    endpoints[g-1] < eta_i <= endpoints[g]."""
    interior = np.asarray(endpoints, dtype=float)[1:-1]
    return np.searchsorted(interior, np.asarray(eta, dtype=float), side="left") + 1


def _finish_grouping(interior: np.ndarray, eta: np.ndarray, G: int) -> Grouping:
    """Assemble endpoints, derive assignments, and reject empty groups."""
    if np.any(np.diff(interior) <= 0):
        raise DegenerateGroupingError(
            "interval endpoints are not strictly increasing (tied fitted values)"
        )
    endpoints = np.concatenate([[-np.inf], interior, [np.inf]])
    assignment = assign_groups(endpoints, eta)
    sizes = np.bincount(assignment - 1, minlength=G)
    if np.any(sizes == 0):
        empty = int(np.nonzero(sizes == 0)[0][0]) + 1
        raise DegenerateGroupingError(f"group {empty} of {G} is empty")
    return Grouping(endpoints=endpoints, assignment=assignment, G=G)


def _sorted_by_eta(model: FittedModel) -> np.ndarray:
    """Stable sort order by (eta, original row index)."""
    n = model.eta.size
    return np.lexsort((np.arange(n), model.eta))


def _check_enough_distinct(model: FittedModel, G: int) -> None:
    if G < 2:
        raise DegenerateGroupingError(f"need G >= 2, got {G}")
    if np.unique(model.fitted).size < G:
        raise DegenerateGroupingError(
            f"fewer than G={G} distinct fitted values"
        )


def group_by_quantiles(model: FittedModel, G: int) -> Grouping:
    """Group at the logits of the j/G empirical quantiles of the fitted
    values, j = 1..G-1.

    The quantile is the right-continuous inverse CDF on the sorted fitted
    values, so each interior endpoint is the linear predictor of an
    observed point; group sizes differ only by tie multiplicity at the
    cut points.
    """
    _check_enough_distinct(model, G)
    n = model.eta.size
    order = _sorted_by_eta(model)
    eta_sorted = model.eta[order]
    # Right-continuous inverse CDF: Q(j/G) is the ceil(n*j/G)-th order
    # statistic.  Its logit equals the eta at that position, which keeps
    # the stored endpoint exactly consistent with the indicator.
    positions = np.array([-(-n * j // G) - 1 for j in range(1, G)])
    interior = eta_sorted[positions]
    return _finish_grouping(interior, model.eta, G)


def group_by_balanced_variance(
    model: FittedModel, G: int, rng: np.random.Generator
) -> Grouping:
    """Group with random interval endpoints placed so the within-group
    sums of fitted * (1 - fitted) are roughly equal.

    Observations are sorted by eta; the cumulative weight is cut at the
    targets g*W/G, and each interior endpoint is drawn uniformly between
    the eta values straddling its cut (collapsing to the common value
    when the straddling etas are tied, which glues replicate runs to the
    lower group).  Per-group weight is then within one maximal
    single-observation weight of W/G whenever the etas are tie-free.
    """
    _check_enough_distinct(model, G)
    n = model.eta.size
    order = _sorted_by_eta(model)
    eta_sorted = model.eta[order]
    w_sorted = model.weights[order]
    cumw = np.cumsum(w_sorted)
    total = cumw[-1]
    if not total > 0:
        raise DegenerateGroupingError("total variance weight is zero")

    targets = np.arange(1, G) * (total / G)
    cut = np.searchsorted(cumw, targets, side="left")
    if cut[-1] >= n - 1:
        raise DegenerateGroupingError("cumulative-weight cut leaves the top group empty")
    lo = eta_sorted[cut]
    hi = eta_sorted[cut + 1]
    u = rng.random(G - 1)
    interior = lo + u * (hi - lo)  # equals lo when the straddling etas tie
    return _finish_grouping(interior, model.eta, G)


def summarize_groups(
    grouping: Grouping, y: np.ndarray, fitted: np.ndarray
) -> GroupSummary:
    """Per-group sums: observed successes, expected successes (sum of
    fitted values), sizes, and mean fitted value."""
    y = np.asarray(y, dtype=float)
    fitted = np.asarray(fitted, dtype=float)
    labels = grouping.assignment
    if y.shape != labels.shape or fitted.shape != labels.shape:
        raise ValueError("y, fitted, and assignment lengths differ")
    G = grouping.G
    sizes = np.bincount(labels - 1, minlength=G)
    if np.any(sizes == 0):
        raise DegenerateGroupingError("grouping contains an empty group")
    observed = np.bincount(labels - 1, weights=y, minlength=G)
    expected = np.bincount(labels - 1, weights=fitted, minlength=G)
    return GroupSummary(
        observed=observed,
        expected=expected,
        sizes=sizes,
        pi_bar=expected / sizes,
    )
