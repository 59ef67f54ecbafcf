"""The Hosmer-Lemeshow goodness-of-fit test.

Pearson-type statistic over G fitted-value groups,

    C = sum_g (O_g - E_g)^2 / (n_g * pibar_g * (1 - pibar_g)),

referred to a chi-squared distribution with G - 2 degrees of freedom.
The G - 2 rule is applied regardless of the number of model parameters,
exactly as the test is used in practice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import DegenerateTestError
from .grouping import Grouping, GroupSummary, summarize_groups
from .logistic import FittedModel
from .stats import chi2_sf

# Groups whose pibar*(1-pibar) falls below this make the statistic
# meaningless; they raise instead of silently continuing.
MIN_GROUP_DENOM = 1e-10


@dataclass(frozen=True)
class TestResult:
    """Outcome of a grouped goodness-of-fit test."""

    statistic: float
    df: int
    p_value: float
    method: str  # "hl" or "ghl"
    groups: GroupSummary
    G: int


def hl_statistic(summary: GroupSummary) -> float:
    """Evaluate the grouped Pearson sum from per-group summaries."""
    if np.any(summary.sizes < 1):
        raise DegenerateTestError("empty group in summary")
    denom_core = summary.pi_bar * (1.0 - summary.pi_bar)
    if np.any(denom_core < MIN_GROUP_DENOM):
        raise DegenerateTestError(
            "vanishing group denominator: a group mean fitted value is at 0 or 1"
        )
    resid = summary.observed - summary.expected
    return float(np.sum(resid**2 / (summary.sizes * denom_core)))


def hl_test(model: FittedModel, data: Dataset, grouping: Grouping) -> TestResult:
    """Run the test: statistic, G - 2 degrees of freedom, upper-tail p-value.

    The grouping must have been built from this model's fitted values.
    """
    if grouping.G <= 2:
        raise DegenerateTestError(f"need G > 2 groups, got {grouping.G}")
    summary = summarize_groups(grouping, data.y, model.fitted)
    statistic = hl_statistic(summary)
    df = grouping.G - 2
    return TestResult(
        statistic=statistic,
        df=df,
        p_value=chi2_sf(statistic, df),
        method="hl",
        groups=summary,
        G=grouping.G,
    )
