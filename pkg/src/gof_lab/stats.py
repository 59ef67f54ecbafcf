"""Chi-squared tail probabilities and Monte Carlo estimator summaries.

The survival function is computed through the regularized upper
incomplete gamma function Q(df/2, x/2), using the power series for
x/2 < df/2 + 1 and the continued fraction otherwise.  Both routes are
kept as separate functions so they can be cross-checked on their
common domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_EPS = 1e-15
_MAX_ITER = 1000


def _gamma_q_series(a: float, x: float) -> float:
    """Q(a, x) = 1 - P(a, x) with P evaluated by its power series.

    Converges for all x >= 0; fastest for x < a + 1.
    """
    if x == 0.0:
        return 1.0
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    p = total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    return 1.0 - p


def _gamma_q_contfrac(a: float, x: float) -> float:
    """Q(a, x) by the Legendre continued fraction (modified Lentz).

    Accurate for x > a + 1; diverges slowly below that.
    """
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def chi2_sf(x: float, df: int) -> float:
    """Upper-tail probability of the chi-squared distribution.

    Args:
        x: Point at which to evaluate the survival function, x >= 0.
        df: Degrees of freedom, integer >= 1.

    Returns:
        P(X > x) for X ~ chi-squared with ``df`` degrees of freedom.
    """
    if not math.isfinite(x) or x < 0:
        raise ValueError(f"x must be finite and nonnegative, got {x!r}")
    if df < 1 or int(df) != df:
        raise ValueError(f"df must be a positive integer, got {df!r}")
    a = 0.5 * df
    half_x = 0.5 * x
    if half_x == 0.0:
        return 1.0
    if half_x < a + 1.0:
        return min(1.0, max(0.0, _gamma_q_series(a, half_x)))
    return min(1.0, max(0.0, _gamma_q_contfrac(a, half_x)))


@dataclass(frozen=True)
class McSummary:
    """Summary of one Monte Carlo sample of test statistics and p-values.

    Confidence intervals are 95% normal-approximation (Wald) intervals:
    mean +- 1.96 * sd / sqrt(N) and phat +- 1.96 * sqrt(phat(1-phat)/N).
    """

    mean: float
    variance: float  # sample variance, divisor N-1
    rejection_rate: float  # fraction of p-values below alpha
    reps: int
    mean_ci: tuple[float, float]
    rejection_ci: tuple[float, float]
    alpha: float


def mc_summary(
    statistics: np.ndarray, p_values: np.ndarray, alpha: float = 0.05
) -> McSummary:
    """Summarize a Monte Carlo sample: mean, variance, rejection rate, CIs.

    Args:
        statistics: Realized test statistics, length N >= 2.
        p_values: Matching p-values, same length.
        alpha: Nominal test level for the rejection count.

    Returns:
        McSummary with point estimates and 95% Wald intervals.
    """
    stats = np.asarray(statistics, dtype=float)
    pvals = np.asarray(p_values, dtype=float)
    if stats.ndim != 1 or pvals.shape != stats.shape:
        raise ValueError("statistics and p_values must be equal-length vectors")
    n = stats.size
    if n < 2:
        raise ValueError(f"need at least 2 realizations, got {n}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha!r}")

    mean = float(np.mean(stats))
    variance = float(np.var(stats, ddof=1))
    half_mean = 1.96 * math.sqrt(variance / n)

    rejections = int(np.count_nonzero(pvals < alpha))
    phat = rejections / n
    half_rej = 1.96 * math.sqrt(phat * (1.0 - phat) / n)

    return McSummary(
        mean=mean,
        variance=variance,
        rejection_rate=phat,
        reps=n,
        mean_ci=(mean - half_mean, mean + half_mean),
        rejection_ci=(phat - half_rej, phat + half_rej),
        alpha=alpha,
    )
