"""Maximum-likelihood fitting of the binary logistic regression model.

Newton iterations (equivalently, iteratively reweighted least squares)
with step-halving, declared converged when the score vector X'(y - p)
drops below tolerance in the infinity norm.  Separation is diagnosed and
reported distinctly from plain iteration exhaustion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import NonConvergenceError, RankDeficientError, SeparationError

# Linear predictors this large pin fitted values to 0/1 in double
# precision; a "converged" or stalled fit with such values has no finite
# MLE and is treated as separated.
_ETA_PINNED = 30.0
_ETA_CLAMP = 700.0


@dataclass(frozen=True)
class FitOptions:
    """Convergence controls for fit_logistic."""

    score_tol: float = 1e-8  # infinity norm of X'(y - p)
    max_iter: int = 100
    max_halvings: int = 20


@dataclass(frozen=True)
class FittedModel:
    """A fitted logistic regression.

    ``fitted`` is the inverse logit of ``eta = X @ beta``; ``weights``
    holds the variance terms fitted * (1 - fitted) used by the grouped
    tests.
    """

    beta: np.ndarray
    fitted: np.ndarray
    eta: np.ndarray
    weights: np.ndarray
    converged: bool
    iterations: int


def inverse_logit(eta: np.ndarray) -> np.ndarray:
    """Numerically stable elementwise logistic function.

    Evaluates exp(t)/(1+exp(t)) without overflow; linear predictors are
    clamped at +-700 (beyond which the result saturates at 0/1 anyway).
    """
    t = np.clip(np.asarray(eta, dtype=float), -_ETA_CLAMP, _ETA_CLAMP)
    out = np.empty_like(t)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    ez = np.exp(t[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def predict_prob(beta: np.ndarray, x: np.ndarray) -> float:
    """Success probability at covariate vector x under coefficients beta."""
    beta = np.asarray(beta, dtype=float)
    x = np.asarray(x, dtype=float)
    if not (np.all(np.isfinite(beta)) and np.all(np.isfinite(x))):
        raise ValueError("predict_prob requires finite inputs")
    return float(inverse_logit(np.array([beta @ x]))[0])


def log_likelihood(y: np.ndarray, eta: np.ndarray) -> float:
    """Bernoulli log-likelihood sum(y*eta - log(1 + exp(eta))), stably."""
    return float(np.sum(y * eta - np.logaddexp(0.0, eta)))


def fit_logistic(data: Dataset, opts: FitOptions | None = None) -> FittedModel:
    """Fit the logistic model by Newton/IRLS with step-halving.

    Args:
        data: Validated dataset; X must have full column rank.
        opts: Convergence controls.

    Returns:
        FittedModel with converged=True and score norm below tolerance.

    Raises:
        RankDeficientError: X'WX is singular at the first iteration.
        SeparationError: fitted values pin to 0/1 (no finite MLE).
        NonConvergenceError: iteration budget exhausted or the step
            search stalled without pinned fits.
    """
    opts = opts or FitOptions()
    X = data.X
    y = data.y
    n, d = X.shape

    beta = np.zeros(d)
    eta = X @ beta
    p = inverse_logit(eta)
    ll = log_likelihood(y, eta)
    prev_score_norm = np.inf

    for iteration in range(opts.max_iter):
        score = X.T @ (y - p)
        score_norm = float(np.max(np.abs(score)))
        pinned = float(np.max(np.abs(eta))) > _ETA_PINNED

        if score_norm <= opts.score_tol:
            if pinned:
                raise SeparationError(
                    "score tolerance met with fitted values pinned to 0/1"
                )
            return FittedModel(
                beta=beta,
                fitted=p,
                eta=eta,
                weights=p * (1.0 - p),
                converged=True,
                iterations=iteration,
            )
        if pinned and score_norm >= prev_score_norm:
            raise SeparationError(
                "linear predictors diverging without score improvement"
            )

        w = p * (1.0 - p)
        hessian = (X * w[:, None]).T @ X
        try:
            chol = np.linalg.cholesky(hessian)
        except np.linalg.LinAlgError:
            if iteration == 0:
                raise RankDeficientError(
                    "design matrix is rank deficient"
                ) from None
            raise SeparationError(
                "weight matrix collapsed (fitted values at 0/1)"
            ) from None
        if iteration == 0:
            # With the uniform start weights, a near-zero Cholesky pivot
            # means X itself is (numerically) rank deficient even when
            # rounding kept the factorization from failing outright.
            pivots = np.diag(chol)
            if float(np.min(pivots)) <= 1e-7 * float(np.max(pivots)):
                raise RankDeficientError("design matrix is rank deficient")
        delta = np.linalg.solve(chol.T, np.linalg.solve(chol, score))

        # Step-halve until the log-likelihood does not decrease (beyond
        # float noise: near the optimum the true improvement can be
        # smaller than the rounding error of the likelihood itself).
        ll_slack = 1e-10 * (1.0 + abs(ll))
        step = 1.0
        accepted = False
        for _ in range(opts.max_halvings + 1):
            beta_new = beta + step * delta
            eta_new = X @ beta_new
            ll_new = log_likelihood(y, eta_new)
            if ll_new >= ll - ll_slack:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            if pinned:
                raise SeparationError("step search stalled at pinned fit")
            raise NonConvergenceError("step-halving failed to improve likelihood")

        beta, eta, ll = beta_new, eta_new, ll_new
        p = inverse_logit(eta)
        prev_score_norm = score_norm

    if float(np.max(np.abs(eta))) > _ETA_PINNED:
        raise SeparationError("iteration budget exhausted with pinned fits")
    raise NonConvergenceError(
        f"no convergence in {opts.max_iter} iterations "
        f"(score norm {float(np.max(np.abs(X.T @ (y - p)))):.3e})"
    )
