"""The generalized Hosmer-Lemeshow test.

The grouped residual vector

    s_g = (1/sqrt(n)) * sum_i (y_i - pihat_i) * 1(obs i in group g)

is standardized by the Moore-Penrose pseudoinverse of a central matrix
that subtracts the generalized hat matrix from the raw group variances:

    Sigma = (1/n) * Gm W^(1/2) (I - W^(1/2) X (X'WX)^(-1) X' W^(1/2)) W^(1/2) Gm'

with W = diag(pihat_i (1 - pihat_i)) and Gm the G x n group indicator
matrix.  The statistic s' Sigma^+ s is referred to a chi-squared
distribution whose degrees of freedom are the numerical rank of Sigma
(typically G - 1 when the model has an intercept, since Sigma 1 = 0).

Because the groups partition the observations, Gm W Gm' is diagonal and
the whole matrix reduces to

    Sigma = (1/n) * (diag(W_g) - B (X'WX)^(-1) B'),   B = Gm W X,

which is evaluated with a Cholesky factorization of X'WX so symmetry is
preserved by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import DegenerateTestError, RankDeficientError
from .grouping import Grouping, summarize_groups
from .hl import TestResult
from .logistic import FittedModel
from .stats import chi2_sf

# Pseudoinverse tolerance: singular values below
# max(dim * eps * s_max, PINV_ABS_FLOOR) are treated as zero.
PINV_ABS_FLOOR = 1e-12
_SYMMETRY_TOL = 1e-8


@dataclass(frozen=True)
class CentralMatrix:
    """The central matrix of the generalized test with its numerical rank
    and Moore-Penrose pseudoinverse."""

    sigma: np.ndarray
    rank: int
    pinv: np.ndarray


def residual_vector(
    model: FittedModel, data: Dataset, grouping: Grouping
) -> np.ndarray:
    """Grouped residual sums scaled by 1/sqrt(n) (a length-G vector).

    Components sum to (1/sqrt(n)) * sum(y - pihat), which is zero at an
    MLE with an intercept.
    """
    n = data.n
    resid = data.y - model.fitted
    return np.bincount(
        grouping.assignment - 1, weights=resid, minlength=grouping.G
    ) / np.sqrt(n)


def central_matrix(
    model: FittedModel, data: Dataset, grouping: Grouping
) -> CentralMatrix:
    """Assemble Sigma via the hat-matrix form and pseudo-invert it.

    Raises:
        RankDeficientError: X'WX is singular.
    """
    X = data.X
    n = data.n
    G = grouping.G
    w = model.weights
    labels0 = grouping.assignment - 1

    group_weight = np.bincount(labels0, weights=w, minlength=G)
    B = np.zeros((G, X.shape[1]))
    np.add.at(B, labels0, X * w[:, None])
    xtwx = (X * w[:, None]).T @ X
    try:
        chol = np.linalg.cholesky(xtwx)
    except np.linalg.LinAlgError:
        raise RankDeficientError("X'WX is singular") from None
    half = np.linalg.solve(chol, B.T)  # chol @ half = B', so B M^-1 B' = half' half
    sigma = (np.diag(group_weight) - half.T @ half) / n
    sigma = 0.5 * (sigma + sigma.T)

    pinv, rank = pseudo_inverse(sigma)
    return CentralMatrix(sigma=sigma, rank=rank, pinv=pinv)


def pseudo_inverse(
    matrix: np.ndarray,
    rel_factor: float | None = None,
    abs_floor: float = PINV_ABS_FLOOR,
) -> tuple[np.ndarray, int]:
    """Moore-Penrose pseudoinverse and numerical rank of a symmetric matrix.

    Singular values are computed by SVD; those below
    max(rel_factor * s_max, abs_floor) count as zero.  rel_factor
    defaults to dim * machine epsilon.

    Args:
        matrix: Symmetric square matrix (asymmetry beyond 1e-8 rejected).
        rel_factor: Relative cutoff multiplier on the largest singular value.
        abs_floor: Absolute cutoff floor.

    Returns:
        (pseudoinverse, rank).
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.size and float(np.max(np.abs(a - a.T))) > _SYMMETRY_TOL:
        raise ValueError("matrix is not symmetric to 1e-8")
    dim = a.shape[0]
    if rel_factor is None:
        rel_factor = dim * np.finfo(float).eps

    u, s, vt = np.linalg.svd(a, hermitian=True)
    cutoff = max(rel_factor * (s[0] if s.size else 0.0), abs_floor)
    keep = s > cutoff
    rank = int(np.count_nonzero(keep))
    if rank == 0:
        return np.zeros_like(a), 0
    pinv = (vt[keep].T / s[keep]) @ u[:, keep].T
    return 0.5 * (pinv + pinv.T), rank


def ghl_test(model: FittedModel, data: Dataset, grouping: Grouping) -> TestResult:
    """Run the generalized test: statistic s' Sigma^+ s with df = rank(Sigma).

    When the rank falls below G - 1 the test proceeds with the smaller
    degrees of freedom; a numerically zero Sigma is an error.
    """
    s = residual_vector(model, data, grouping)
    cm = central_matrix(model, data, grouping)
    if cm.rank == 0:
        raise DegenerateTestError("central matrix is numerically zero")
    statistic = max(float(s @ cm.pinv @ s), 0.0)
    return TestResult(
        statistic=statistic,
        df=cm.rank,
        p_value=chi2_sf(statistic, cm.rank),
        method="ghl",
        groups=summarize_groups(grouping, data.y, model.fitted),
        G=grouping.G,
    )
