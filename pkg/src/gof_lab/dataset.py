"""Binary-response regression data: loading, validation, and detection of
replicated explanatory-variable patterns (EVPs).

Replicate detection uses exact equality of covariate rows; near-replicates
are never merged.  Input files are delimited text with a header row; the
intercept column may be supplied in the file or prepended on load.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class Dataset:
    """Validated binary-response data with an explicit intercept column.

    ``y`` holds 0/1 responses (length n); ``X`` is the n x d design matrix
    whose column 0 is identically 1.
    """

    y: np.ndarray
    X: np.ndarray

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    def validate(self) -> "Dataset":
        """Check the structural invariants, raising DataError on violation."""
        if self.X.ndim != 2 or self.y.ndim != 1:
            raise DataError("X must be a matrix and y a vector")
        n, d = self.X.shape
        if self.y.shape[0] != n:
            raise DataError(f"y has length {self.y.shape[0]}, X has {n} rows")
        if d < 1 or n < d:
            raise DataError(f"need n >= d >= 1, got n={n}, d={d}")
        if not np.all(np.isfinite(self.X)):
            raise DataError("non-finite covariate value")
        if not np.all((self.y == 0.0) | (self.y == 1.0)):
            bad = self.y[(self.y != 0.0) & (self.y != 1.0)][0]
            raise DataError(f"non-binary response value {bad!r}")
        if not np.all(self.X[:, 0] == 1.0):
            raise DataError("column 0 of X must be identically 1 (intercept)")
        return self


def make_dataset(y: np.ndarray, X: np.ndarray) -> Dataset:
    """Build and validate a Dataset from raw arrays."""
    return Dataset(
        y=np.ascontiguousarray(y, dtype=float),
        X=np.ascontiguousarray(X, dtype=float),
    ).validate()


@dataclass(frozen=True)
class LoadOptions:
    """Column naming and delimiter configuration for load_dataset."""

    response_column: str = "y"
    delimiter: str = ","
    add_intercept: bool = True  # prepend a ones column; if False the file must carry it


@dataclass(frozen=True)
class EvpSummary:
    """Replication structure of the covariate rows.

    ``m`` counts distinct rows under exact equality; ``trials`` and
    ``successes`` give per-EVP Bernoulli trial and success counts (in the
    lexicographic order of the unique rows).
    """

    m: int
    replication_ratio: float
    trials: np.ndarray = field(repr=False)
    successes: np.ndarray = field(repr=False)


def load_dataset(path: str | Path, options: LoadOptions | None = None) -> Dataset:
    """Read a delimited text file into a validated Dataset.

    The file must have a header row naming the response column; covariate
    columns are taken in file order.  Row order is preserved exactly.

    Args:
        path: File to read.
        options: Column naming / delimiter / intercept configuration.

    Raises:
        DataError: missing file, missing response column, non-numeric cell,
            non-binary response, or n < d.  Messages name the offending
            1-based data row.
    """
    opts = options or LoadOptions()
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")

    with path.open(newline="") as fh:
        reader = csv.reader(fh, delimiter=opts.delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file, expected a header row") from None
        header = [h.strip() for h in header]
        if opts.response_column not in header:
            raise DataError(
                f"{path}: response column {opts.response_column!r} not in header {header}"
            )
        y_pos = header.index(opts.response_column)

        y_rows: list[float] = []
        x_rows: list[list[float]] = []
        for row_num, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(
                    f"{path}: row {row_num} has {len(row)} fields, header has {len(header)}"
                )
            vals = []
            for col, cell in zip(header, row):
                try:
                    vals.append(float(cell))
                except ValueError:
                    raise DataError(
                        f"{path}: row {row_num}: non-numeric value {cell.strip()!r} in column {col!r}"
                    ) from None
            yv = vals[y_pos]
            if yv not in (0.0, 1.0):
                raise DataError(
                    f"{path}: row {row_num}: non-binary response {row[y_pos].strip()!r}"
                )
            y_rows.append(yv)
            x_rows.append([v for i, v in enumerate(vals) if i != y_pos])

    if not y_rows:
        raise DataError(f"{path}: no data rows")
    y = np.array(y_rows, dtype=float)
    covs = np.array(x_rows, dtype=float)
    if opts.add_intercept:
        X = np.column_stack([np.ones(len(y)), covs])
    else:
        X = covs
        if X.shape[1] < 1 or not np.all(X[:, 0] == 1.0):
            raise DataError(
                f"{path}: add_intercept=False but the first covariate column is not all ones"
            )
    return make_dataset(y, X)


def save_dataset(data: Dataset, path: str | Path, delimiter: str = ",") -> None:
    """Write a Dataset as delimited text that load_dataset reads back
    bit-identically (floats serialized with shortest round-trip repr).

    The intercept column is omitted; load_dataset re-prepends it.
    """
    path = Path(path)
    ncov = data.d - 1
    header = ["y"] + [f"x{j}" for j in range(1, ncov + 1)]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, delimiter=delimiter)
        writer.writerow(header)
        for i in range(data.n):
            writer.writerow(
                [int(data.y[i])] + [repr(float(v)) for v in data.X[i, 1:]]
            )


def aggregate_evps(data: Dataset) -> EvpSummary:
    """Count distinct covariate rows and aggregate responses per EVP.

    Rows are compared by exact equality, so generated replicates collapse
    while near-replicates (noisy copies) do not.  Invariant under row
    permutation of the input.
    """
    _, inverse, counts = np.unique(
        data.X, axis=0, return_inverse=True, return_counts=True
    )
    successes = np.bincount(inverse.ravel(), weights=data.y, minlength=counts.size)
    m = int(counts.size)
    return EvpSummary(
        m=m,
        replication_ratio=data.n / m,
        trials=counts.astype(int),
        successes=successes,
    )
