"""Design/response container and CSV ingestion.

The regression data model is shared by the sampler, the selector and the
benchmark: an n x p design matrix, a length-n response and the cached
per-column squared norms that the selection rule divides by.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError

__all__ = [
    "RegressionData",
    "TruthSpec",
    "column_sq_norms",
    "load_csv",
    "save_csv",
]

# 17 significant digits round-trips IEEE float64 exactly.
CSV_FLOAT_FMT = "%.17g"


@dataclass(frozen=True)
class RegressionData:
    """Immutable regression problem: design, response, cached column norms.

    Construct through :meth:`from_arrays` or :func:`load_csv`, which validate
    shapes, finiteness and reject all-zero columns; the bare dataclass
    constructor performs no checks (used for synthetic edge cases).
    """

    X: np.ndarray
    y: np.ndarray
    col_sq_norms: np.ndarray
    n: int
    p: int
    standardized: bool = False

    @classmethod
    def from_arrays(cls, X, y, standardize: bool = False) -> "RegressionData":
        X = np.array(X, dtype=float, copy=True)
        y = np.array(y, dtype=float, copy=True).reshape(-1)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise DataError(f"design must be a non-empty 2-D matrix, got shape {X.shape}")
        n, p = X.shape
        if y.shape[0] != n:
            raise DataError(
                f"dimension mismatch: design has {n} rows but response has {y.shape[0]} entries"
            )
        _require_finite(X, "design")
        _require_finite(y, "response")
        if standardize:
            # Mean-center only; column scaling is left alone so that the
            # squared norms entering the selection threshold keep their meaning.
            X -= X.mean(axis=0)
            y -= y.mean()
        norms = column_sq_norms(X)
        zero = np.flatnonzero(norms <= 0.0)
        if zero.size:
            raise DataError(f"column {zero[0]} of the design is all zeros")
        for arr in (X, y, norms):
            arr.flags.writeable = False
        return cls(X=X, y=y, col_sq_norms=norms, n=n, p=p, standardized=standardize)


@dataclass(frozen=True)
class TruthSpec:
    """Ground-truth coefficient vector with its support set."""

    beta0: np.ndarray
    support: frozenset
    s0: int

    @classmethod
    def from_beta(cls, beta0) -> "TruthSpec":
        beta0 = np.array(beta0, dtype=float, copy=True)
        beta0.flags.writeable = False
        support = frozenset(int(j) for j in np.flatnonzero(beta0))
        return cls(beta0=beta0, support=support, s0=len(support))


def column_sq_norms(X) -> np.ndarray:
    """Per-column sums of squares of a matrix."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.size == 0:
        raise DataError(f"expected a non-empty 2-D matrix, got shape {X.shape}")
    return np.einsum("ij,ij->j", X, X)


def load_csv(path_X, path_y, standardize: bool = False) -> RegressionData:
    """Load a regression problem from two CSV files.

    Both files are comma-delimited UTF-8 with an optional header row;
    dimensions are inferred from the file shapes.  ``standardize`` mean-centers
    y and every column of X (no rescaling); the flag's state is recorded on
    the returned object.
    """
    X = _read_csv_matrix(path_X)
    y = _read_csv_matrix(path_y)
    if y.shape[1] != 1:
        raise DataError(f"{path_y}: response file must have one column, found {y.shape[1]}")
    return RegressionData.from_arrays(X, y[:, 0], standardize=standardize)


def save_csv(data: RegressionData, path_X, path_y) -> None:
    """Write the design and response back to CSV (17 significant digits)."""
    x_header = ",".join(f"x_{j}" for j in range(data.p))
    np.savetxt(path_X, data.X, fmt=CSV_FLOAT_FMT, delimiter=",", header=x_header, comments="")
    np.savetxt(path_y, data.y, fmt=CSV_FLOAT_FMT, delimiter=",", header="y", comments="")


def _require_finite(arr: np.ndarray, name: str) -> None:
    if not np.isfinite(arr).all():
        bad = np.argwhere(~np.isfinite(arr))[0]
        where = ", ".join(str(int(i)) for i in bad)
        raise DataError(f"{name} contains a non-finite value at position ({where})")


def _read_csv_matrix(path) -> np.ndarray:
    """Parse a numeric CSV into a 2-D array, locating any bad cell."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh]
    rows = [ln.split(",") for ln in lines if ln]
    if not rows:
        raise DataError(f"{path}: file is empty")
    start = 0
    if not _all_numeric(rows[0]):
        start = 1  # header row
    if start == len(rows):
        raise DataError(f"{path}: no numeric rows after the header")
    width = len(rows[start])
    for i, row in enumerate(rows[start:], start=start):
        if len(row) != width:
            raise DataError(
                f"{path}: row {i + 1} has {len(row)} cells, expected {width}"
            )
        for j, cell in enumerate(row):
            try:
                float(cell)
            except ValueError:
                raise DataError(
                    f"{path}: non-numeric cell at row {i + 1}, column {j + 1}: {cell!r}"
                ) from None
    return np.array([[float(c) for c in row] for row in rows[start:]], dtype=float)


def _all_numeric(cells) -> bool:
    try:
        for c in cells:
            float(c)
    except ValueError:
        return False
    return True
