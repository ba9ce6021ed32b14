"""Signal-adaptive variable selection by penalized soft thresholding.

The selector turns a dense point estimate (typically a posterior mean under
a shrinkage prior) into an exactly sparse vector: each coordinate is kept
only when the evidence ``|b_j| * ||X_j||^2`` beats its own penalty
``1/|b_j|^kappa``, so weakly-shrunk signals survive while near-zero noise
coordinates are removed.  No tuning parameter is required; ``kappa=2`` is
the default penalty exponent.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError

__all__ = ["SparseEstimate", "savs", "savs_inclusion_frequency", "adaptive_penalties"]


@dataclass(frozen=True)
class SparseEstimate:
    """Sparsified coefficient vector with its selected support."""

    beta_star: np.ndarray
    support: frozenset
    kappa: float
    mu: np.ndarray


def adaptive_penalties(beta_hat, kappa: float = 2.0) -> np.ndarray:
    """Per-variable penalties ``1/|b_j|^kappa`` (+inf where b_j == 0)."""
    abs_b = np.abs(np.asarray(beta_hat, dtype=float))
    with np.errstate(divide="ignore", over="ignore"):
        return abs_b ** (-float(kappa))


def savs(beta_hat, col_sq_norms, kappa: float = 2.0) -> SparseEstimate:
    """Sparsify a point estimate.

    For each coordinate with penalty ``mu_j = 1/|b_j|^kappa``:

    * 0 when ``|b_j| * ||X_j||^2 <= mu_j`` (ties zero out), and
    * ``sign(b_j) * (|b_j| * ||X_j||^2 - mu_j) / ||X_j||^2`` otherwise.

    A coordinate that is exactly zero on input stays zero (the infinite
    penalty limit).  Magnitudes are capped at ``|b_j|`` so the rule never
    inflates a coefficient, even under floating-point rounding.
    """
    b = np.asarray(beta_hat, dtype=float)
    cn = np.asarray(col_sq_norms, dtype=float)
    if b.ndim != 1 or cn.ndim != 1 or b.shape[0] != cn.shape[0]:
        raise DataError(
            f"length mismatch: estimate has {b.shape} entries, norms have {cn.shape}"
        )
    if not np.isfinite(b).all():
        raise DataError("point estimate contains non-finite entries")
    if not np.isfinite(cn).all() or np.any(cn <= 0.0):
        raise DataError("column squared norms must be positive and finite")
    if not kappa > 0:
        raise DataError(f"kappa must be positive, got {kappa}")

    abs_b = np.abs(b)
    mu = adaptive_penalties(b, kappa)
    keep = abs_b * cn > mu
    with np.errstate(invalid="ignore"):  # inf - inf on the b == 0 coordinates
        mag = np.minimum((abs_b * cn - mu) / cn, abs_b)
        beta_star = np.where(keep, np.sign(b) * mag, 0.0)
    support = frozenset(int(j) for j in np.flatnonzero(beta_star))
    return SparseEstimate(beta_star=beta_star, support=support, kappa=float(kappa), mu=mu)


def savs_inclusion_frequency(draws, col_sq_norms, kappa: float = 2.0) -> np.ndarray:
    """Fraction of draws in which each variable is selected.

    Applies :func:`savs` to every row of ``draws`` (retained posterior
    iterates), giving a per-variable selection frequency in [0, 1] that
    characterizes selection uncertainty beyond the single point estimate.
    """
    draws = np.asarray(draws, dtype=float)
    if draws.ndim != 2 or draws.shape[0] == 0:
        raise DataError(f"draws must be a non-empty 2-D matrix, got shape {draws.shape}")
    cn = np.asarray(col_sq_norms, dtype=float)
    if draws.shape[1] != cn.shape[0]:
        raise DataError(
            f"width mismatch: draws have {draws.shape[1]} columns, norms have {cn.shape[0]}"
        )
    counts = np.zeros(draws.shape[1], dtype=float)
    for row in draws:
        counts += savs(row, cn, kappa).beta_star != 0.0
    return counts / draws.shape[0]
