"""Confusion-matrix bookkeeping for support recovery."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .data import TruthSpec
from .errors import DataError

__all__ = ["SelectionMetrics", "AggregateMetrics", "classify", "from_counts", "aggregate"]


@dataclass(frozen=True)
class SelectionMetrics:
    tp: int
    tn: int
    fp: int
    fn: int
    mcc: float
    tpr: float
    tnr: float
    exact_model: bool

    @property
    def p(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


@dataclass(frozen=True)
class AggregateMetrics:
    count: int
    mcc_mean: float
    mcc_sd: float
    tpr_mean: float
    tpr_sd: float
    tnr_mean: float
    tnr_sd: float
    prop: float


def from_counts(tp: int, tn: int, fp: int, fn: int) -> SelectionMetrics:
    """Build the metrics record from raw confusion counts.

    Degenerate cases: MCC is 0 when any denominator factor is 0; TPR is 1
    when there are no true signals and TNR is 1 when there are no true nulls
    (vacuous truth keeps aggregation total).
    """
    if min(tp, tn, fp, fn) < 0:
        raise DataError("confusion counts must be non-negative")
    num = float(tp) * tn - float(fp) * fn
    den = float(tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    mcc = 0.0 if den == 0.0 else num / math.sqrt(den)
    tpr = 1.0 if tp + fn == 0 else tp / (tp + fn)
    tnr = 1.0 if tn + fp == 0 else tn / (tn + fp)
    return SelectionMetrics(
        tp=tp, tn=tn, fp=fp, fn=fn, mcc=mcc, tpr=tpr, tnr=tnr,
        exact_model=(fp == 0 and fn == 0),
    )


def classify(estimate, truth: TruthSpec) -> SelectionMetrics:
    """Score an estimated support against the true one.

    ``estimate`` is anything exposing ``beta_star`` and ``support`` (the
    selector's output) or a bare set of selected indices paired with the
    truth's dimension.
    """
    selected = frozenset(estimate.support)
    p = len(np.asarray(estimate.beta_star))
    if p != len(truth.beta0):
        raise DataError(
            f"length mismatch: estimate has p={p} but truth has p={len(truth.beta0)}"
        )
    true_support = truth.support
    tp = len(selected & true_support)
    fp = len(selected - true_support)
    fn = len(true_support - selected)
    tn = p - tp - fp - fn
    return from_counts(tp=tp, tn=tn, fp=fp, fn=fn)


def aggregate(metrics_list: Sequence[SelectionMetrics] | Iterable[SelectionMetrics]) -> AggregateMetrics:
    """Mean and sample sd (divisor n-1) of MCC/TPR/TNR plus the exact-model rate."""
    records = list(metrics_list)
    if not records:
        raise DataError("cannot aggregate an empty metrics list")
    mcc = np.array([m.mcc for m in records], dtype=float)
    tpr = np.array([m.tpr for m in records], dtype=float)
    tnr = np.array([m.tnr for m in records], dtype=float)
    exact = np.array([m.exact_model for m in records], dtype=float)

    def sd(v: np.ndarray) -> float:
        return 0.0 if v.size < 2 else float(np.std(v, ddof=1))

    return AggregateMetrics(
        count=len(records),
        mcc_mean=float(mcc.mean()), mcc_sd=sd(mcc),
        tpr_mean=float(tpr.mean()), tpr_sd=sd(tpr),
        tnr_mean=float(tnr.mean()), tnr_sd=sd(tnr),
        prop=float(exact.mean()),
    )
