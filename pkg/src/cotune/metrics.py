"""Performance, group fairness, and intersectional fairness metrics.

Fairness values are reported as magnitudes (all >= 0). For the averaged-odds
gap the two signed rate differences are summed first and the magnitude taken
afterwards, so opposite-signed TPR/FPR gaps can cancel:

    aod = 0.5 * |(FPR0 - FPR1) + (TPR0 - TPR1)|

Intersectional variants are worst-case spreads over the subgroups formed by
crossing several sensitive attributes (max - min of the subgroup rate), which
for exactly two subgroups collapse to the single-attribute magnitudes.

0/0 rate conventions: precision/recall/F1 return 0 when undefined, and MCC
returns 0 when its denominator vanishes, so aggregates never see NaN. Group
conditioning cells, by contrast, must be nonempty; an empty cell raises
GroupSupportError rather than silently contributing a zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GroupSupportError, ShapeError, SchemaError
from .tabular import Dataset


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class MetricsBundle:
    precision: float
    recall: float
    accuracy: float
    f1: float
    mcc: float
    spd: float
    aod: float
    eod: float
    tpr_unprivileged: float
    tpr_privileged: float
    ispd: float | None = None
    iaod: float | None = None
    ieod: float | None = None

    def as_dict(self) -> dict:
        out = {
            "precision": self.precision,
            "recall": self.recall,
            "accuracy": self.accuracy,
            "f1": self.f1,
            "mcc": self.mcc,
            "spd": self.spd,
            "aod": self.aod,
            "eod": self.eod,
            "tpr_unprivileged": self.tpr_unprivileged,
            "tpr_privileged": self.tpr_privileged,
        }
        if self.ispd is not None:
            out.update({"ispd": self.ispd, "iaod": self.iaod, "ieod": self.ieod})
        return out


def _as_binary(v, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=np.int64)
    if arr.ndim != 1:
        raise ShapeError(f"{name} must be a 1-D vector")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ShapeError(f"{name} must contain only 0/1 values")
    return arr


def confusion(y_true, y_pred) -> ConfusionCounts:
    yt = _as_binary(y_true, "y_true")
    yp = _as_binary(y_pred, "y_pred")
    if yt.shape != yp.shape:
        raise ShapeError(f"length mismatch: {yt.shape[0]} true vs {yp.shape[0]} predicted")
    if yt.size < 1:
        raise ShapeError("need at least one instance")
    tp = int(((yt == 1) & (yp == 1)).sum())
    fp = int(((yt == 0) & (yp == 1)).sum())
    tn = int(((yt == 0) & (yp == 0)).sum())
    fn = int(((yt == 1) & (yp == 0)).sum())
    return ConfusionCounts(tp, fp, tn, fn)


def _ratio(num: float, den: float) -> float:
    return num / den if den != 0 else 0.0


def performance(y_true, y_pred) -> dict:
    c = confusion(y_true, y_pred)
    precision = _ratio(c.tp, c.tp + c.fp)
    recall = _ratio(c.tp, c.tp + c.fn)
    accuracy = (c.tp + c.tn) / c.total
    f1 = _ratio(2.0 * precision * recall, precision + recall)
    mcc_den = (c.tp + c.fp) * (c.tp + c.fn) * (c.tn + c.fp) * (c.tn + c.fn)
    mcc = _ratio(c.tp * c.tn - c.fp * c.fn, math.sqrt(float(mcc_den)))
    return {
        "precision": precision,
        "recall": recall,
        "accuracy": accuracy,
        "f1": f1,
        "mcc": mcc,
    }


def _cell_rate(y_pred: np.ndarray, mask: np.ndarray, cell: str) -> float:
    if not mask.any():
        raise GroupSupportError(f"empty conditioning cell: {cell}")
    return float(y_pred[mask].mean())


def group_fairness(y_true, y_pred, a) -> dict:
    """Statistical-parity, averaged-odds, and equal-opportunity gaps plus the
    per-group true positive rates, for one binary attribute (1 = privileged)."""
    yt = _as_binary(y_true, "y_true")
    yp = _as_binary(y_pred, "y_pred")
    av = _as_binary(a, "a")
    if not (yt.shape == yp.shape == av.shape):
        raise ShapeError("y_true, y_pred, and a must have identical length")

    rate0 = _cell_rate(yp, av == 0, "a=0")
    rate1 = _cell_rate(yp, av == 1, "a=1")
    tpr0 = _cell_rate(yp, (av == 0) & (yt == 1), "a=0,y=1")
    tpr1 = _cell_rate(yp, (av == 1) & (yt == 1), "a=1,y=1")
    fpr0 = _cell_rate(yp, (av == 0) & (yt == 0), "a=0,y=0")
    fpr1 = _cell_rate(yp, (av == 1) & (yt == 0), "a=1,y=0")

    return {
        "spd": abs(rate0 - rate1),
        "aod": 0.5 * abs((fpr0 - fpr1) + (tpr0 - tpr1)),
        "eod": abs(tpr0 - tpr1),
        "tpr_unprivileged": tpr0,
        "tpr_privileged": tpr1,
    }


def subgroups(d: Dataset, attrs: list[str]) -> np.ndarray:
    """Integer subgroup id per row: attribute-value tuple read as a binary
    number, first listed attribute as the high bit."""
    if not attrs:
        raise SchemaError("attrs must be nonempty")
    for attr in attrs:
        if attr not in d.sensitive:
            raise SchemaError(f"unknown sensitive attribute {attr!r}")
    ids = np.zeros(d.n_rows, dtype=np.int64)
    for attr in attrs:
        ids = ids * 2 + d.sensitive[attr]
    return ids


def intersectional_fairness(y_true, y_pred, subgroup_ids) -> dict:
    """Worst-case favorable-rate, odds, and opportunity spreads over subgroups."""
    yt = _as_binary(y_true, "y_true")
    yp = _as_binary(y_pred, "y_pred")
    sg = np.asarray(subgroup_ids, dtype=np.int64)
    if not (yt.shape == yp.shape == sg.shape):
        raise ShapeError("y_true, y_pred, and subgroup_ids must have identical length")
    distinct = np.unique(sg)
    if distinct.size < 2:
        raise GroupSupportError("need at least two distinct subgroups")

    rates, tprs, fprs = [], [], []
    for s in distinct:
        mask = sg == s
        rates.append(_cell_rate(yp, mask, f"subgroup {s}"))
        tprs.append(_cell_rate(yp, mask & (yt == 1), f"subgroup {s},y=1"))
        fprs.append(_cell_rate(yp, mask & (yt == 0), f"subgroup {s},y=0"))

    odds = [f + t for f, t in zip(fprs, tprs)]
    return {
        "ispd": max(rates) - min(rates),
        "iaod": 0.5 * (max(odds) - min(odds)),
        "ieod": max(tprs) - min(tprs),
    }


def evaluate(test: Dataset, y_pred, attrs: list[str]) -> MetricsBundle:
    """Full bundle on one evaluation set: performance plus fairness for the
    first listed attribute, and intersectional spreads when >= 2 attributes."""
    perf = performance(test.labels, y_pred)
    fair = group_fairness(test.labels, y_pred, test.sensitive[_check_attr(test, attrs)])
    inter = {}
    if len(attrs) >= 2:
        inter = intersectional_fairness(test.labels, y_pred, subgroups(test, attrs))
    return MetricsBundle(**perf, **fair, **inter)


def _check_attr(d: Dataset, attrs: list[str]) -> str:
    if not attrs:
        raise SchemaError("attrs must be nonempty")
    for attr in attrs:
        if attr not in d.sensitive:
            raise SchemaError(f"unknown sensitive attribute {attr!r}")
    return attrs[0]
