"""Fairness-performance trade-off baseline and five-region classification.

The baseline is a pseudo-mitigation curve: starting from a model's real
predictions, a growing fraction of entries is replaced by the majority class
of the ground truth, and the (fairness, performance) pair of each mutated
prediction vector is recorded (averaged over seeded repeats). A mitigation
method is then placed relative to the unmitigated origin and this curve:

    win_win   fairness improved and performance improved
    inverted  performance improved, fairness not improved
    lose_lose neither strictly improved
    good      fairness improved, performance not improved, but still at or
              above the baseline curve at the same fairness level
    poor      fairness improved, performance below the baseline curve

"Improved" fairness means a strictly smaller bias magnitude. A candidate
exactly on the interpolated curve counts as good; the five labels partition
the plane.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ShapeError
from .metrics import group_fairness, performance


FAIRNESS_METRICS = ("spd", "aod", "eod")
PERFORMANCE_METRICS = ("accuracy", "precision", "recall", "f1", "mcc")
DEFAULT_RATES = tuple(round(0.1 * i, 1) for i in range(1, 11))
DEFAULT_REPEATS = 10


class TradeoffRegion(enum.Enum):
    WIN_WIN = "win_win"
    GOOD = "good"
    POOR = "poor"
    INVERTED = "inverted"
    LOSE_LOSE = "lose_lose"


@dataclass(frozen=True)
class BaselinePoint:
    mutation_rate: float
    fairness: float
    performance: float


@dataclass(frozen=True)
class BaselineCurve:
    points: tuple[BaselinePoint, ...]   # sorted by mutation_rate, rate 0 first
    fairness_metric: str
    performance_metric: str

    @property
    def origin(self) -> BaselinePoint:
        return self.points[0]


def _metric_pair(y_true, y_pred, a, fairness_metric: str, performance_metric: str) -> tuple[float, float]:
    fair = group_fairness(y_true, y_pred, a)[fairness_metric]
    perf = performance(y_true, y_pred)[performance_metric]
    return fair, perf


def build_baseline(
    y_true,
    y_pred_original,
    a,
    fairness_metric: str = "aod",
    performance_metric: str = "accuracy",
    rates: tuple[float, ...] = DEFAULT_RATES,
    repeats: int = DEFAULT_REPEATS,
    seed: int = 0,
) -> BaselineCurve:
    """Mutate floor(rate*n) seeded-uniform entries toward the majority class
    of y_true, per rate and repeat; average the metric pairs over repeats."""
    if fairness_metric not in FAIRNESS_METRICS:
        raise ConfigError(f"fairness_metric must be one of {FAIRNESS_METRICS}")
    if performance_metric not in PERFORMANCE_METRICS:
        raise ConfigError(f"performance_metric must be one of {PERFORMANCE_METRICS}")
    if repeats < 1:
        raise ConfigError("repeats must be >= 1")
    if any(not 0.0 < r <= 1.0 for r in rates):
        raise ConfigError("mutation rates must lie in (0,1]")
    yt = np.asarray(y_true, dtype=np.int64)
    yp = np.asarray(y_pred_original, dtype=np.int64)
    av = np.asarray(a, dtype=np.int64)
    if not (yt.shape == yp.shape == av.shape):
        raise ShapeError("y_true, y_pred_original, and a must have identical length")
    n = yt.shape[0]
    majority = 1 if int(yt.sum()) * 2 >= n else 0

    rng = np.random.default_rng(seed)
    points = [BaselinePoint(0.0, *_metric_pair(yt, yp, av, fairness_metric, performance_metric))]
    for rate in sorted(rates):
        fair_sum = 0.0
        perf_sum = 0.0
        for _ in range(repeats):
            mutated = yp.copy()
            idx = rng.choice(n, size=int(np.floor(rate * n)), replace=False)
            mutated[idx] = majority
            fair, perf = _metric_pair(yt, mutated, av, fairness_metric, performance_metric)
            fair_sum += fair
            perf_sum += perf
        points.append(BaselinePoint(float(rate), fair_sum / repeats, perf_sum / repeats))
    return BaselineCurve(tuple(points), fairness_metric, performance_metric)


def baseline_performance_at(curve: BaselineCurve, fairness: float) -> float:
    """Piecewise-linear interpolation of the curve in fairness-performance
    space; fairness is clamped to the curve's range. Points sharing a
    fairness value are merged by averaging their performance."""
    fs = np.array([p.fairness for p in curve.points])
    ps = np.array([p.performance for p in curve.points])
    order = np.argsort(fs, kind="stable")
    fs, ps = fs[order], ps[order]
    uniq, inverse = np.unique(fs, return_inverse=True)
    merged = np.zeros(uniq.size)
    counts = np.zeros(uniq.size)
    np.add.at(merged, inverse, ps)
    np.add.at(counts, inverse, 1.0)
    merged /= counts
    x = min(max(fairness, float(uniq[0])), float(uniq[-1]))
    return float(np.interp(x, uniq, merged))


def classify(candidate: tuple[float, float], curve: BaselineCurve) -> TradeoffRegion:
    """Place a (fairness, performance) pair into one of the five regions."""
    fairness, perf = float(candidate[0]), float(candidate[1])
    origin = curve.origin
    fairness_better = fairness < origin.fairness
    performance_better = perf > origin.performance

    if fairness_better and performance_better:
        return TradeoffRegion.WIN_WIN
    if performance_better:
        return TradeoffRegion.INVERTED
    if fairness_better:
        if perf >= baseline_performance_at(curve, fairness):
            return TradeoffRegion.GOOD
        return TradeoffRegion.POOR
    return TradeoffRegion.LOSE_LOSE
