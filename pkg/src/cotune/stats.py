"""Rank statistics for comparing repeated-run samples.

Two-sided Mann-Whitney U-test (normal approximation with midranks, tie
correction, and continuity correction) and Cliff's delta effect size from
exact pair counting. Significance is read at p < 0.05 and |delta| >= 0.428
counts as a large effect.

Fully tied degenerate samples (zero rank variance) carry no evidence and
return p = 1 / delta = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SizeError

SIGNIFICANCE_LEVEL = 0.05
LARGE_EFFECT_THRESHOLD = 0.428


@dataclass(frozen=True)
class TestResult:
    u_statistic: float
    p_value: float
    significant: bool
    delta: float
    large_effect: bool


def _as_sample(v, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64).ravel()
    if arr.size < 1:
        raise SizeError(f"{name} must contain at least one value")
    return arr


def _midranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n with ties sharing the mean of their rank block."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size)
    sorted_vals = values[order]
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def mann_whitney_u(x, y) -> tuple[float, float]:
    """Two-sided U-test; returns (U for x, p-value).

    p comes from the normal approximation with tie-corrected variance and a
    0.5 continuity correction, clamped to [0,1].
    """
    xs = _as_sample(x, "x")
    ys = _as_sample(y, "y")
    n1, n2 = xs.size, ys.size
    pooled = np.concatenate([xs, ys])
    ranks = _midranks(pooled)
    r1 = float(ranks[:n1].sum())
    u1 = r1 - n1 * (n1 + 1) / 2.0

    n = n1 + n2
    _, tie_counts = np.unique(pooled, return_counts=True)
    tie_term = float(((tie_counts**3) - tie_counts).sum())
    if n < 2 or tie_term >= n**3 - n:  # every value identical
        return u1, 1.0
    variance = (n1 * n2 / 12.0) * ((n + 1) - tie_term / (n * (n - 1)))
    if variance <= 0.0:
        return u1, 1.0
    mean = n1 * n2 / 2.0
    z = max(abs(u1 - mean) - 0.5, 0.0) / math.sqrt(variance)
    p = min(max(math.erfc(z / math.sqrt(2.0)), 0.0), 1.0)
    return u1, p


def cliffs_delta(x, y) -> float:
    """(#{x_i > y_j} - #{x_i < y_j}) / (|x|*|y|), counted exactly."""
    xs = _as_sample(x, "x")
    ys = _as_sample(y, "y")
    ys_sorted = np.sort(ys)
    greater = int(np.searchsorted(ys_sorted, xs, side="left").sum())
    not_less = int(np.searchsorted(ys_sorted, xs, side="right").sum())
    less = xs.size * ys.size - not_less
    return (greater - less) / (xs.size * ys.size)


def compare(x, y) -> TestResult:
    """Run both tests and package the threshold flags."""
    u, p = mann_whitney_u(x, y)
    delta = cliffs_delta(x, y)
    return TestResult(
        u_statistic=u,
        p_value=p,
        significant=p < SIGNIFICANCE_LEVEL,
        delta=delta,
        large_effect=abs(delta) >= LARGE_EFFECT_THRESHOLD,
    )
