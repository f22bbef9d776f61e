"""Contingency tables, the phi-coefficient, and the analytic flip count.

For a binary group column a (1 = privileged) and binary label y (1 = favorable),
phi is the Pearson correlation of the two indicator variables:

    phi = (n11*n00 - n10*n01) / sqrt(n_a1 * n_a0 * n_y1 * n_y0)

Flipping k privileged-favorable rows to unprivileged-favorable turns the table
(n11, n10, n01, n00) into (n11-k, n10, n01+k, n00). The cross-product vanishes
at the real-valued

    k* = (n11*n00 - n10*n01) / (n00 + n10)

and |phi| as a function of integer k is unimodal around k*, so the best
integer flip count is whichever of floor(k*)/ceil(k*) gives the smaller
post-flip |phi| (ties go to the smaller k). Flip counts that would empty a
marginal are excluded since phi is undefined there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ProportionError, SchemaError, SizeError, UndefinedCorrelationError
from .tabular import Dataset


@dataclass(frozen=True)
class ContingencyTable:
    """Joint counts of (group, label); marginals are always derived."""

    n11: int
    n10: int
    n01: int
    n00: int

    def __post_init__(self):
        counts = (self.n11, self.n10, self.n01, self.n00)
        if any(c < 0 for c in counts):
            raise SizeError(f"contingency counts must be nonnegative, got {counts}")
        if sum(counts) < 1:
            raise SizeError("contingency table is empty")

    @property
    def total(self) -> int:
        return self.n11 + self.n10 + self.n01 + self.n00

    @property
    def n_priv(self) -> int:
        return self.n11 + self.n10

    @property
    def n_unpriv(self) -> int:
        return self.n01 + self.n00

    @property
    def n_fav(self) -> int:
        return self.n11 + self.n01

    @property
    def n_unfav(self) -> int:
        return self.n10 + self.n00

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.n11, self.n10, self.n01, self.n00)


def contingency(d: Dataset, attr: str) -> ContingencyTable:
    """Count the four (group, label) cells for one sensitive attribute."""
    if attr not in d.sensitive:
        raise SchemaError(f"unknown sensitive attribute {attr!r}")
    a = d.sensitive[attr]
    y = d.labels
    n11 = int(((a == 1) & (y == 1)).sum())
    n10 = int(((a == 1) & (y == 0)).sum())
    n01 = int(((a == 0) & (y == 1)).sum())
    n00 = int(((a == 0) & (y == 0)).sum())
    return ContingencyTable(n11, n10, n01, n00)


def phi(t: ContingencyTable) -> float:
    """Phi-coefficient of the table; raises when any marginal is zero."""
    if min(t.n_priv, t.n_unpriv, t.n_fav, t.n_unfav) == 0:
        raise UndefinedCorrelationError(
            f"zero marginal in table {t.as_tuple()}: phi undefined (division by zero)"
        )
    num = t.n11 * t.n00 - t.n10 * t.n01
    den = math.sqrt(float(t.n_priv) * t.n_unpriv * t.n_fav * t.n_unfav)
    return num / den


def _flipped(t: ContingencyTable, k: int) -> ContingencyTable:
    return ContingencyTable(t.n11 - k, t.n10, t.n01 + k, t.n00)


def _phi_defined(t: ContingencyTable) -> bool:
    return min(t.n_priv, t.n_unpriv, t.n_fav, t.n_unfav) > 0


def adjustment_count(t: ContingencyTable) -> int:
    """Number of privileged-favorable rows to flip so |phi| is minimal.

    Returns 0 when phi <= 0 (flipping in this direction can only help a
    positive association). The result always lies in [0, n11] and never
    empties a marginal.
    """
    if phi(t) <= 0.0:
        return 0
    # Largest k keeping the privileged marginal nonempty (label marginals
    # are invariant under the flip).
    k_max = t.n11 if t.n10 > 0 else t.n11 - 1
    k_star = (t.n11 * t.n00 - t.n10 * t.n01) / (t.n00 + t.n10)
    candidates = sorted({
        min(max(int(math.floor(k_star)), 0), k_max),
        min(max(int(math.ceil(k_star)), 0), k_max),
    })
    best_k, best_abs = None, None
    for k in candidates:
        post = _flipped(t, k)
        if not _phi_defined(post):
            continue
        value = abs(phi(post))
        if best_abs is None or value < best_abs:
            best_k, best_abs = k, value
    if best_k is None:  # pragma: no cover - unreachable given phi(t) defined
        raise UndefinedCorrelationError(f"no feasible flip count for table {t.as_tuple()}")
    return best_k


def adjustment_proportion(t: ContingencyTable) -> float:
    """adjustment_count as a fraction of the privileged-favorable cell."""
    if t.n11 == 0:
        raise ProportionError("no privileged-favorable rows: proportion undefined")
    return adjustment_count(t) / t.n11
