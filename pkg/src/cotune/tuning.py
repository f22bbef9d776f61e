"""Correlation tuning transforms.

Bias in a binary-labeled table shows up as a nonzero phi-coefficient between
a sensitive attribute and the label. The transforms here reduce it by
flipping the sensitive value of favorable-label rows from the source group to
the other group; features and labels are never touched, so every feature's
correlation with the label is preserved bit-for-bit.

Two ways to choose how many rows to flip:

* tune_analytic: the closed-form count that drives phi as close to zero as
  integers allow (see the correlation module).
* tune_optimized: search the flip proportion p in [0,1] with a particle
  swarm, scoring each candidate by a validation loss that combines model
  performance and fairness:

      loss = (1 - F1) + (1 - accuracy) + spd + aod + eod

  (intersectional variant swaps in ispd/iaod/ieod). A nonzero optimum
  deliberately over- or under-corrects phi to compensate for bias carried by
  non-sensitive proxy features.

Candidates are ordered by one seeded permutation, and a proportion flips a
prefix of that order: flip sets are nested in p and the validation loss is a
deterministic piecewise-constant function of p.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import classifier as clf
from . import metrics as mx
from .correlation import adjustment_count, contingency, phi
from .errors import (
    CandidateError,
    ConfigError,
    CotuneError,
    SchemaError,
    SizeError,
    TrainingError,
    TuningStageError,
)
from .pso import PsoConfig, minimize_scalar
from .tabular import Dataset, split


class TuneDirection(enum.Enum):
    PRIVILEGED_TO_UNPRIVILEGED = "privileged_to_unprivileged"
    UNPRIVILEGED_TO_PRIVILEGED = "unprivileged_to_privileged"


class LossKind(enum.Enum):
    SINGLE = "single"
    INTERSECTIONAL = "intersectional"


@dataclass(frozen=True, eq=False)
class TuneResult:
    dataset: Dataset
    flipped_indices: np.ndarray    # sorted row indices that changed group
    proportion_applied: float
    phi_before: float              # NaN when undefined on the input table
    phi_after: float               # NaN when undefined on the output table


@dataclass(frozen=True, eq=False)
class MultiTuneResult:
    dataset: Dataset
    stages: tuple[tuple[str, TuneResult], ...]   # (attribute, stage result) in order

    @property
    def flipped_by_attr(self) -> dict[str, np.ndarray]:
        return {attr: r.flipped_indices for attr, r in self.stages}


@dataclass(frozen=True)
class OptConfig:
    pso: PsoConfig = field(default_factory=PsoConfig)
    validation_fraction: float = 0.2
    classifier: clf.ClassifierConfig = field(default_factory=clf.ClassifierConfig)
    loss_kind: LossKind = LossKind.SINGLE

    def __post_init__(self):
        if not 0.0 < self.validation_fraction < 1.0:
            raise ConfigError("validation_fraction must lie in (0,1)")


def _phi_or_nan(d: Dataset, attr: str) -> float:
    try:
        return phi(contingency(d, attr))
    except CotuneError:
        return float("nan")


def _candidate_indices(d: Dataset, attr: str, direction: TuneDirection) -> np.ndarray:
    source = 1 if direction is TuneDirection.PRIVILEGED_TO_UNPRIVILEGED else 0
    return np.flatnonzero((d.sensitive[attr] == source) & (d.labels == 1))


def apply_flip_count(
    d: Dataset,
    attr: str,
    k: int,
    direction: TuneDirection = TuneDirection.PRIVILEGED_TO_UNPRIVILEGED,
    seed: int = 0,
    proportion: float | None = None,
) -> TuneResult:
    """Flip exactly k candidates, chosen as a prefix of the seeded permutation."""
    if attr not in d.sensitive:
        raise SchemaError(f"unknown sensitive attribute {attr!r}")
    candidates = _candidate_indices(d, attr, direction)
    if k > 0 and candidates.size == 0:
        raise CandidateError(f"no candidate rows (source group with favorable label) for {attr!r}")
    if not 0 <= k <= candidates.size:
        raise CandidateError(f"flip count {k} outside [0, {candidates.size}]")

    phi_before = _phi_or_nan(d, attr)
    order = np.random.default_rng(seed).permutation(candidates.size)
    chosen = candidates[order[:k]]

    values = np.array(d.sensitive[attr])
    values[chosen] = 1 - values[chosen]
    tuned = d.with_sensitive(attr, values)
    return TuneResult(
        dataset=tuned,
        flipped_indices=np.sort(chosen),
        proportion_applied=(k / candidates.size if candidates.size else 0.0) if proportion is None else proportion,
        phi_before=phi_before,
        phi_after=_phi_or_nan(tuned, attr),
    )


def apply_proportion(
    d: Dataset,
    attr: str,
    p: float,
    direction: TuneDirection = TuneDirection.PRIVILEGED_TO_UNPRIVILEGED,
    seed: int = 0,
) -> TuneResult:
    """Flip floor(p * |candidates|) rows. Flip sets are nested in p for a
    fixed seed: the set at p is a prefix of the set at any p' >= p."""
    if not 0.0 <= p <= 1.0:
        raise CandidateError(f"proportion must lie in [0,1], got {p}")
    if attr not in d.sensitive:
        raise SchemaError(f"unknown sensitive attribute {attr!r}")
    candidates = _candidate_indices(d, attr, direction)
    if p > 0.0 and candidates.size == 0:
        raise CandidateError(f"no candidate rows (source group with favorable label) for {attr!r}")
    k = int(np.floor(p * candidates.size))
    return apply_flip_count(d, attr, k, direction, seed, proportion=p)


def tune_analytic(train: Dataset, attr: str, seed: int = 0) -> TuneResult:
    """Flip the analytic count so the post-flip |phi| is minimal."""
    t = contingency(train, attr)
    k = adjustment_count(t)  # validates that phi is defined
    return apply_flip_count(
        train,
        attr,
        k,
        TuneDirection.PRIVILEGED_TO_UNPRIVILEGED,
        seed,
        proportion=(k / t.n11 if t.n11 else 0.0),
    )


def loss_single(m: mx.MetricsBundle) -> float:
    return (1.0 - m.f1) + (1.0 - m.accuracy) + m.spd + m.aod + m.eod


def loss_intersectional(m: mx.MetricsBundle) -> float:
    if m.ispd is None or m.iaod is None or m.ieod is None:
        raise ConfigError("bundle has no intersectional fields; evaluate with >= 2 attributes")
    return (1.0 - m.f1) + (1.0 - m.accuracy) + m.ispd + m.iaod + m.ieod


def validation_objective(
    train: Dataset,
    attr: str,
    cfg: OptConfig,
    seed: int,
    loss_attrs: list[str] | None = None,
):
    """Build the p -> validation-loss map used by the search.

    The training set is split once (seeded) into an inner train/validation
    pair; each evaluation tunes the inner train at proportion p, fits the
    configured classifier, and scores predictions on the untouched inner
    validation rows. Evaluations that cannot be scored (a fairness
    conditioning cell empty on the validation side) count as +inf.
    """
    inner_train, inner_val = split(train, 1.0 - cfg.validation_fraction, seed)
    y = inner_train.labels
    if y.min() == y.max():
        raise TrainingError("inner training split contains a single label class")
    attrs = loss_attrs if loss_attrs is not None else [attr]
    use_intersectional = cfg.loss_kind is LossKind.INTERSECTIONAL

    def objective(p: float) -> float:
        tuned = apply_proportion(inner_train, attr, p, seed=seed)
        model = clf.fit(tuned.dataset, cfg.classifier, seed)
        y_pred = clf.predict(model, inner_val)
        try:
            bundle = mx.evaluate(inner_val, y_pred, attrs)
            if use_intersectional:
                if len(attrs) == 1:
                    inter = mx.intersectional_fairness(
                        inner_val.labels, y_pred, mx.subgroups(inner_val, attrs)
                    )
                    bundle = mx.MetricsBundle(**{**bundle.as_dict(), **inter})
                return loss_intersectional(bundle)
            return loss_single(bundle)
        except CotuneError:
            return float("inf")

    return objective


def tune_optimized(
    train: Dataset,
    attr: str,
    cfg: OptConfig | None = None,
    seed: int = 0,
    loss_attrs: list[str] | None = None,
) -> TuneResult:
    """Search the flip proportion by particle swarm and apply the best one.

    The swarm is warm-started at p=0 (no-op) and at the analytic proportion,
    so the chosen p is never worse on the validation loss than either
    reference point.
    """
    cfg = cfg or OptConfig()
    if attr not in train.sensitive:
        raise SchemaError(f"unknown sensitive attribute {attr!r}")
    candidates = _candidate_indices(train, attr, TuneDirection.PRIVILEGED_TO_UNPRIVILEGED)
    if candidates.size == 0:
        return apply_proportion(train, attr, 0.0, seed=seed)

    objective = validation_objective(train, attr, cfg, seed, loss_attrs)
    warm = [0.0]
    t = contingency(train, attr)
    if t.n11 > 0:
        warm.append(adjustment_count(t) / t.n11)
    result = minimize_scalar(objective, cfg.pso, seed, init_positions=warm)
    return apply_proportion(train, attr, result.x_best, seed=seed)


class MultiMethod(enum.Enum):
    PHI = "phi"
    OPT = "opt"


def tune_sequential(
    train: Dataset,
    attrs: list[str],
    method: MultiMethod,
    cfg: OptConfig | None = None,
    seed: int = 0,
) -> MultiTuneResult:
    """Tune several attributes one after another, each stage consuming the
    previous stage's dataset. Optimized stages score the intersectional loss
    over the subgroups of all listed attributes."""
    if len(attrs) < 2:
        raise SizeError("sequential tuning needs at least two attributes")
    for attr in attrs:
        if attr not in train.sensitive:
            raise SchemaError(f"unknown sensitive attribute {attr!r}")
    if method is MultiMethod.OPT:
        cfg = cfg or OptConfig()
        cfg = OptConfig(
            pso=cfg.pso,
            validation_fraction=cfg.validation_fraction,
            classifier=cfg.classifier,
            loss_kind=LossKind.INTERSECTIONAL,
        )

    current = train
    stages = []
    for attr in attrs:
        try:
            if method is MultiMethod.PHI:
                stage = tune_analytic(current, attr, seed)
            else:
                stage = tune_optimized(current, attr, cfg, seed, loss_attrs=list(attrs))
        except CotuneError as e:
            raise TuningStageError(attr, str(e)) from e
        stages.append((attr, stage))
        current = stage.dataset
    return MultiTuneResult(dataset=current, stages=tuple(stages))
