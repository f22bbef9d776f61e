"""Built-in deterministic logistic regression plus the pluggable model contract.

Any object exposing fit(train: Dataset, seed: int) -> model and
predict(model, d: Dataset) -> binary vector can stand in for the built-in
trainer; the experiment harness only relies on this surface.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernels import train_logistic
from .errors import ConfigError, ShapeError, TrainingError
from .tabular import Dataset


@dataclass(frozen=True)
class ClassifierConfig:
    learning_rate: float = 0.1
    epochs: int = 300
    l2: float = 1e-4
    threshold: float = 0.5
    include_sensitive_as_features: bool = True

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be > 0")
        if self.epochs < 1:
            raise ConfigError("epochs must be >= 1")
        if self.l2 < 0:
            raise ConfigError("l2 must be >= 0")
        if not 0.0 < self.threshold < 1.0:
            raise ConfigError("threshold must lie in (0,1)")


@dataclass(frozen=True, eq=False)
class TrainedModel:
    weights: np.ndarray
    bias: float
    feature_means: np.ndarray
    feature_sds: np.ndarray
    training_losses: np.ndarray
    config: ClassifierConfig


def design_matrix(d: Dataset, cfg: ClassifierConfig) -> np.ndarray:
    """Feature matrix seen by the model: raw features, plus the sensitive
    columns (schema order) when configured."""
    if not cfg.include_sensitive_as_features:
        return np.asarray(d.features, dtype=np.float64)
    cols = [d.features] + [d.sensitive[c][:, None].astype(np.float64) for c in d.schema.sensitive_columns]
    return np.ascontiguousarray(np.hstack(cols))


def fit(train: Dataset, cfg: ClassifierConfig | None = None, seed: int = 0) -> TrainedModel:
    """Train on standardized inputs with zero-initialized weights.

    Training is fully deterministic; the seed is accepted for interface
    symmetry with stochastic models and currently unused.
    """
    cfg = cfg or ClassifierConfig()
    y = train.labels
    if y.min() == y.max():
        raise TrainingError("training set contains a single label class")
    X = design_matrix(train, cfg)
    means = X.mean(axis=0)
    sds = X.std(axis=0)
    sds = np.where(sds > 0.0, sds, 1.0)  # constant columns pass through
    Xs = np.ascontiguousarray((X - means) / sds)
    w, b, losses = train_logistic(Xs, y.astype(np.float64), cfg.learning_rate, cfg.epochs, cfg.l2)
    return TrainedModel(
        weights=w,
        bias=float(b),
        feature_means=means,
        feature_sds=sds,
        training_losses=losses,
        config=cfg,
    )


def decision_scores(model: TrainedModel, d: Dataset) -> np.ndarray:
    """Sigmoid scores in [0,1] for each row."""
    X = design_matrix(d, model.config)
    if X.shape[1] != model.weights.shape[0]:
        raise ShapeError(
            f"feature dimension {X.shape[1]} does not match trained dimension {model.weights.shape[0]}"
        )
    Xs = (X - model.feature_means) / model.feature_sds
    z = Xs @ model.weights + model.bias
    ez = np.exp(-np.abs(z))
    return np.where(z >= 0.0, 1.0 / (1.0 + ez), ez / (1.0 + ez))


def predict(model: TrainedModel, d: Dataset) -> np.ndarray:
    """Binary predictions; a score exactly at the threshold maps to 1."""
    return (decision_scores(model, d) >= model.config.threshold).astype(np.int64)
