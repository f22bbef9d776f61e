"""Tabular data model: schema, CSV ingestion, splits, synthesis, perturbation.

Conventions baked into the encoding: the favorable label maps to 1, the
privileged group maps to 1. Every downstream module relies on that.

All container types are immutable after construction (arrays are locked
read-only); operations are pure functions of their inputs and a seed.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CardinalityError, ParseError, SchemaError, SizeError


@dataclass(frozen=True)
class SensitiveAttribute:
    column: str
    privileged_value: str


@dataclass(frozen=True)
class Schema:
    """Maps raw CSV columns onto the binary-encoded dataset layout."""

    label_column: str
    favorable_value: str
    sensitive_attributes: tuple[SensitiveAttribute, ...]
    feature_columns: tuple[str, ...]

    def __post_init__(self):
        if not self.sensitive_attributes:
            raise SchemaError("at least one sensitive attribute must be declared")
        sensitive_names = [s.column for s in self.sensitive_attributes]
        if len(set(sensitive_names)) != len(sensitive_names):
            raise SchemaError("duplicate sensitive attribute columns")
        special = set(sensitive_names) | {self.label_column}
        overlap = special & set(self.feature_columns)
        if overlap:
            raise SchemaError(f"feature columns overlap label/sensitive columns: {sorted(overlap)}")
        if self.label_column in sensitive_names:
            raise SchemaError("label column cannot also be a sensitive attribute")

    @property
    def sensitive_columns(self) -> tuple[str, ...]:
        return tuple(s.column for s in self.sensitive_attributes)

    def privileged_value_of(self, column: str) -> str:
        for s in self.sensitive_attributes:
            if s.column == column:
                return s.privileged_value
        raise SchemaError(f"unknown sensitive attribute {column!r}")


def schema_from_json(path) -> Schema:
    """Load a schema document.

    Expected keys: label_column, favorable_value, sensitive_attributes
    (array of {column, privileged_value}), feature_columns (optional; when
    absent, all remaining CSV columns become features in header order).
    """
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        sens = tuple(
            SensitiveAttribute(str(s["column"]), str(s["privileged_value"]))
            for s in doc["sensitive_attributes"]
        )
        return Schema(
            label_column=str(doc["label_column"]),
            favorable_value=str(doc["favorable_value"]),
            sensitive_attributes=sens,
            feature_columns=tuple(str(c) for c in doc.get("feature_columns", ())),
        )
    except KeyError as e:
        raise SchemaError(f"schema document missing key: {e}") from e


def _lock(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """n rows of (features, binary sensitive columns, binary label)."""

    features: np.ndarray                 # (n, d) float64
    sensitive: dict[str, np.ndarray]     # column -> (n,) int64 in {0,1}
    labels: np.ndarray                   # (n,) int64 in {0,1}
    schema: Schema

    def __post_init__(self):
        feats = np.ascontiguousarray(self.features, dtype=np.float64)
        labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        if feats.ndim != 2:
            raise SchemaError("features must be a 2-D matrix")
        n = feats.shape[0]
        if n < 1:
            raise SizeError("dataset must contain at least one row")
        if labels.shape != (n,):
            raise SchemaError("labels length does not match feature rows")
        sens = {}
        for name in self.schema.sensitive_columns:
            if name not in self.sensitive:
                raise SchemaError(f"missing sensitive column {name!r}")
            col = np.ascontiguousarray(self.sensitive[name], dtype=np.int64)
            if col.shape != (n,):
                raise SchemaError(f"sensitive column {name!r} length mismatch")
            if not np.isin(col, (0, 1)).all():
                raise CardinalityError(f"sensitive column {name!r} contains values outside {{0,1}}")
            sens[name] = _lock(col)
        if not np.isin(labels, (0, 1)).all():
            raise CardinalityError("labels contain values outside {0,1}")
        object.__setattr__(self, "features", _lock(feats))
        object.__setattr__(self, "labels", _lock(labels))
        object.__setattr__(self, "sensitive", sens)

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def take(self, indices: np.ndarray) -> "Dataset":
        """Row subset/reorder by integer index array."""
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(
            features=self.features[idx],
            sensitive={k: v[idx] for k, v in self.sensitive.items()},
            labels=self.labels[idx],
            schema=self.schema,
        )

    def with_sensitive(self, column: str, values: np.ndarray) -> "Dataset":
        """Copy of the dataset with one sensitive column replaced."""
        if column not in self.sensitive:
            raise SchemaError(f"unknown sensitive attribute {column!r}")
        sens = dict(self.sensitive)
        sens[column] = np.array(values, dtype=np.int64)
        return Dataset(self.features, sens, self.labels, self.schema)


def datasets_equal(a: Dataset, b: Dataset) -> bool:
    return (
        a.schema == b.schema
        and np.array_equal(a.features, b.features)
        and np.array_equal(a.labels, b.labels)
        and all(np.array_equal(a.sensitive[k], b.sensitive[k]) for k in a.schema.sensitive_columns)
    )


def _encode_binary(raw: list[str], one_token: str, column: str) -> np.ndarray:
    tokens = sorted(set(raw))
    if len(tokens) > 2:
        raise CardinalityError(
            f"column {column!r} holds {len(tokens)} distinct tokens {tokens[:4]}; expected at most 2"
        )
    if len(tokens) == 2 and one_token not in tokens:
        raise CardinalityError(
            f"column {column!r} holds tokens {tokens} but neither matches declared value {one_token!r}"
        )
    return np.fromiter((1 if t == one_token else 0 for t in raw), dtype=np.int64, count=len(raw))


def load_csv(path, schema: Schema) -> Dataset:
    """Read an RFC-4180 CSV (header mandatory) and encode it per the schema.

    Raises SchemaError for missing columns, CardinalityError when a binary
    column holds more than two tokens, ParseError (with the 0-based data row
    index) when a feature cell is not numeric.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, header row required") from None
        rows = [row for row in reader if row]

    pos = {name: i for i, name in enumerate(header)}
    feature_columns = schema.feature_columns
    if not feature_columns:
        taken = set(schema.sensitive_columns) | {schema.label_column}
        feature_columns = tuple(c for c in header if c not in taken)
        schema = Schema(
            schema.label_column, schema.favorable_value, schema.sensitive_attributes, feature_columns
        )
    for col in (schema.label_column, *schema.sensitive_columns, *feature_columns):
        if col not in pos:
            raise SchemaError(f"{path}: column {col!r} not present in header")
    if not rows:
        raise SizeError(f"{path}: no data rows")

    n = len(rows)
    feats = np.empty((n, len(feature_columns)), dtype=np.float64)
    for j, col in enumerate(feature_columns):
        cj = pos[col]
        for i, row in enumerate(rows):
            try:
                feats[i, j] = float(row[cj])
            except (ValueError, IndexError):
                cell = row[cj] if cj < len(row) else "<missing>"
                raise ParseError(f"{path}: row {i}, column {col!r}: cannot parse {cell!r} as a number") from None

    labels = _encode_binary([r[pos[schema.label_column]] for r in rows], schema.favorable_value, schema.label_column)
    sensitive = {
        s.column: _encode_binary([r[pos[s.column]] for r in rows], s.privileged_value, s.column)
        for s in schema.sensitive_attributes
    }
    return Dataset(features=feats, sensitive=sensitive, labels=labels, schema=schema)


def write_csv(d: Dataset, path) -> None:
    """Write the encoded dataset (features at full precision, 0/1 binaries).

    A dataset written here round-trips exactly through load_csv with a schema
    whose favorable/privileged tokens are "1".
    """
    header = [*d.schema.feature_columns, *d.schema.sensitive_columns, d.schema.label_column]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        sens_cols = [d.sensitive[c] for c in d.schema.sensitive_columns]
        for i in range(d.n_rows):
            row = [repr(float(v)) for v in d.features[i]]
            row.extend(str(int(col[i])) for col in sens_cols)
            row.append(str(int(d.labels[i])))
            writer.writerow(row)


def encoded_schema(schema: Schema) -> Schema:
    """Schema matching a write_csv output (tokens become "1")."""
    return Schema(
        label_column=schema.label_column,
        favorable_value="1",
        sensitive_attributes=tuple(
            SensitiveAttribute(s.column, "1") for s in schema.sensitive_attributes
        ),
        feature_columns=schema.feature_columns,
    )


def write_schema_json(schema: Schema, path) -> None:
    doc = {
        "label_column": schema.label_column,
        "favorable_value": schema.favorable_value,
        "sensitive_attributes": [
            {"column": s.column, "privileged_value": s.privileged_value}
            for s in schema.sensitive_attributes
        ],
        "feature_columns": list(schema.feature_columns),
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def split(d: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Seeded uniform shuffle, then prefix split; both parts keep shuffled order."""
    if not 0.0 < train_fraction < 1.0:
        raise SizeError(f"train_fraction must lie in (0,1), got {train_fraction}")
    n = d.n_rows
    if n < 2:
        raise SizeError("need at least 2 rows to split")
    n_train = int(np.floor(train_fraction * n))
    if n_train < 1 or n_train >= n:
        raise SizeError(f"train_fraction {train_fraction} leaves an empty part for n={n}")
    perm = np.random.default_rng(seed).permutation(n)
    return d.take(perm[:n_train]), d.take(perm[n_train:])


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for a synthetic dataset with exact group/label joint counts.

    counts order: (n11, n10, n01, n00) = (privileged-favorable,
    privileged-unfavorable, unprivileged-favorable, unprivileged-unfavorable).

    Features are i.i.d. Gaussian with standard deviation noise_sd around a
    label-driven mean offset: favorable rows sit at group_signal, unfavorable
    rows at 0. Group membership therefore influences features only through
    its correlation with the label, keeping the sensitive column the sole
    direct carrier of group information.
    """

    counts: tuple[int, int, int, int]
    feature_dim: int = 2
    group_signal: float = 1.0
    noise_sd: float = 1.0
    seed: int = 0
    attr_name: str = "group"
    label_name: str = "outcome"

    def __post_init__(self):
        if len(self.counts) != 4 or any(c < 0 for c in self.counts):
            raise SizeError("counts must be four nonnegative integers")
        if sum(1 for c in self.counts if c > 0) < 2:
            raise SizeError("at least two contingency cells must be populated")
        if self.feature_dim < 1:
            raise SizeError("feature_dim must be >= 1")
        if self.noise_sd <= 0:
            raise SizeError("noise_sd must be > 0")


def synth_schema(spec: SynthSpec) -> Schema:
    return Schema(
        label_column=spec.label_name,
        favorable_value="1",
        sensitive_attributes=(SensitiveAttribute(spec.attr_name, "1"),),
        feature_columns=tuple(f"f{j}" for j in range(spec.feature_dim)),
    )


def synthesize(spec: SynthSpec) -> Dataset:
    """Generate a dataset realizing spec.counts exactly (rows shuffled, seeded)."""
    n11, n10, n01, n00 = spec.counts
    n = n11 + n10 + n01 + n00
    if n == 0:
        raise SizeError("all contingency counts are zero")
    a = np.concatenate([
        np.ones(n11 + n10, dtype=np.int64),
        np.zeros(n01 + n00, dtype=np.int64),
    ])
    y = np.concatenate([
        np.ones(n11, dtype=np.int64),
        np.zeros(n10, dtype=np.int64),
        np.ones(n01, dtype=np.int64),
        np.zeros(n00, dtype=np.int64),
    ])
    rng = np.random.default_rng(spec.seed)
    means = spec.group_signal * y.astype(np.float64)
    feats = rng.normal(0.0, spec.noise_sd, size=(n, spec.feature_dim)) + means[:, None]
    perm = rng.permutation(n)
    return Dataset(
        features=feats[perm],
        sensitive={spec.attr_name: a[perm]},
        labels=y[perm],
        schema=synth_schema(spec),
    )


def subsample(d: Dataset, n_keep: int, seed: int) -> Dataset:
    """Uniform without-replacement row sample; original row order preserved."""
    if not 1 <= n_keep <= d.n_rows:
        raise SizeError(f"n_keep must lie in [1, {d.n_rows}], got {n_keep}")
    idx = np.random.default_rng(seed).choice(d.n_rows, size=n_keep, replace=False)
    return d.take(np.sort(idx))


def contaminate(
    d: Dataset,
    missing_rate: float,
    noise_sd: float,
    outlier_rate: float,
    seed: int,
) -> Dataset:
    """Degrade feature cells: median-impute, add scaled noise, inject outliers.

    Per cell, independently and in this order: with probability missing_rate
    the cell is replaced by its column's median (computed on the clean data);
    Gaussian noise with sd = noise_sd * column sd is added to every cell;
    with probability outlier_rate the cell is multiplied by 10. Labels and
    sensitive columns are never touched.
    """
    if not 0.0 <= missing_rate < 1.0:
        raise SizeError(f"missing_rate must lie in [0,1), got {missing_rate}")
    if not 0.0 <= outlier_rate < 1.0:
        raise SizeError(f"outlier_rate must lie in [0,1), got {outlier_rate}")
    if noise_sd < 0.0:
        raise SizeError(f"noise_sd must be >= 0, got {noise_sd}")

    rng = np.random.default_rng(seed)
    feats = np.array(d.features)
    medians = np.median(feats, axis=0)
    col_sd = np.std(feats, axis=0)

    missing = rng.random(feats.shape) < missing_rate
    noise = rng.normal(0.0, 1.0, size=feats.shape)
    outlier = rng.random(feats.shape) < outlier_rate

    feats[missing] = np.broadcast_to(medians, feats.shape)[missing]
    feats += noise * (noise_sd * col_sd)
    feats[outlier] *= 10.0

    return Dataset(features=feats, sensitive=dict(d.sensitive), labels=d.labels, schema=d.schema)
