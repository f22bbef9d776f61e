import numpy as np
import pytest

from cotune.tabular import Dataset, Schema, SensitiveAttribute, SynthSpec, synthesize


@pytest.fixture
def biased_dataset():
    """100 rows, contingency (30,20,10,40), phi ~ 0.408."""
    return synthesize(SynthSpec(counts=(30, 20, 10, 40), feature_dim=3, seed=7))


@pytest.fixture
def medium_dataset():
    """1000 rows, contingency (300,200,100,400); big enough to train on."""
    return synthesize(SynthSpec(counts=(300, 200, 100, 400), feature_dim=3, seed=0))


def make_two_attr_dataset(n=800, seed=11):
    """Two sensitive attributes, both positively associated with the label."""
    rng = np.random.default_rng(seed)
    y = (rng.random(n) < 0.4).astype(np.int64)
    a1 = (rng.random(n) < np.where(y == 1, 0.70, 0.40)).astype(np.int64)
    a2 = (rng.random(n) < np.where(y == 1, 0.65, 0.45)).astype(np.int64)
    feats = rng.normal(0.0, 1.0, size=(n, 3)) + y[:, None].astype(np.float64)
    schema = Schema(
        label_column="outcome",
        favorable_value="1",
        sensitive_attributes=(
            SensitiveAttribute("sex", "1"),
            SensitiveAttribute("race", "1"),
        ),
        feature_columns=("f0", "f1", "f2"),
    )
    return Dataset(features=feats, sensitive={"sex": a1, "race": a2}, labels=y, schema=schema)


@pytest.fixture
def two_attr_dataset():
    return make_two_attr_dataset()
