import math

import numpy as np
import pytest

from cotune.correlation import contingency, phi
from cotune.errors import CardinalityError, ParseError, SchemaError, SizeError
from cotune.tabular import (
    Dataset,
    Schema,
    SensitiveAttribute,
    SynthSpec,
    contaminate,
    datasets_equal,
    encoded_schema,
    load_csv,
    schema_from_json,
    split,
    subsample,
    synthesize,
    write_csv,
)

SCHEMA = Schema(
    label_column="label",
    favorable_value="yes",
    sensitive_attributes=(SensitiveAttribute("sex", "M"),),
    feature_columns=("age", "score"),
)


def write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadCsv:
    def test_binary_encoding(self, tmp_path):
        path = write(tmp_path, "age,score,sex,label\n30,1.5,M,yes\n40,2.0,F,no\n50,0.5,M,no\n20,1.0,F,yes\n")
        d = load_csv(path, SCHEMA)
        assert d.sensitive["sex"].sum() == 2
        assert d.labels.tolist() == [1, 0, 0, 1]
        assert d.features[0].tolist() == [30.0, 1.5]

    def test_empty_file(self, tmp_path):
        with pytest.raises(SchemaError):
            load_csv(write(tmp_path, ""), SCHEMA)

    def test_three_label_tokens(self, tmp_path):
        path = write(tmp_path, "age,score,sex,label\n1,1,M,yes\n2,2,F,no\n3,3,M,maybe\n")
        with pytest.raises(CardinalityError):
            load_csv(path, SCHEMA)

    def test_missing_column_named(self, tmp_path):
        path = write(tmp_path, "age,sex,label\n1,M,yes\n")
        with pytest.raises(SchemaError, match="score"):
            load_csv(path, SCHEMA)

    def test_unparsable_numeric_reports_row(self, tmp_path):
        path = write(tmp_path, "age,score,sex,label\n30,1.5,M,yes\n40,oops,F,no\n")
        with pytest.raises(ParseError, match="row 1"):
            load_csv(path, SCHEMA)

    def test_declared_token_absent_from_two_token_column(self, tmp_path):
        path = write(tmp_path, "age,score,sex,label\n1,1,male,yes\n2,2,female,no\n")
        with pytest.raises(CardinalityError):
            load_csv(path, SCHEMA)

    def test_feature_columns_default_to_remaining(self, tmp_path):
        schema = Schema("label", "yes", (SensitiveAttribute("sex", "M"),), ())
        path = write(tmp_path, "age,score,sex,label\n30,1.5,M,yes\n40,2.0,F,no\n")
        d = load_csv(path, schema)
        assert d.schema.feature_columns == ("age", "score")

    def test_round_trip(self, tmp_path):
        d = synthesize(SynthSpec(counts=(12, 8, 6, 14), feature_dim=4, seed=3))
        path = tmp_path / "out.csv"
        write_csv(d, path)
        again = load_csv(path, encoded_schema(d.schema))
        assert datasets_equal(d, again)


class TestSchemaJson:
    def test_load(self, tmp_path):
        doc = (
            '{"label_column": "label", "favorable_value": "yes",'
            ' "sensitive_attributes": [{"column": "sex", "privileged_value": "M"}],'
            ' "feature_columns": ["age", "score"]}'
        )
        schema = schema_from_json(write(tmp_path, doc, "schema.json"))
        assert schema == SCHEMA

    def test_missing_key(self, tmp_path):
        with pytest.raises(SchemaError):
            schema_from_json(write(tmp_path, '{"label_column": "label"}', "schema.json"))


class TestSplit:
    def test_sizes(self, biased_dataset):
        d10 = biased_dataset.take(np.arange(10))
        train, test = split(d10, 0.7, seed=5)
        assert train.n_rows == 7 and test.n_rows == 3

    def test_deterministic(self, biased_dataset):
        t1, s1 = split(biased_dataset, 0.7, seed=9)
        t2, s2 = split(biased_dataset, 0.7, seed=9)
        assert datasets_equal(t1, t2) and datasets_equal(s1, s2)

    def test_seeds_differ(self):
        d = synthesize(SynthSpec(counts=(300, 300, 200, 200), feature_dim=1, seed=0))
        (ta, _), (tb, _) = split(d, 0.7, seed=1), split(d, 0.7, seed=2)
        # identify rows by their unique feature values
        assert set(ta.features[:, 0]) != set(tb.features[:, 0])

    def test_disjoint_and_exhaustive(self, biased_dataset):
        # features are continuous, so rows are identifiable by value
        train, test = split(biased_dataset, 0.7, seed=0)
        all_vals = sorted(biased_dataset.features[:, 0])
        split_vals = sorted(np.concatenate([train.features[:, 0], test.features[:, 0]]))
        assert np.array_equal(all_vals, split_vals)
        assert not set(train.features[:, 0]) & set(test.features[:, 0])

    def test_too_small(self, biased_dataset):
        with pytest.raises(SizeError):
            split(biased_dataset.take(np.array([0])), 0.7, seed=0)


class TestSynthesize:
    def test_counts_exact(self):
        d = synthesize(SynthSpec(counts=(30, 20, 10, 40), seed=1))
        assert contingency(d, "group").as_tuple() == (30, 20, 10, 40)

    def test_balanced_phi_zero(self):
        d = synthesize(SynthSpec(counts=(25, 25, 25, 25), seed=1))
        assert phi(contingency(d, "group")) == 0.0

    def test_phi_value(self):
        d = synthesize(SynthSpec(counts=(30, 20, 10, 40), seed=2))
        expected = 1000.0 / math.sqrt(6_000_000)  # hand contingency arithmetic
        assert phi(contingency(d, "group")) == pytest.approx(expected, abs=1e-10)

    def test_all_zero_rejected(self):
        with pytest.raises(SizeError):
            SynthSpec(counts=(0, 0, 0, 0))


class TestSubsample:
    def test_identity(self, biased_dataset):
        assert datasets_equal(subsample(biased_dataset, biased_dataset.n_rows, 0), biased_dataset)

    def test_membership(self):
        d = synthesize(SynthSpec(counts=(300, 300, 200, 200), feature_dim=1, seed=0))
        sub = subsample(d, 100, seed=4)
        assert sub.n_rows == 100
        assert set(sub.features[:, 0]) <= set(d.features[:, 0])

    def test_deterministic(self, biased_dataset):
        assert datasets_equal(subsample(biased_dataset, 40, 8), subsample(biased_dataset, 40, 8))

    def test_out_of_range(self, biased_dataset):
        with pytest.raises(SizeError):
            subsample(biased_dataset, 0, 0)
        with pytest.raises(SizeError):
            subsample(biased_dataset, biased_dataset.n_rows + 1, 0)


class TestContaminate:
    def test_identity_at_zero_rates(self, biased_dataset):
        out = contaminate(biased_dataset, 0.0, 0.0, 0.0, seed=0)
        assert datasets_equal(out, biased_dataset)

    def test_labels_and_sensitive_untouched(self, biased_dataset):
        out = contaminate(biased_dataset, 0.3, 1.0, 0.1, seed=0)
        assert np.array_equal(out.labels, biased_dataset.labels)
        assert np.array_equal(out.sensitive["group"], biased_dataset.sensitive["group"])
        assert not np.array_equal(out.features, biased_dataset.features)

    def test_missing_count_in_binomial_interval(self):
        d = synthesize(SynthSpec(counts=(30, 20, 10, 40), feature_dim=5, seed=5))
        out = contaminate(d, missing_rate=0.1, noise_sd=0.0, outlier_rate=0.0, seed=12)
        medians = np.median(d.features, axis=0)
        imputed = int((out.features == medians[None, :]).sum())
        # Binomial(500, 0.1): mean 50, sd 6.7; central 99% interval
        assert 33 <= imputed <= 67

    def test_rate_validation(self, biased_dataset):
        with pytest.raises(SizeError):
            contaminate(biased_dataset, 1.0, 0.0, 0.0, 0)
        with pytest.raises(SizeError):
            contaminate(biased_dataset, 0.0, -1.0, 0.0, 0)


class TestDatasetInvariants:
    def test_arrays_locked(self, biased_dataset):
        with pytest.raises(ValueError):
            biased_dataset.labels[0] = 0
        with pytest.raises(ValueError):
            biased_dataset.features[0, 0] = 99.0

    def test_nonbinary_rejected(self):
        schema = Schema("y", "1", (SensitiveAttribute("a", "1"),), ("x",))
        with pytest.raises(CardinalityError):
            Dataset(np.zeros((3, 1)), {"a": np.array([0, 1, 2])}, np.array([0, 1, 0]), schema)

    def test_length_mismatch(self):
        schema = Schema("y", "1", (SensitiveAttribute("a", "1"),), ("x",))
        with pytest.raises(SchemaError):
            Dataset(np.zeros((3, 1)), {"a": np.array([0, 1, 1])}, np.array([0, 1]), schema)
