import math

import numpy as np
import pytest

from cotune.correlation import (
    ContingencyTable,
    adjustment_count,
    adjustment_proportion,
    contingency,
    phi,
)
from cotune.errors import ProportionError, SchemaError, SizeError, UndefinedCorrelationError
from cotune.tabular import Dataset, Schema, SensitiveAttribute, SynthSpec, synthesize


def brute_force_best_k(t: ContingencyTable) -> int:
    """Independent oracle: scan every feasible flip count."""
    best_k, best_abs = None, None
    for k in range(0, t.n11 + 1):
        post = ContingencyTable(t.n11 - k, t.n10, t.n01 + k, t.n00)
        if min(post.n_priv, post.n_unpriv, post.n_fav, post.n_unfav) == 0:
            continue
        value = abs(phi(post))
        if best_abs is None or value < best_abs:
            best_k, best_abs = k, value
    return best_k


def hand_dataset(a, y):
    a = np.asarray(a)
    schema = Schema("y", "1", (SensitiveAttribute("a", "1"),), ("x",))
    return Dataset(np.zeros((len(a), 1)), {"a": a}, np.asarray(y), schema)


class TestContingency:
    def test_synthesize_inverse(self):
        d = synthesize(SynthSpec(counts=(30, 20, 10, 40), seed=0))
        assert contingency(d, "group").as_tuple() == (30, 20, 10, 40)

    def test_degenerate_all_privileged_favorable(self):
        d = hand_dataset([1] * 5, [1] * 5)
        assert contingency(d, "a").as_tuple() == (5, 0, 0, 0)

    def test_hand_counts(self):
        d = hand_dataset([1, 1, 1, 1, 0, 0, 0, 0], [1, 1, 0, 0, 1, 0, 0, 0])
        assert contingency(d, "a").as_tuple() == (2, 2, 1, 3)

    def test_unknown_attribute(self):
        d = hand_dataset([1, 0], [1, 0])
        with pytest.raises(SchemaError):
            contingency(d, "nope")


class TestPhi:
    def test_balanced(self):
        assert phi(ContingencyTable(25, 25, 25, 25)) == 0.0

    def test_perfect_association(self):
        assert phi(ContingencyTable(50, 0, 0, 50)) == 1.0

    def test_worked_value(self):
        assert phi(ContingencyTable(30, 20, 10, 40)) == pytest.approx(0.40825, abs=1e-5)

    def test_zero_marginal(self):
        with pytest.raises(UndefinedCorrelationError):
            phi(ContingencyTable(5, 0, 0, 0))

    def test_range_property(self):
        rng = np.random.default_rng(0)
        for _ in range(500):
            t = ContingencyTable(*(int(v) for v in rng.integers(1, 60, size=4)))
            assert -1.0 <= phi(t) <= 1.0

    def test_antisymmetry(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            n11, n10, n01, n00 = (int(v) for v in rng.integers(1, 60, size=4))
            assert phi(ContingencyTable(n01, n00, n11, n10)) == pytest.approx(
                -phi(ContingencyTable(n11, n10, n01, n00)), abs=1e-12
            )

    def test_scale_invariance(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            t = tuple(int(v) for v in rng.integers(1, 40, size=4))
            c = int(rng.integers(2, 6))
            scaled = ContingencyTable(*(c * v for v in t))
            assert phi(scaled) == pytest.approx(phi(ContingencyTable(*t)), abs=1e-12)


class TestAdjustmentCount:
    def test_already_balanced(self):
        assert adjustment_count(ContingencyTable(25, 25, 25, 25)) == 0

    def test_worked_example(self):
        # k* = 1000/60 ~ 16.67; |phi| at 17 beats 16
        assert adjustment_count(ContingencyTable(30, 20, 10, 40)) == 17

    def test_degenerate_clamp(self):
        # k* = 50 would empty the privileged marginal; clamp to 49
        assert adjustment_count(ContingencyTable(50, 0, 0, 50)) == 49

    def test_negative_phi_no_flips(self):
        assert adjustment_count(ContingencyTable(10, 40, 30, 20)) == 0

    def test_matches_brute_force_on_random_tables(self):
        rng = np.random.default_rng(3)
        for _ in range(400):
            t = ContingencyTable(*(int(v) for v in rng.integers(1, 50, size=4)))
            assert adjustment_count(t) == brute_force_best_k(t), t.as_tuple()

    def test_post_adjustment_phi_never_worse(self):
        rng = np.random.default_rng(4)
        for _ in range(300):
            t = ContingencyTable(*(int(v) for v in rng.integers(1, 50, size=4)))
            if phi(t) <= 0:
                continue
            k = adjustment_count(t)
            post = ContingencyTable(t.n11 - k, t.n10, t.n01 + k, t.n00)
            assert abs(phi(post)) <= abs(phi(t)) + 1e-12


class TestAdjustmentProportion:
    def test_balanced(self):
        assert adjustment_proportion(ContingencyTable(25, 25, 25, 25)) == 0.0

    def test_worked_example(self):
        assert adjustment_proportion(ContingencyTable(30, 20, 10, 40)) == pytest.approx(17 / 30)

    def test_balanced_scale_invariance(self):
        assert adjustment_proportion(ContingencyTable(10, 10, 10, 10)) == 0.0
        assert adjustment_proportion(ContingencyTable(20, 20, 20, 20)) == 0.0

    def test_no_privileged_favorable(self):
        with pytest.raises(ProportionError):
            adjustment_proportion(ContingencyTable(0, 10, 10, 10))


class TestContingencyTableInvariants:
    def test_negative_counts_rejected(self):
        with pytest.raises(SizeError):
            ContingencyTable(-1, 2, 3, 4)

    def test_empty_rejected(self):
        with pytest.raises(SizeError):
            ContingencyTable(0, 0, 0, 0)

    def test_marginals_derived(self):
        t = ContingencyTable(3, 4, 5, 6)
        assert (t.n_priv, t.n_unpriv, t.n_fav, t.n_unfav) == (7, 11, 8, 10)
        assert t.total == 18
