import numpy as np
import pytest

from cotune import classifier as clf
from cotune._kernels import BACKEND, logistic_loss_grad, train_logistic_numpy
from cotune.errors import ConfigError, ShapeError, TrainingError
from cotune.tabular import Dataset, Schema, SensitiveAttribute, SynthSpec, synthesize


def one_feature_dataset(x, y, a=None):
    x = np.asarray(x, dtype=np.float64)
    a = np.zeros(len(x), dtype=np.int64) if a is None else np.asarray(a)
    schema = Schema("y", "1", (SensitiveAttribute("a", "1"),), ("x",))
    return Dataset(x[:, None], {"a": a}, np.asarray(y), schema)


@pytest.fixture
def separable():
    x = np.array([-3.0, -2.5, -2.0, -1.5, 1.5, 2.0, 2.5, 3.0])
    y = np.array([0, 0, 0, 0, 1, 1, 1, 1])
    a = np.array([0, 1, 0, 1, 0, 1, 0, 1])
    return one_feature_dataset(x, y, a)


class TestFit:
    def test_separable_perfect_training_accuracy(self, separable):
        model = clf.fit(separable, seed=0)
        pred = clf.predict(model, separable)
        assert np.array_equal(pred, separable.labels)

    def test_single_class_rejected(self):
        d = one_feature_dataset([1.0, 2.0, 3.0], [1, 1, 1])
        with pytest.raises(TrainingError):
            clf.fit(d, seed=0)

    def test_beats_majority_on_synthetic(self):
        d = synthesize(SynthSpec(counts=(300, 200, 100, 400), feature_dim=3, group_signal=1.0, noise_sd=1.0, seed=0))
        model = clf.fit(d, seed=0)
        accuracy = float((clf.predict(model, d) == d.labels).mean())
        majority = max(d.labels.mean(), 1 - d.labels.mean())
        assert accuracy > majority

    def test_deterministic(self, separable):
        m1 = clf.fit(separable, seed=0)
        m2 = clf.fit(separable, seed=0)
        assert np.array_equal(m1.weights, m2.weights)
        assert m1.bias == m2.bias

    def test_loss_non_increasing(self):
        d = synthesize(SynthSpec(counts=(30, 20, 10, 40), feature_dim=3, seed=1))
        model = clf.fit(d, seed=0)
        assert np.all(np.diff(model.training_losses) <= 1e-9)

    def test_constant_column_gets_unit_sd(self, separable):
        # sensitive column enters the design matrix; make it constant
        d = one_feature_dataset([-2.0, -1.0, 1.0, 2.0], [0, 0, 1, 1])
        model = clf.fit(d, seed=0)
        assert model.feature_sds[-1] == 1.0

    def test_standardization_idempotent(self):
        d = synthesize(SynthSpec(counts=(30, 20, 10, 40), feature_dim=3, seed=2))
        feats = np.asarray(d.features)
        standardized = (feats - feats.mean(axis=0)) / feats.std(axis=0)
        d_std = Dataset(standardized, dict(d.sensitive), d.labels, d.schema)
        pred_raw = clf.predict(clf.fit(d, seed=0), d)
        pred_std = clf.predict(clf.fit(d_std, seed=0), d_std)
        assert np.array_equal(pred_raw, pred_std)

    def test_sensitive_excluded_when_configured(self, separable):
        cfg = clf.ClassifierConfig(include_sensitive_as_features=False)
        model = clf.fit(separable, cfg, seed=0)
        assert model.weights.shape == (1,)

    def test_config_validation(self):
        with pytest.raises(ConfigError):
            clf.ClassifierConfig(learning_rate=0.0)
        with pytest.raises(ConfigError):
            clf.ClassifierConfig(epochs=0)
        with pytest.raises(ConfigError):
            clf.ClassifierConfig(threshold=1.0)


class TestPredict:
    def test_zero_model_ties_map_to_one(self, separable):
        model = clf.TrainedModel(
            weights=np.zeros(2),
            bias=0.0,
            feature_means=np.zeros(2),
            feature_sds=np.ones(2),
            training_losses=np.array([]),
            config=clf.ClassifierConfig(),
        )
        assert np.array_equal(clf.predict(model, separable), np.ones(separable.n_rows, dtype=np.int64))

    def test_pure(self, separable):
        model = clf.fit(separable, seed=0)
        assert np.array_equal(clf.predict(model, separable), clf.predict(model, separable))

    def test_dimension_mismatch(self, separable):
        model = clf.fit(separable, seed=0)
        other = synthesize(SynthSpec(counts=(5, 5, 5, 5), feature_dim=4, seed=0))
        with pytest.raises(ShapeError):
            clf.predict(model, other)


class TestGradient:
    def test_matches_central_differences(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            n, d = int(rng.integers(4, 12)), int(rng.integers(1, 4))
            X = rng.normal(size=(n, d))
            y = rng.integers(0, 2, size=n).astype(np.float64)
            if y.min() == y.max():
                continue
            w = rng.normal(scale=0.5, size=d)
            b = float(rng.normal(scale=0.5))
            l2 = 1e-3
            _, grad_w, grad_b = logistic_loss_grad(w, b, X, y, l2)
            eps = 1e-6
            for j in range(d):
                wp, wm = w.copy(), w.copy()
                wp[j] += eps
                wm[j] -= eps
                fd = (logistic_loss_grad(wp, b, X, y, l2)[0] - logistic_loss_grad(wm, b, X, y, l2)[0]) / (2 * eps)
                assert grad_w[j] == pytest.approx(fd, rel=1e-5, abs=1e-8)
            fd_b = (logistic_loss_grad(w, b + eps, X, y, l2)[0] - logistic_loss_grad(w, b - eps, X, y, l2)[0]) / (2 * eps)
            assert grad_b == pytest.approx(fd_b, rel=1e-5, abs=1e-8)


class TestBackends:
    def test_active_backend_known(self):
        assert BACKEND in ("numba", "numpy")

    def test_paths_agree(self):
        rng = np.random.default_rng(5)
        X = rng.normal(size=(200, 4))
        y = (rng.random(200) < 0.5).astype(np.float64)
        from cotune._kernels import train_logistic

        w1, b1, l1 = train_logistic(X, y, 0.1, 50, 1e-4)
        w2, b2, l2 = train_logistic_numpy(X, y, 0.1, 50, 1e-4)
        assert np.allclose(w1, w2, atol=1e-10)
        assert b1 == pytest.approx(b2, abs=1e-10)
        assert np.allclose(l1, l2, atol=1e-10)
