"""Estimator facade: sklearn protocol compliance and prediction shapes."""
from __future__ import annotations

import numpy as np
import pytest
from sklearn.base import clone

from djinn.estimators import DJINNClassifier, DJINNRegressor


def tiny_regressor(**overrides):
    params = dict(n_trees=3, max_depth=3, epochs=5, batch_size=16)
    params.update(overrides)
    return DJINNRegressor(**params)


def tiny_classifier(**overrides):
    params = dict(n_trees=3, max_depth=3, epochs=8, batch_size=16)
    params.update(overrides)
    return DJINNClassifier(**params)


class TestSklearnProtocol:
    def test_get_params_round_trip(self):
        est = tiny_regressor(learning_rate=0.02, random_state=4)
        params = est.get_params()
        assert params["n_trees"] == 3
        assert params["learning_rate"] == 0.02
        assert params["random_state"] == 4
        rebuilt = DJINNRegressor(**params)
        assert rebuilt.get_params() == params

    def test_set_params_returns_self(self):
        est = tiny_regressor()
        assert est.set_params(epochs=9) is est
        assert est.epochs == 9

    def test_clone(self):
        est = tiny_classifier(init_scheme="random_dense")
        copy = clone(est)
        assert copy is not est
        assert copy.get_params() == est.get_params()


class TestRegressor:
    def test_fit_returns_self_and_predicts_1d(self, regression_dataset):
        x = regression_dataset.features
        y = regression_dataset.targets[:, 0]
        est = tiny_regressor()
        assert est.fit(x, y) is est
        pred = est.predict(x[:12])
        assert pred.shape == (12,)

    def test_2d_targets_stay_2d(self, regression_dataset):
        x = regression_dataset.features
        y = regression_dataset.targets
        pred = tiny_regressor().fit(x, y).predict(x[:12])
        assert pred.shape == (12, 1)

    def test_score_runs(self, regression_dataset):
        x = regression_dataset.features
        y = regression_dataset.targets[:, 0]
        score = tiny_regressor(epochs=20).fit(x, y).score(x, y)
        assert np.isfinite(score)

    def test_deterministic_across_fits(self, regression_dataset):
        x = regression_dataset.features
        y = regression_dataset.targets[:, 0]
        a = tiny_regressor(random_state=2).fit(x, y).predict(x[:6])
        b = tiny_regressor(random_state=2).fit(x, y).predict(x[:6])
        np.testing.assert_array_equal(a, b)


class TestClassifier:
    def test_predict_uses_original_labels(self, classification_dataset):
        x = classification_dataset.features
        # relabel classes {0,1,2} to the non-contiguous set {2,7,9}
        y = np.array([2, 7, 9])[classification_dataset.targets]
        est = tiny_classifier().fit(x, y)
        np.testing.assert_array_equal(est.classes_, [2, 7, 9])
        pred = est.predict(x[:15])
        assert set(np.unique(pred)) <= {2, 7, 9}

    def test_predict_proba_rows_sum_to_one(self, classification_dataset):
        x = classification_dataset.features
        y = classification_dataset.targets
        probs = tiny_classifier().fit(x, y).predict_proba(x[:9])
        assert probs.shape == (9, 3)
        np.testing.assert_allclose(probs.sum(axis=1), np.ones(9), atol=1e-12)

    def test_predict_is_argmax_of_proba(self, classification_dataset):
        x = classification_dataset.features
        y = classification_dataset.targets
        est = tiny_classifier().fit(x, y)
        labels = est.predict(x[:9])
        np.testing.assert_array_equal(
            labels, est.classes_[np.argmax(est.predict_proba(x[:9]), axis=1)]
        )

    def test_score_reaches_training_data(self, classification_dataset):
        x = classification_dataset.features
        y = classification_dataset.targets
        score = tiny_classifier(epochs=60).fit(x, y).score(x, y)
        assert score >= 0.9


class TestValidation:
    def test_unfitted_predict_rejected(self, regression_dataset):
        with pytest.raises(RuntimeError, match="not fitted"):
            tiny_regressor().predict(regression_dataset.features[:2])

    def test_feature_count_mismatch(self, regression_dataset):
        x = regression_dataset.features
        y = regression_dataset.targets[:, 0]
        est = tiny_regressor().fit(x, y)
        with pytest.raises(ValueError, match="expected 4"):
            est.predict(x[:3, :2])

    def test_invalid_init_scheme(self, regression_dataset):
        est = tiny_regressor(init_scheme="orthogonal")
        with pytest.raises(ValueError, match="init_scheme"):
            est.fit(regression_dataset.features, regression_dataset.targets[:, 0])
