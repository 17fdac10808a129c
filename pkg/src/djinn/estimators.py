"""scikit-learn style estimator facade over the tree-to-network pipeline."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, RegressorMixin

from .data import make_dataset
from .ensemble import (
    SCHEMES,
    DjinnEnsemble,
    ForestConfig,
    build_and_train,
    predict_ensemble,
)
from .net import TrainingConfig
from .validation import CLASSIFICATION, REGRESSION, as_float_matrix


class _BaseDJINN(BaseEstimator):
    def __init__(self, n_trees=10, max_depth=5, min_leaf=1, bootstrap=True,
                 epochs=100, learning_rate=0.006, batch_size=32,
                 init_scheme="djinn", random_state=0, n_jobs=1):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.bootstrap = bootstrap
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.init_scheme = init_scheme
        self.random_state = random_state
        self.n_jobs = n_jobs

    _task = None

    def _fit(self, X, y) -> DjinnEnsemble:
        if self.init_scheme not in SCHEMES:
            raise ValueError(f"init_scheme must be one of {SCHEMES}")
        dataset = make_dataset(X, y, self._task)
        forest = ForestConfig(
            n_trees=self.n_trees,
            max_depth=self.max_depth,
            min_leaf=self.min_leaf,
            bootstrap=self.bootstrap,
        )
        config = TrainingConfig(
            epochs=self.epochs,
            learning_rate=self.learning_rate,
            batch_size=self.batch_size,
        )
        self.ensemble_ = build_and_train(dataset, forest, config,
                                         scheme=self.init_scheme,
                                         base_seed=self.random_state,
                                         n_jobs=self.n_jobs)
        self.n_features_in_ = dataset.n_features
        return self.ensemble_

    def _check_ready(self, X) -> np.ndarray:
        if not hasattr(self, "ensemble_"):
            raise RuntimeError("estimator is not fitted; call fit first")
        x = as_float_matrix(X, "X")
        if x.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {x.shape[1]} features; expected {self.n_features_in_}"
            )
        return x


class DJINNRegressor(_BaseDJINN, RegressorMixin):
    """Tree-initialized neural-network ensemble for regression."""

    _task = REGRESSION

    def fit(self, X, y):
        y = np.asarray(y, dtype=np.float64)
        self._y_was_1d = y.ndim == 1
        self._fit(X, y)
        return self

    def predict(self, X):
        x = self._check_ready(X)
        out = predict_ensemble(self.ensemble_, x)
        return out.ravel() if self._y_was_1d else out


class DJINNClassifier(_BaseDJINN, ClassifierMixin):
    """Tree-initialized neural-network ensemble for classification."""

    _task = CLASSIFICATION

    def fit(self, X, y):
        y = np.asarray(y)
        self.classes_ = np.unique(y)
        indices = np.searchsorted(self.classes_, y)
        self._fit(X, indices)
        return self

    def predict_proba(self, X):
        x = self._check_ready(X)
        return predict_ensemble(self.ensemble_, x)

    def predict(self, X):
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]
