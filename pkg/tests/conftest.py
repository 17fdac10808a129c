"""Shared fixtures: a hand-built reference tree and small deterministic datasets."""
from __future__ import annotations

import numpy as np
import pytest

from djinn import make_dataset
from djinn.tree import DecisionTree, TreeNode


def build_reference_tree() -> DecisionTree:
    """Three-feature, two-class tree exercising every wiring rule at once.

    Level 0 splits x0, level 1 splits x1, level 2 splits x0 again and x2,
    and one leaf sits at level 1, so the mapped network needs passthrough
    carriers, decision slots, a mid-depth leaf chain, and a free neuron.
    """
    def leaf(level: int, cls: int) -> TreeNode:
        return TreeNode(kind="leaf", level=level, value=cls)

    deep_left = TreeNode(kind="branch", level=2, feature_index=0, threshold=0.25,
                         left=leaf(3, 0), right=leaf(3, 1))
    deep_right = TreeNode(kind="branch", level=2, feature_index=2, threshold=0.75,
                          left=leaf(3, 0), right=leaf(3, 1))
    mid = TreeNode(kind="branch", level=1, feature_index=1, threshold=0.5,
                   left=deep_left, right=deep_right)
    root = TreeNode(kind="branch", level=0, feature_index=0, threshold=0.5,
                    left=mid, right=leaf(1, 0))
    return DecisionTree(root=root, max_depth=3, n_features=3, task="classification")


@pytest.fixture
def reference_tree() -> DecisionTree:
    return build_reference_tree()


def regression_arrays(n: int = 80, d: int = 4, seed: int = 0):
    """Smooth nonlinear surface with noise; keeps tiny trainings meaningful."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, 1.0, size=(n, d))
    y = 2.0 * x[:, 0] + 0.05 * rng.normal(size=n)
    if d > 1:
        y += np.sin(3.0 * x[:, 1])
    if d > 3:
        y -= x[:, 2] * x[:, 3]
    return x, y.reshape(-1, 1)


def classification_arrays(n_per_class: int = 20, d: int = 3, seed: int = 1):
    """Three well-separated Gaussian blobs."""
    rng = np.random.default_rng(seed)
    centers = np.array([[0.0] * d, [3.0] * d, [-3.0] * d])
    x = np.vstack([c + rng.normal(scale=0.6, size=(n_per_class, d))
                   for c in centers])
    y = np.repeat(np.arange(3), n_per_class)
    return x, y


@pytest.fixture
def regression_dataset():
    x, y = regression_arrays()
    return make_dataset(x, y, "regression")


@pytest.fixture
def classification_dataset():
    x, y = classification_arrays()
    return make_dataset(x, y, "classification")
