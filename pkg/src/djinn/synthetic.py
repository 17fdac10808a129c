"""Synthetic regression surface with a cliff and a localized peak.

Stands in for proprietary physics-simulation response surfaces: a steep
sigmoidal transition in one input, a narrow Gaussian bump over two others,
a bilinear interaction, and inert remaining dimensions.
"""
from __future__ import annotations

import numpy as np

from .validation import check_positive_int


def make_cliff_peak(n_samples: int = 5000, n_features: int = 6, noise: float = 0.0,
                    seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Sample inputs uniformly on [0,1]^d and return (features, targets).

    y = 4 * sigmoid(20 (x0 - 0.5))
      + 3 * exp(-((x1 - 0.7)^2 + (x2 - 0.3)^2) / 0.08)
      + 1.5 * x3 * x4
      + noise * N(0, 1)
    """
    check_positive_int(n_samples, "n_samples")
    n_features = check_positive_int(n_features, "n_features")
    if n_features < 5:
        raise ValueError("the surface uses 5 inputs; n_features must be >= 5")
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, 1.0, size=(n_samples, n_features))
    cliff = 4.0 / (1.0 + np.exp(-20.0 * (x[:, 0] - 0.5)))
    peak = 3.0 * np.exp(-((x[:, 1] - 0.7) ** 2 + (x[:, 2] - 0.3) ** 2) / 0.08)
    interaction = 1.5 * x[:, 3] * x[:, 4]
    y = cliff + peak + interaction
    if noise > 0.0:
        y = y + noise * rng.normal(size=n_samples)
    return x, y.reshape(-1, 1)
