"""Benchmark presets and the synthetic surface generator."""
from __future__ import annotations

import math

import numpy as np
import pytest

from djinn.presets import PRESETS, get_preset
from djinn.synthetic import make_cliff_peak

EXPECTED_NAMES = {
    "boston", "ca-housing", "diabetes", "synthetic-surface",
    "iris", "digits", "wine", "breast-cancer",
}


class TestPresets:
    def test_catalog_names(self):
        assert set(PRESETS) == EXPECTED_NAMES

    def test_every_preset_resolvable(self):
        for name in EXPECTED_NAMES:
            preset = get_preset(name)
            assert preset.name == name

    def test_unknown_name_lists_catalog(self):
        with pytest.raises(ValueError, match="unknown preset 'mnist'"):
            get_preset("mnist")
        with pytest.raises(ValueError, match="iris"):
            get_preset("mnist")

    def test_fields_sane(self):
        for preset in PRESETS.values():
            assert preset.task in ("regression", "classification")
            assert preset.data_file.endswith(".csv")
            assert preset.target_columns == ("target",)
            assert preset.n_trees >= 1
            assert preset.max_depth >= 1
            assert preset.epochs >= 1
            assert 0.0 < preset.learning_rate < 1.0
            assert preset.batch_size >= 1

    def test_classification_trees_are_shallower(self):
        deepest_cls = max(p.max_depth for p in PRESETS.values()
                          if p.task == "classification")
        assert deepest_cls <= min(p.max_depth for p in PRESETS.values()
                                  if p.task == "regression")


class TestCliffPeak:
    def test_shapes_and_ranges(self):
        x, y = make_cliff_peak(n_samples=200, n_features=6, seed=1)
        assert x.shape == (200, 6)
        assert y.shape == (200, 1)
        assert x.min() >= 0.0 and x.max() <= 1.0

    def test_deterministic(self):
        a = make_cliff_peak(n_samples=50, seed=3)
        b = make_cliff_peak(n_samples=50, seed=3)
        np.testing.assert_array_equal(a[0], b[0])
        np.testing.assert_array_equal(a[1], b[1])

    def test_formula_spot_check(self):
        x, y = make_cliff_peak(n_samples=40, n_features=5, seed=2)
        i = 17
        cliff = 4.0 / (1.0 + math.exp(-20.0 * (x[i, 0] - 0.5)))
        peak = 3.0 * math.exp(-((x[i, 1] - 0.7) ** 2 + (x[i, 2] - 0.3) ** 2) / 0.08)
        interaction = 1.5 * x[i, 3] * x[i, 4]
        assert y[i, 0] == pytest.approx(cliff + peak + interaction, abs=1e-12)

    def test_noise_changes_targets_only(self):
        clean = make_cliff_peak(n_samples=60, seed=4)
        noisy = make_cliff_peak(n_samples=60, noise=0.5, seed=4)
        np.testing.assert_array_equal(clean[0], noisy[0])
        assert not np.allclose(clean[1], noisy[1])

    def test_needs_five_inputs(self):
        with pytest.raises(ValueError, match=">= 5"):
            make_cliff_peak(n_samples=10, n_features=4)
