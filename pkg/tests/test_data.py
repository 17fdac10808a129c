"""Dataset assembly, CSV ingestion, scaling, and split plans."""
from __future__ import annotations

import csv

import numpy as np
import pytest

from djinn.data import (
    ScalingParams,
    apply_scaler,
    fit_scaler,
    invert_scaler,
    load_csv,
    load_split_plan,
    make_dataset,
    make_splits,
    save_split_plan,
    subset_dataset,
)
from djinn.validation import (
    as_float_matrix,
    as_label_vector,
    check_fraction,
    check_positive_int,
)


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


class TestMakeDataset:
    def test_regression_promotes_1d_targets(self):
        ds = make_dataset([[0.0, 1.0], [2.0, 3.0]], [1.0, 2.0], "regression")
        assert ds.targets.shape == (2, 1)
        assert ds.n_outputs == 1
        assert ds.n_classes is None

    def test_arrays_are_frozen(self):
        ds = make_dataset([[0.0], [1.0]], [1.0, 2.0], "regression")
        with pytest.raises(ValueError):
            ds.features[0, 0] = 5.0
        with pytest.raises(ValueError):
            ds.targets[0] = 5.0

    def test_classification_infers_class_count(self):
        ds = make_dataset([[0.0], [1.0], [2.0]], [0, 2, 1], "classification")
        assert ds.n_classes == 3
        assert ds.n_outputs == 3
        assert ds.targets.dtype == np.int64

    def test_class_index_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            make_dataset([[0.0], [1.0]], [0, 3], "classification", n_classes=2)

    def test_rejects_small_and_malformed_inputs(self):
        with pytest.raises(ValueError, match="at least 2 samples"):
            make_dataset([[1.0]], [1.0], "regression")
        with pytest.raises(ValueError, match="NaN"):
            make_dataset([[np.nan], [1.0]], [0.0, 1.0], "regression")
        with pytest.raises(ValueError, match="same number of rows"):
            make_dataset([[0.0], [1.0], [2.0]], [1.0, 2.0], "regression")
        with pytest.raises(ValueError, match="task"):
            make_dataset([[0.0], [1.0]], [0.0, 1.0], "ranking")
        with pytest.raises(ValueError, match="feature_names"):
            make_dataset([[0.0], [1.0]], [0.0, 1.0], "regression",
                         feature_names=["a", "b"])

    def test_default_feature_names(self):
        ds = make_dataset([[0.0, 1.0], [2.0, 3.0]], [0.0, 1.0], "regression")
        assert ds.feature_names == ["x0", "x1"]


class TestLoadCsv:
    def test_regression_round_trip(self, tmp_path):
        path = tmp_path / "data.csv"
        write_csv(path, ["a", "target", "b"],
                  [[1.0, 10.0, 2.0], [3.0, 20.0, 4.0], [5.0, 30.0, 6.0]])
        ds = load_csv(path, ["target"], "regression")
        assert ds.feature_names == ["a", "b"]
        np.testing.assert_array_equal(ds.features, [[1, 2], [3, 4], [5, 6]])
        np.testing.assert_array_equal(ds.targets, [[10], [20], [30]])

    def test_multi_target_regression(self, tmp_path):
        path = tmp_path / "data.csv"
        write_csv(path, ["x", "u", "v"], [[1, 2, 3], [4, 5, 6]])
        ds = load_csv(path, ["u", "v"], "regression")
        assert ds.targets.shape == (2, 2)
        assert ds.n_outputs == 2

    def test_string_labels_indexed_by_first_appearance(self, tmp_path):
        path = tmp_path / "data.csv"
        write_csv(path, ["x", "label"],
                  [[0.0, "setosa"], [1.0, "virginica"], [2.0, "setosa"],
                   [3.0, "versicolor"]])
        ds = load_csv(path, "label", "classification")
        np.testing.assert_array_equal(ds.targets, [0, 1, 0, 2])
        assert ds.n_classes == 3

    def test_error_messages(self, tmp_path):
        path = tmp_path / "data.csv"
        write_csv(path, ["a", "target"], [[1.0, 2.0], ["oops", 3.0]])
        with pytest.raises(ValueError, match="non-numeric cell at row 2, column 'a'"):
            load_csv(path, ["target"], "regression")

        write_csv(path, ["a", "target"], [[1.0, 2.0], [3.0]])
        with pytest.raises(ValueError, match="row 2 has 1 cells, expected 2"):
            load_csv(path, ["target"], "regression")

        write_csv(path, ["a", "target"], [[1.0, 2.0], [3.0, 4.0]])
        with pytest.raises(ValueError, match="missing target column 'z'"):
            load_csv(path, ["z"], "regression")
        with pytest.raises(ValueError, match="exactly one target"):
            load_csv(path, ["a", "target"], "classification")
        with pytest.raises(ValueError, match="no feature columns"):
            load_csv(path, ["a", "target"], "regression")

        path.write_text("")
        with pytest.raises(ValueError, match="empty file"):
            load_csv(path, ["target"], "regression")

        with pytest.raises(FileNotFoundError):
            load_csv(tmp_path / "missing.csv", ["target"], "regression")

    def test_infinite_value_rejected(self, tmp_path):
        path = tmp_path / "data.csv"
        write_csv(path, ["a", "target"], [[1.0, 2.0], ["inf", 3.0]])
        with pytest.raises(ValueError, match="non-numeric cell"):
            load_csv(path, ["target"], "regression")


def test_subset_dataset_selects_rows(classification_dataset):
    sub = subset_dataset(classification_dataset, [0, 5, 40])
    assert sub.n_samples == 3
    np.testing.assert_array_equal(
        sub.features, classification_dataset.features[[0, 5, 40]])
    assert sub.n_classes == classification_dataset.n_classes


class TestScaler:
    def test_train_rows_map_into_unit_interval(self):
        rng = np.random.default_rng(7)
        x = rng.normal(size=(30, 4)) * 10.0
        params = fit_scaler(x)
        scaled = apply_scaler(x, params)
        assert scaled.min() == 0.0
        assert scaled.max() == 1.0
        np.testing.assert_allclose(scaled.min(axis=0), 0.0)
        np.testing.assert_allclose(scaled.max(axis=0), 1.0)

    def test_constant_column_maps_to_zero(self):
        x = np.array([[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]])
        scaled = apply_scaler(x, fit_scaler(x))
        np.testing.assert_array_equal(scaled[:, 1], 0.0)

    def test_unseen_rows_are_not_clipped(self):
        params = fit_scaler(np.array([[0.0], [10.0]]))
        scaled = apply_scaler(np.array([[20.0], [-10.0]]), params)
        np.testing.assert_allclose(scaled.ravel(), [2.0, -1.0])

    def test_invert_round_trip(self):
        rng = np.random.default_rng(11)
        x = rng.normal(size=(20, 3))
        params = fit_scaler(x)
        np.testing.assert_allclose(invert_scaler(apply_scaler(x, params), params), x)

    def test_invert_constant_column_recovers_minimum(self):
        params = ScalingParams(np.array([4.0]), np.array([4.0]))
        np.testing.assert_allclose(invert_scaler([[0.0], [0.7]], params), [[4.0], [4.0]])

    def test_feature_count_mismatch(self):
        params = fit_scaler(np.zeros((3, 2)) + [[0], [1], [2]])
        with pytest.raises(ValueError, match="does not match scaler"):
            apply_scaler(np.zeros((2, 3)), params)
        with pytest.raises(ValueError, match="does not match scaler"):
            invert_scaler(np.zeros((2, 3)), params)


class TestMakeSplits:
    def test_partition_properties(self):
        plan = make_splits(50, 5, 0.2, seed=3)
        assert len(plan.permutations) == 5
        for train, test in plan.permutations:
            assert test.size == 10
            assert train.size == 40
            assert np.intersect1d(train, test).size == 0
            np.testing.assert_array_equal(np.union1d(train, test), np.arange(50))
            np.testing.assert_array_equal(train, np.sort(train))
            np.testing.assert_array_equal(test, np.sort(test))

    def test_permutations_differ_but_runs_repeat(self):
        plan_a = make_splits(40, 3, 0.25, seed=9)
        plan_b = make_splits(40, 3, 0.25, seed=9)
        for (tr_a, te_a), (tr_b, te_b) in zip(plan_a.permutations, plan_b.permutations):
            np.testing.assert_array_equal(tr_a, tr_b)
            np.testing.assert_array_equal(te_a, te_b)
        tests = [tuple(te) for _, te in plan_a.permutations]
        assert len(set(tests)) == 3

    def test_test_size_clamps(self):
        plan = make_splits(2, 1, 0.01, seed=0)
        assert plan.permutations[0][1].size == 1
        plan = make_splits(3, 1, 0.99, seed=0)
        assert plan.permutations[0][1].size == 2

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            make_splits(1, 1, 0.2)
        with pytest.raises(ValueError):
            make_splits(10, 0, 0.2)
        with pytest.raises(ValueError):
            make_splits(10, 1, 1.0)

    def test_json_round_trip(self, tmp_path):
        plan = make_splits(20, 2, 0.3, seed=5)
        path = tmp_path / "plan.json"
        save_split_plan(plan, path)
        loaded = load_split_plan(path)
        assert loaded.seed == plan.seed
        assert loaded.n_samples == plan.n_samples
        for (tr_a, te_a), (tr_b, te_b) in zip(plan.permutations, loaded.permutations):
            np.testing.assert_array_equal(tr_a, tr_b)
            np.testing.assert_array_equal(te_a, te_b)


class TestValidationHelpers:
    def test_as_float_matrix(self):
        assert as_float_matrix([1.0, 2.0]).shape == (2, 1)
        with pytest.raises(ValueError, match="1-D or 2-D"):
            as_float_matrix(np.zeros((2, 2, 2)))
        with pytest.raises(ValueError, match="non-empty"):
            as_float_matrix(np.zeros((0, 3)))

    def test_as_label_vector(self):
        np.testing.assert_array_equal(as_label_vector([[0], [2]]), [0, 2])
        with pytest.raises(ValueError, match="non-negative"):
            as_label_vector([0, -1])
        with pytest.raises(ValueError, match="integer class indices"):
            as_label_vector([0.5, 1.0])
        with pytest.raises(ValueError, match="numeric"):
            as_label_vector(["a", "b"])

    def test_check_positive_int(self):
        assert check_positive_int(3, "k") == 3
        for bad in (0, -1, 2.0, True, "3"):
            with pytest.raises(ValueError, match="positive integer"):
                check_positive_int(bad, "k")

    def test_check_fraction(self):
        assert check_fraction(0.2, "f") == 0.2
        for bad in (0.0, 1.0, -0.5):
            with pytest.raises(ValueError):
                check_fraction(bad, "f")
