"""CSV ingestion, (0,1) feature scaling, and reusable train/test split plans."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .validation import (
    CLASSIFICATION,
    REGRESSION,
    as_float_matrix,
    as_label_vector,
    check_fraction,
    check_positive_int,
    check_same_rows,
    check_task,
)


@dataclass
class Dataset:
    """Immutable tabular dataset.

    targets is (n, n_targets) float for regression and (n,) int class
    indices for classification; n_classes is None for regression.
    """

    features: np.ndarray
    targets: np.ndarray
    task: str
    n_classes: int | None = None
    feature_names: list[str] = field(default_factory=list)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_outputs(self) -> int:
        """Output width of a model for this dataset."""
        if self.task == CLASSIFICATION:
            return int(self.n_classes)
        return self.targets.shape[1]


def make_dataset(features, targets, task: str, n_classes: int | None = None,
                 feature_names: list[str] | None = None) -> Dataset:
    """Validate arrays and assemble a Dataset, enforcing its invariants."""
    check_task(task)
    features = as_float_matrix(features, "features")
    if task == CLASSIFICATION:
        targets = as_label_vector(targets, "targets")
        if n_classes is None:
            n_classes = int(targets.max()) + 1
        if targets.max() >= n_classes:
            raise ValueError(
                f"class index {targets.max()} out of range for n_classes={n_classes}"
            )
    else:
        targets = as_float_matrix(targets, "targets")
        n_classes = None
    check_same_rows(features, targets, "features, targets")
    if features.shape[0] < 2:
        raise ValueError("dataset must contain at least 2 samples")
    if feature_names is None:
        feature_names = [f"x{i}" for i in range(features.shape[1])]
    if len(feature_names) != features.shape[1]:
        raise ValueError("feature_names length does not match feature count")
    # freeze the arrays so the dataset can be shared across workers
    features = features.copy()
    targets = targets.copy()
    features.setflags(write=False)
    targets.setflags(write=False)
    return Dataset(features, targets, task, n_classes, list(feature_names))


def load_csv(path, target_columns: list[str] | str, task: str) -> Dataset:
    """Load a UTF-8 CSV with a header row into a Dataset.

    Features are all non-target columns in header order. Classification
    uses exactly one target column whose labels (numeric or string) are
    mapped to contiguous class indices by first appearance.
    """
    check_task(task)
    if isinstance(target_columns, str):
        target_columns = [target_columns]
    if len(target_columns) == 0:
        raise ValueError("at least one target column is required")
    if task == CLASSIFICATION and len(target_columns) != 1:
        raise ValueError("classification requires exactly one target column")

    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r]
    if not rows:
        raise ValueError(f"empty file: {path}")
    header = [h.strip() for h in rows[0]]
    for col in target_columns:
        if col not in header:
            raise ValueError(f"missing target column {col!r} in {path}")
    target_idx = [header.index(c) for c in target_columns]
    feature_idx = [i for i in range(len(header)) if i not in target_idx]
    if not feature_idx:
        raise ValueError("no feature columns left after removing targets")

    def parse_cell(text: str, row: int, col: int) -> float:
        try:
            value = float(text)
        except ValueError:
            value = float("nan")
        if not np.isfinite(value):
            raise ValueError(
                f"non-numeric cell at row {row}, column {header[col]!r}"
            )
        return value

    n = len(rows) - 1
    features = np.empty((n, len(feature_idx)), dtype=np.float64)
    for r, row in enumerate(rows[1:], start=1):
        if len(row) != len(header):
            raise ValueError(f"row {r} has {len(row)} cells, expected {len(header)}")
        for j, c in enumerate(feature_idx):
            features[r - 1, j] = parse_cell(row[c].strip(), r, c)

    if task == CLASSIFICATION:
        c = target_idx[0]
        labels: dict[str, int] = {}
        targets = np.empty(n, dtype=np.int64)
        for r, row in enumerate(rows[1:], start=1):
            key = row[c].strip()
            if key not in labels:
                labels[key] = len(labels)
            targets[r - 1] = labels[key]
        n_classes = len(labels)
    else:
        targets = np.empty((n, len(target_idx)), dtype=np.float64)
        for r, row in enumerate(rows[1:], start=1):
            for j, c in enumerate(target_idx):
                targets[r - 1, j] = parse_cell(row[c].strip(), r, c)
        n_classes = None

    names = [header[i] for i in feature_idx]
    return make_dataset(features, targets, task, n_classes, names)


def subset_dataset(ds: Dataset, indices) -> Dataset:
    """Row subset as a new Dataset (used for train/test folds)."""
    idx = np.asarray(indices, dtype=np.int64)
    return make_dataset(
        ds.features[idx], ds.targets[idx], ds.task, ds.n_classes, ds.feature_names
    )


@dataclass
class ScalingParams:
    """Per-feature min/max fitted on training rows only."""

    minimum: np.ndarray
    maximum: np.ndarray


def fit_scaler(train_features) -> ScalingParams:
    x = as_float_matrix(train_features, "train_features")
    return ScalingParams(x.min(axis=0), x.max(axis=0))


def apply_scaler(features, params: ScalingParams) -> np.ndarray:
    """Map x to (x - min)/(max - min); constant columns map to 0, no clipping."""
    x = as_float_matrix(features, "features")
    if x.shape[1] != params.minimum.shape[0]:
        raise ValueError(
            f"feature count {x.shape[1]} does not match scaler ({params.minimum.shape[0]})"
        )
    span = params.maximum - params.minimum
    safe = np.where(span == 0.0, 1.0, span)
    scaled = (x - params.minimum) / safe
    return np.where(span == 0.0, 0.0, scaled)


def invert_scaler(scaled, params: ScalingParams) -> np.ndarray:
    """Inverse of apply_scaler; constant columns recover their min value."""
    x = as_float_matrix(scaled, "scaled")
    if x.shape[1] != params.minimum.shape[0]:
        raise ValueError(
            f"feature count {x.shape[1]} does not match scaler ({params.minimum.shape[0]})"
        )
    return x * (params.maximum - params.minimum) + params.minimum


@dataclass
class SplitPlan:
    """Reusable list of (train_indices, test_indices) permutations."""

    permutations: list[tuple[np.ndarray, np.ndarray]]
    seed: int
    test_fraction: float
    n_samples: int


def make_splits(n_samples: int, n_permutations: int, test_fraction: float,
                seed: int = 0) -> SplitPlan:
    """Independent seeded shuffles; permutation i uses seed + i.

    Test size is round(test_fraction * n_samples), clamped to [1, n - 1].
    """
    n_samples = check_positive_int(n_samples, "n_samples")
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    n_permutations = check_positive_int(n_permutations, "n_permutations")
    test_fraction = check_fraction(test_fraction, "test_fraction")
    n_test = int(round(test_fraction * n_samples))
    n_test = min(max(n_test, 1), n_samples - 1)
    permutations = []
    for i in range(n_permutations):
        order = np.random.default_rng(seed + i).permutation(n_samples)
        test = np.sort(order[:n_test])
        train = np.sort(order[n_test:])
        permutations.append((train, test))
    return SplitPlan(permutations, int(seed), test_fraction, n_samples)


def split_plan_to_dict(plan: SplitPlan) -> dict:
    return {
        "seed": plan.seed,
        "test_fraction": plan.test_fraction,
        "n_samples": plan.n_samples,
        "permutations": [
            {"train": train.tolist(), "test": test.tolist()}
            for train, test in plan.permutations
        ],
    }


def split_plan_from_dict(payload: dict) -> SplitPlan:
    perms = [
        (np.asarray(p["train"], dtype=np.int64), np.asarray(p["test"], dtype=np.int64))
        for p in payload["permutations"]
    ]
    return SplitPlan(perms, int(payload["seed"]), float(payload["test_fraction"]),
                     int(payload["n_samples"]))


def save_split_plan(plan: SplitPlan, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(split_plan_to_dict(plan), fh, indent=2)


def load_split_plan(path) -> SplitPlan:
    with open(path, encoding="utf-8") as fh:
        return split_plan_from_dict(json.load(fh))
