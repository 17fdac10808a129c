"""Input validation helpers shared across the package."""
from __future__ import annotations

import numpy as np

REGRESSION = "regression"
CLASSIFICATION = "classification"
TASKS = (REGRESSION, CLASSIFICATION)


def check_task(task: str) -> str:
    if task not in TASKS:
        raise ValueError(f"task must be one of {TASKS}, got {task!r}")
    return task


def as_float_matrix(x, name: str = "X") -> np.ndarray:
    """Coerce to a finite float64 2-D array, (n,) inputs become (n, 1)."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 1-D or 2-D, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError(f"{name} must be non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or infinite values")
    return arr


def as_label_vector(y, name: str = "y") -> np.ndarray:
    """Coerce class labels to a 1-D int64 array of non-negative indices."""
    arr = np.asarray(y)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr.ravel()
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if not np.issubdtype(arr.dtype, np.number):
        raise ValueError(f"{name} must be numeric class indices")
    if not np.all(np.isfinite(arr.astype(np.float64))):
        raise ValueError(f"{name} contains NaN or infinite values")
    out = arr.astype(np.int64)
    if np.any(out.astype(np.float64) != arr.astype(np.float64)):
        raise ValueError(f"{name} must contain integer class indices")
    if out.min() < 0:
        raise ValueError(f"{name} must contain non-negative class indices")
    return out


def check_same_rows(a: np.ndarray, b: np.ndarray, names: str = "X, y") -> None:
    if a.shape[0] != b.shape[0]:
        raise ValueError(
            f"{names} must have the same number of rows, got {a.shape[0]} and {b.shape[0]}"
        )


def check_positive_int(value, name: str) -> int:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def check_fraction(value, name: str) -> float:
    value = float(value)
    if not 0.0 < value < 1.0:
        raise ValueError(f"{name} must be strictly between 0 and 1, got {value}")
    return value
