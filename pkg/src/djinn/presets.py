"""Per-dataset training presets so benchmark runs need no manual entry."""
from __future__ import annotations

from dataclasses import dataclass

from .validation import CLASSIFICATION, REGRESSION


@dataclass(frozen=True)
class Preset:
    name: str
    task: str
    data_file: str
    target_columns: tuple[str, ...]
    n_trees: int
    max_depth: int
    epochs: int
    learning_rate: float
    batch_size: int


PRESETS: dict[str, Preset] = {
    p.name: p
    for p in (
        Preset("boston", REGRESSION, "boston.csv", ("target",), 10, 5, 300, 0.006, 21),
        Preset("ca-housing", REGRESSION, "ca_housing.csv", ("target",), 10, 5, 200, 0.006, 826),
        Preset("diabetes", REGRESSION, "diabetes.csv", ("target",), 10, 5, 50, 0.0001, 1),
        Preset("synthetic-surface", REGRESSION, "synthetic_surface.csv", ("target",),
               10, 5, 300, 0.008, 1857),
        Preset("iris", CLASSIFICATION, "iris.csv", ("target",), 10, 3, 100, 0.006, 6),
        Preset("digits", CLASSIFICATION, "digits.csv", ("target",), 10, 3, 300, 0.003, 72),
        Preset("wine", CLASSIFICATION, "wine.csv", ("target",), 10, 3, 50, 0.004, 8),
        Preset("breast-cancer", CLASSIFICATION, "breast_cancer.csv", ("target",),
               10, 4, 100, 0.006, 7),
    )
}


def get_preset(name: str) -> Preset:
    if name not in PRESETS:
        known = ", ".join(sorted(PRESETS))
        raise ValueError(f"unknown preset {name!r}; available: {known}")
    return PRESETS[name]
