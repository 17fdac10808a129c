#!/usr/bin/env python3
"""Materialize the benchmark datasets as CSVs under data/.

Five datasets ship with scikit-learn and always succeed. Boston housing and
California housing must be downloaded (Boston additionally requires the
original CMU archive because modern scikit-learn removed the loader); when
the network or loader is unavailable this script reports the failure and
continues, and any benchmark needing those files will fail with a clear
message until they are provided.
"""
from __future__ import annotations

import csv
import os
import sys

import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))
DATA_DIR = os.path.join(os.path.dirname(HERE), "data")


def write_csv(name: str, features: np.ndarray, target: np.ndarray,
              feature_names: list[str]) -> None:
    path = os.path.join(DATA_DIR, name)
    target = np.asarray(target)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([*feature_names, "target"])
        for row, y in zip(features, target):
            writer.writerow([*(repr(float(v)) for v in row),
                             int(y) if np.issubdtype(target.dtype, np.integer) else repr(float(y))])
    print(f"wrote {path} ({features.shape[0]} rows, {features.shape[1]} features)")


def bundled() -> None:
    from sklearn import datasets

    iris = datasets.load_iris()
    write_csv("iris.csv", iris.data, iris.target,
              [n.replace(" (cm)", "").replace(" ", "_") for n in iris.feature_names])

    digits = datasets.load_digits()
    write_csv("digits.csv", digits.data, digits.target,
              [f"p{i}" for i in range(digits.data.shape[1])])

    wine = datasets.load_wine()
    write_csv("wine.csv", wine.data, wine.target,
              [n.replace("/", "_").replace(" ", "_") for n in wine.feature_names])

    cancer = datasets.load_breast_cancer()
    write_csv("breast_cancer.csv", cancer.data, cancer.target,
              [n.replace(" ", "_") for n in cancer.feature_names])

    diabetes = datasets.load_diabetes()
    write_csv("diabetes.csv", diabetes.data, diabetes.target,
              list(diabetes.feature_names))


def synthetic() -> None:
    sys.path.insert(0, os.path.join(os.path.dirname(HERE), "src"))
    from djinn.synthetic import make_cliff_peak

    x, y = make_cliff_peak(n_samples=5000, n_features=6, noise=0.05, seed=0)
    write_csv("synthetic_surface.csv", x, y.ravel(),
              [f"x{i}" for i in range(x.shape[1])])


def fetched() -> None:
    try:
        from sklearn.datasets import fetch_california_housing

        housing = fetch_california_housing()
        write_csv("ca_housing.csv", housing.data, housing.target,
                  list(housing.feature_names))
    except Exception as exc:  # network or cache failure
        print(f"SKIPPED ca_housing.csv: {exc}", file=sys.stderr)

    try:
        import pandas as pd

        url = "http://lib.stat.cmu.edu/datasets/boston"
        raw = pd.read_csv(url, sep=r"\s+", skiprows=22, header=None)
        data = np.hstack([raw.values[::2, :], raw.values[1::2, :2]])
        target = raw.values[1::2, 2]
        names = ["CRIM", "ZN", "INDUS", "CHAS", "NOX", "RM", "AGE", "DIS",
                 "RAD", "TAX", "PTRATIO", "B", "LSTAT"]
        write_csv("boston.csv", data, target, names)
    except Exception as exc:
        print(f"SKIPPED boston.csv: {exc}", file=sys.stderr)


def main() -> int:
    os.makedirs(DATA_DIR, exist_ok=True)
    bundled()
    synthetic()
    fetched()
    return 0


if __name__ == "__main__":
    sys.exit(main())
