"""Scoring, cross-validated evaluation, and the two-sample t-test."""
from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .data import Dataset, SplitPlan, subset_dataset
from .validation import CLASSIFICATION, as_float_matrix, as_label_vector

REGRESSION_METRICS = ("mse", "mae", "ev")
CLASSIFICATION_METRICS = ("recall", "precision", "accuracy")


def regression_metrics(y_true, y_pred) -> tuple[float, float, float]:
    """(MSE, MAE, EV) over flattened targets; EV = 1 - Var(residual)/Var(truth)."""
    yt = as_float_matrix(y_true, "y_true").ravel()
    yp = as_float_matrix(y_pred, "y_pred").ravel()
    if yt.shape != yp.shape:
        raise ValueError(f"length mismatch: {yt.shape} vs {yp.shape}")
    if yt.size < 2:
        raise ValueError("need at least 2 values to score")
    residual = yt - yp
    mse = float((residual ** 2).mean())
    mae = float(np.abs(residual).mean())
    var_true = float(yt.var())
    if var_true == 0.0:
        raise ValueError("explained variance undefined: targets have zero variance")
    ev = 1.0 - float(residual.var()) / var_true
    return mse, mae, ev


def classification_metrics(y_true, y_pred_labels, n_classes: int
                           ) -> tuple[float, float, float]:
    """(macro recall, macro precision, accuracy).

    Macro averages run over all n_classes; a class with a zero denominator
    (never present / never predicted) contributes 0 to its average.
    """
    yt = as_label_vector(y_true, "y_true")
    yp = as_label_vector(y_pred_labels, "y_pred_labels")
    if yt.shape != yp.shape:
        raise ValueError(f"length mismatch: {yt.shape} vs {yp.shape}")
    if yt.size == 0:
        raise ValueError("empty input")
    if max(yt.max(), yp.max()) >= n_classes:
        raise ValueError("label out of range for n_classes")
    confusion = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(confusion, (yt, yp), 1)
    tp = np.diag(confusion).astype(np.float64)
    actual = confusion.sum(axis=1).astype(np.float64)
    predicted = confusion.sum(axis=0).astype(np.float64)
    recall = np.where(actual > 0, tp / np.where(actual > 0, actual, 1.0), 0.0)
    precision = np.where(predicted > 0, tp / np.where(predicted > 0, predicted, 1.0), 0.0)
    accuracy = float(tp.sum() / yt.size)
    return float(recall.mean()), float(precision.mean()), accuracy


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    max_iter = 300
    eps = 3e-16
    fpmin = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < fpmin:
        d = fpmin
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise RuntimeError("incomplete beta continued fraction did not converge")


def betainc_regularized(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b) for a, b > 0, x in [0, 1]."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if x < 0.0 or x > 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return float(x)
    ln_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                + a * math.log(x) + b * math.log(1.0 - x))
    front = math.exp(ln_front)
    # the continued fraction converges fastest below the mean of the beta
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def ttest_pvalue(scores_a, scores_b) -> float:
    """Two-sample, two-tailed, pooled-variance Student's t-test p-value.

    Degenerate zero-variance cases: equal means give 1.0, unequal means
    give the smallest positive float instead of an exact 0.
    """
    a = np.asarray(scores_a, dtype=np.float64).ravel()
    b = np.asarray(scores_b, dtype=np.float64).ravel()
    if a.size < 2 or b.size < 2:
        raise ValueError("each sample needs at least 2 values")
    na, nb = a.size, b.size
    df = na + nb - 2
    pooled = ((na - 1) * a.var(ddof=1) + (nb - 1) * b.var(ddof=1)) / df
    mean_gap = float(a.mean() - b.mean())
    if pooled == 0.0:
        return 1.0 if mean_gap == 0.0 else sys.float_info.min
    t = mean_gap / math.sqrt(pooled * (1.0 / na + 1.0 / nb))
    p = betainc_regularized(df / 2.0, 0.5, df / (df + t * t))
    return max(p, sys.float_info.min)


@dataclass
class EvalReport:
    """Per-metric raw scores over permutations, with aggregate accessors."""

    task: str
    raw_scores: dict[str, list[float]]
    p_values: dict[str, float] | None = None

    @property
    def metric_names(self) -> tuple[str, ...]:
        return tuple(self.raw_scores.keys())

    def mean(self, metric: str) -> float:
        return float(np.mean(self.raw_scores[metric]))

    def std(self, metric: str) -> float:
        # sample standard deviation over the permutations
        return float(np.std(self.raw_scores[metric], ddof=1))

    def summary(self) -> dict[str, dict[str, float]]:
        return {
            name: {"mean": self.mean(name), "std": self.std(name)}
            for name in self.metric_names
        }


def crossval_evaluate(builder, dataset: Dataset, plan: SplitPlan) -> EvalReport:
    """Train and score a model on every permutation of the plan.

    builder(train_dataset, fold_index) must return a callable mapping raw
    (unscaled) feature rows to predictions: value matrices for regression,
    class-probability matrices for classification. Scaling is the model's
    own responsibility so test rows never leak into scaler fitting.
    """
    if plan.n_samples != dataset.n_samples:
        raise ValueError("split plan was built for a different sample count")
    names = (CLASSIFICATION_METRICS if dataset.task == CLASSIFICATION
             else REGRESSION_METRICS)
    raw: dict[str, list[float]] = {name: [] for name in names}
    for fold, (train_idx, test_idx) in enumerate(plan.permutations):
        model = builder(subset_dataset(dataset, train_idx), fold)
        predictions = model(dataset.features[test_idx])
        if dataset.task == CLASSIFICATION:
            labels = np.argmax(as_float_matrix(predictions, "predictions"), axis=1)
            recall, precision, accuracy = classification_metrics(
                dataset.targets[test_idx], labels, dataset.n_classes
            )
            raw["recall"].append(recall)
            raw["precision"].append(precision)
            raw["accuracy"].append(accuracy)
        else:
            mse, mae, ev = regression_metrics(dataset.targets[test_idx], predictions)
            raw["mse"].append(mse)
            raw["mae"].append(mae)
            raw["ev"].append(ev)
    return EvalReport(task=dataset.task, raw_scores=raw)


def compare_reports(report: EvalReport, reference: EvalReport) -> EvalReport:
    """Attach per-metric p-values of report vs reference (shared metrics)."""
    if report.task != reference.task:
        raise ValueError("cannot compare reports for different tasks")
    p_values = {
        name: ttest_pvalue(report.raw_scores[name], reference.raw_scores[name])
        for name in report.metric_names
        if name in reference.raw_scores
    }
    return EvalReport(report.task, report.raw_scores, p_values)


def headline_metric(task: str) -> str:
    """The metric the p-value column reports on: MSE or accuracy."""
    return "accuracy" if task == CLASSIFICATION else "mse"


def report_to_dict(report: EvalReport) -> dict:
    return {
        "task": report.task,
        "metrics": {
            name: {
                "raw": list(report.raw_scores[name]),
                "mean": report.mean(name),
                "std": report.std(name),
            }
            for name in report.metric_names
        },
        "p_values": dict(report.p_values) if report.p_values else None,
    }


def report_from_dict(payload: dict) -> EvalReport:
    raw = {name: list(entry["raw"]) for name, entry in payload["metrics"].items()}
    return EvalReport(payload["task"], raw, payload.get("p_values"))


def save_report(report: EvalReport, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report_to_dict(report), fh, indent=2)


def format_comparison(reports: dict[str, EvalReport]) -> str:
    """Aligned text table: one row per model, mean +/- std per metric.

    When a report carries p-values, the headline metric's p-value is shown
    in the final column.
    """
    if not reports:
        raise ValueError("no reports to format")
    first = next(iter(reports.values()))
    names = first.metric_names
    p_name = headline_metric(first.task)
    header = ["model", *names, f"p({p_name})"]
    rows = [header]
    for model, report in reports.items():
        cells = [model]
        for name in names:
            cells.append(f"{report.mean(name):.3f} +/- {report.std(name):.3f}")
        if report.p_values and p_name in report.p_values:
            cells.append(f"{report.p_values[p_name]:.3g}")
        else:
            cells.append("-")
        rows.append(cells)
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
             for row in rows]
    return "\n".join(lines)
