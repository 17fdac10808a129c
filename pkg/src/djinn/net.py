"""Feed-forward execution and Adam training for the mapped networks.

Hidden layers are ReLU; the output layer is affine (regression values or
classification logits). Everything runs in float64.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .data import ScalingParams
from .mapping import InitializedNetwork
from .validation import (
    CLASSIFICATION,
    as_float_matrix,
    as_label_vector,
    check_positive_int,
    check_task,
)

MSE = "mse"
SOFTMAX_XENT = "softmax_xent"
LOSSES = (MSE, SOFTMAX_XENT)


@dataclass
class Network:
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @property
    def widths(self) -> tuple[int, ...]:
        return (self.weights[0].shape[1], *(w.shape[0] for w in self.weights))

    def copy(self) -> "Network":
        return Network([w.copy() for w in self.weights],
                       [b.copy() for b in self.biases])


def network_from_initialized(init: InitializedNetwork) -> Network:
    return Network([w.copy() for w in init.weights],
                   [b.copy() for b in init.biases])


@dataclass
class TrainingConfig:
    epochs: int
    learning_rate: float
    batch_size: int
    loss: str = MSE
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    shuffle_seed: int = 0

    def __post_init__(self) -> None:
        check_positive_int(self.epochs, "epochs")
        check_positive_int(self.batch_size, "batch_size")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.loss not in LOSSES:
            raise ValueError(f"loss must be one of {LOSSES}, got {self.loss!r}")


@dataclass
class CostHistory:
    """Mean batch cost per training epoch, optionally a held-out track."""

    costs: list[float] = field(default_factory=list)
    eval_costs: list[float] | None = None


def forward(net: Network, features) -> np.ndarray:
    """ReLU hidden layers, affine output (values or logits)."""
    h = as_float_matrix(features, "features")
    if h.shape[1] != net.weights[0].shape[1]:
        raise ValueError(
            f"feature count {h.shape[1]} does not match network input "
            f"({net.weights[0].shape[1]})"
        )
    last = len(net.weights) - 1
    for k, (w, b) in enumerate(zip(net.weights, net.biases)):
        h = h @ w.T + b
        if k != last:
            np.maximum(h, 0.0, out=h)
    return h


def _softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def loss_and_gradient(net: Network, batch_features, batch_targets, loss: str):
    """Cost and reverse-mode parameter gradients for one mini-batch.

    MSE is averaged over rows and summed over outputs; cross-entropy uses
    max-subtracted logits. The ReLU subgradient at exactly 0 is 0.
    """
    if loss not in LOSSES:
        raise ValueError(f"loss must be one of {LOSSES}, got {loss!r}")
    x = as_float_matrix(batch_features, "batch_features")
    n = x.shape[0]
    last = len(net.weights) - 1

    activations = [x]
    h = x
    for k, (w, b) in enumerate(zip(net.weights, net.biases)):
        h = h @ w.T + b
        if k != last:
            h = np.maximum(h, 0.0)
        activations.append(h)
    out = activations[-1]

    if loss == MSE:
        y = as_float_matrix(batch_targets, "batch_targets")
        if y.shape != out.shape:
            raise ValueError(f"target shape {y.shape} does not match output {out.shape}")
        diff = out - y
        cost = float((diff ** 2).sum() / n)
        delta = 2.0 * diff / n
    else:
        labels = as_label_vector(batch_targets, "batch_targets")
        if labels.max() >= out.shape[1]:
            raise ValueError("class index out of range for network output width")
        z = out - out.max(axis=1, keepdims=True)
        log_probs = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
        cost = float(-log_probs[np.arange(n), labels].mean())
        delta = _softmax(out)
        delta[np.arange(n), labels] -= 1.0
        delta /= n

    grad_w = [np.empty_like(w) for w in net.weights]
    grad_b = [np.empty_like(b) for b in net.biases]
    for k in range(last, -1, -1):
        grad_w[k] = delta.T @ activations[k]
        grad_b[k] = delta.sum(axis=0)
        if k > 0:
            delta = (delta @ net.weights[k]) * (activations[k] > 0.0)
    return cost, (grad_w, grad_b)


def train(net: Network, features, targets, config: TrainingConfig,
          eval_features=None, eval_targets=None) -> tuple[Network, CostHistory]:
    """Mini-batch Adam training; returns a trained copy and the cost history.

    Each epoch reshuffles rows from one seeded stream; the final short
    batch is kept. Batch sizes larger than the training set fall back to
    full batch. Non-finite cost aborts with a diagnostic.
    """
    x = as_float_matrix(features, "features")
    n = x.shape[0]
    if config.loss == MSE:
        y = as_float_matrix(targets, "targets")
    else:
        y = as_label_vector(targets, "targets")
    batch = min(config.batch_size, n)

    model = net.copy()
    m_w = [np.zeros_like(w) for w in model.weights]
    v_w = [np.zeros_like(w) for w in model.weights]
    m_b = [np.zeros_like(b) for b in model.biases]
    v_b = [np.zeros_like(b) for b in model.biases]
    rng = np.random.default_rng(config.shuffle_seed)
    history = CostHistory()
    if eval_features is not None:
        history.eval_costs = []
    step = 0
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        batch_costs = []
        for start in range(0, n, batch):
            rows = order[start:start + batch]
            cost, (gw, gb) = loss_and_gradient(model, x[rows], y[rows], config.loss)
            if not np.isfinite(cost):
                raise RuntimeError(
                    f"training diverged at epoch {epoch}, batch {start // batch}: "
                    f"cost={cost}"
                )
            batch_costs.append(cost)
            step += 1
            c1 = 1.0 - config.beta1 ** step
            c2 = 1.0 - config.beta2 ** step
            for params, grads, ms, vs in (
                (model.weights, gw, m_w, v_w),
                (model.biases, gb, m_b, v_b),
            ):
                for p, g, m, v in zip(params, grads, ms, vs):
                    m *= config.beta1
                    m += (1.0 - config.beta1) * g
                    v *= config.beta2
                    v += (1.0 - config.beta2) * g * g
                    p -= config.learning_rate * (m / c1) / (np.sqrt(v / c2) + config.epsilon)
        history.costs.append(float(np.mean(batch_costs)))
        if eval_features is not None:
            ecost, _ = loss_and_gradient(model, eval_features, eval_targets, config.loss)
            history.eval_costs.append(ecost)
    return model, history


def predict(net: Network, features, task: str) -> np.ndarray:
    """Raw outputs for regression, softmax probabilities for classification."""
    check_task(task)
    out = forward(net, features)
    if task == CLASSIFICATION:
        return _softmax(out)
    return out


def model_to_dict(net: Network, task: str, scaler: ScalingParams | None = None) -> dict:
    payload = {
        "widths": list(net.widths),
        "weights": [w.tolist() for w in net.weights],
        "biases": [b.tolist() for b in net.biases],
        "task": task,
        "scaler": None,
    }
    if scaler is not None:
        payload["scaler"] = {
            "minimum": scaler.minimum.tolist(),
            "maximum": scaler.maximum.tolist(),
        }
    return payload


def model_from_dict(payload: dict) -> tuple[Network, str, ScalingParams | None]:
    net = Network(
        [np.asarray(w, dtype=np.float64) for w in payload["weights"]],
        [np.asarray(b, dtype=np.float64) for b in payload["biases"]],
    )
    widths = tuple(int(w) for w in payload["widths"])
    if net.widths != widths:
        raise ValueError(f"stored widths {widths} do not match arrays {net.widths}")
    scaler = None
    if payload.get("scaler"):
        scaler = ScalingParams(
            np.asarray(payload["scaler"]["minimum"], dtype=np.float64),
            np.asarray(payload["scaler"]["maximum"], dtype=np.float64),
        )
    return net, check_task(payload["task"]), scaler


def save_model(path, net: Network, task: str,
               scaler: ScalingParams | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(net, task, scaler), fh)


def load_model(path) -> tuple[Network, str, ScalingParams | None]:
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))


def cost_history_to_csv(history: CostHistory, path,
                        extra_columns: dict[str, list[float]] | None = None) -> None:
    """Write (epoch, cost, ...) rows; extra columns must match the epoch count."""
    columns = {"cost": history.costs}
    if history.eval_costs is not None:
        columns["eval_cost"] = history.eval_costs
    for name, values in (extra_columns or {}).items():
        if len(values) != len(history.costs):
            raise ValueError(f"column {name!r} length does not match epochs")
        columns[name] = values
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", *columns.keys()])
        for epoch in range(len(history.costs)):
            writer.writerow([epoch, *(columns[c][epoch] for c in columns)])
