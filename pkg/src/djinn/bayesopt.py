"""Architecture search: GP surrogate + expected improvement over layer widths."""
from __future__ import annotations

import csv
import itertools
import json
import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from .baselines import random_dense_init
from .data import Dataset, apply_scaler, fit_scaler, make_splits
from .mapping import Architecture
from .net import (
    MSE,
    SOFTMAX_XENT,
    TrainingConfig,
    loss_and_gradient,
    network_from_initialized,
    train,
)
from .validation import CLASSIFICATION, check_positive_int

logger = logging.getLogger(__name__)

_HALTON_BASES = (2, 3, 5, 7, 11, 13, 17, 19)
_LENGTH_SCALES = (0.1, 0.25, 0.5, 1.0, 2.0)
_SIGNAL_VARIANCES = (0.25, 1.0, 4.0)
_NOISE = 1e-6


@dataclass(frozen=True)
class SearchSpace:
    """Integer width range per hidden layer."""

    bounds: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if not self.bounds:
            raise ValueError("search space needs at least one layer")
        for lo, hi in self.bounds:
            if lo < 1 or hi < lo:
                raise ValueError(f"invalid width bounds ({lo}, {hi})")

    @property
    def n_layers(self) -> int:
        return len(self.bounds)

    @property
    def cardinality(self) -> int:
        out = 1
        for lo, hi in self.bounds:
            out *= hi - lo + 1
        return out

    def contains(self, widths: tuple[int, ...]) -> bool:
        return len(widths) == self.n_layers and all(
            lo <= w <= hi for w, (lo, hi) in zip(widths, self.bounds)
        )


@dataclass(frozen=True)
class Trial:
    widths: tuple[int, ...]
    objective: float
    seed: int


def default_search_space(n_layers: int, max_hidden_width: int) -> SearchSpace:
    """Bounds [2, 2 * max observed width] for every layer."""
    check_positive_int(n_layers, "n_layers")
    check_positive_int(max_hidden_width, "max_hidden_width")
    return SearchSpace(tuple((2, 2 * max_hidden_width) for _ in range(n_layers)))


def _radical_inverse(index: int, base: int) -> float:
    result = 0.0
    f = 1.0 / base
    while index > 0:
        result += f * (index % base)
        index //= base
        f /= base
    return result


def halton_point(index: int, dims: int) -> tuple[float, ...]:
    """Quasi-random point in [0,1)^dims (1-based index)."""
    if dims > len(_HALTON_BASES):
        raise ValueError(f"at most {len(_HALTON_BASES)} dimensions supported")
    return tuple(_radical_inverse(index, _HALTON_BASES[d]) for d in range(dims))


def _unit_to_widths(u, space: SearchSpace) -> tuple[int, ...]:
    widths = []
    for value, (lo, hi) in zip(u, space.bounds):
        w = lo + int(value * (hi - lo + 1))
        widths.append(min(max(w, lo), hi))
    return tuple(widths)


def _scale01(widths_matrix: np.ndarray, space: SearchSpace) -> np.ndarray:
    lo = np.array([b[0] for b in space.bounds], dtype=np.float64)
    hi = np.array([b[1] for b in space.bounds], dtype=np.float64)
    span = np.where(hi > lo, hi - lo, 1.0)
    return (widths_matrix - lo) / span


class _GPFailure(RuntimeError):
    pass


def _fit_gp(x: np.ndarray, y: np.ndarray):
    """Small-grid marginal-likelihood fit of a squared-exponential GP.

    Returns (predict, best_params); predict maps candidate rows to
    (mean, std) of the posterior. Raises _GPFailure when no grid cell
    yields a usable Cholesky factorization.
    """
    n = x.shape[0]
    y_mean = float(y.mean())
    y_std = float(y.std())
    if y_std == 0.0:
        y_std = 1.0
    z = (y - y_mean) / y_std

    def kernel(a, b, ls, s2):
        sq = ((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2)
        return s2 * np.exp(-0.5 * sq / (ls * ls))

    best = None
    for ls in _LENGTH_SCALES:
        for s2 in _SIGNAL_VARIANCES:
            k = kernel(x, x, ls, s2) + _NOISE * np.eye(n)
            try:
                chol = np.linalg.cholesky(k)
            except np.linalg.LinAlgError:
                continue
            alpha = np.linalg.solve(chol.T, np.linalg.solve(chol, z))
            log_like = (-0.5 * float(z @ alpha)
                        - float(np.log(np.diag(chol)).sum())
                        - 0.5 * n * math.log(2.0 * math.pi))
            if best is None or log_like > best[0]:
                best = (log_like, ls, s2, chol, alpha)
    if best is None:
        raise _GPFailure("no GP hyper-parameter candidate factorized")
    _, ls, s2, chol, alpha = best

    def predict_fn(candidates: np.ndarray):
        kc = kernel(candidates, x, ls, s2)
        mean = kc @ alpha
        v = np.linalg.solve(chol, kc.T)
        var = np.maximum(s2 - (v ** 2).sum(axis=0), 0.0)
        return mean * y_std + y_mean, np.sqrt(var) * y_std

    return predict_fn, (ls, s2)


def expected_improvement(mean: np.ndarray, std: np.ndarray,
                         best_value: float) -> np.ndarray:
    """EI for minimization; zero-variance points score max(best - mean, 0)."""
    gap = best_value - mean
    out = np.maximum(gap, 0.0)
    positive = std > 0.0
    if np.any(positive):
        z = gap[positive] / std[positive]
        cdf = np.array([0.5 * (1.0 + math.erf(v / math.sqrt(2.0))) for v in z])
        pdf = np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
        out[positive] = gap[positive] * cdf + std[positive] * pdf
    return out


def _candidate_pool(space: SearchSpace, observed: set[tuple[int, ...]],
                    rng: np.random.Generator, n_candidates: int) -> list[tuple[int, ...]]:
    """Unobserved width vectors to rank; falls back to observed ones only
    when the whole space has been visited."""
    if space.cardinality <= n_candidates:
        cells = [w for w in itertools.product(
            *(range(lo, hi + 1) for lo, hi in space.bounds)) if w not in observed]
        if cells:
            return cells
        return list(itertools.product(*(range(lo, hi + 1) for lo, hi in space.bounds)))
    pool: list[tuple[int, ...]] = []
    seen: set[tuple[int, ...]] = set()
    attempts = 0
    while len(pool) < n_candidates and attempts < 20 * n_candidates:
        attempts += 1
        w = tuple(int(rng.integers(lo, hi + 1)) for lo, hi in space.bounds)
        if w in observed or w in seen:
            continue
        seen.add(w)
        pool.append(w)
    if not pool:
        pool = [tuple(int(rng.integers(lo, hi + 1)) for lo, hi in space.bounds)
                for _ in range(n_candidates)]
    return pool


def _initial_design(space: SearchSpace, n_initial: int,
                    rng: np.random.Generator) -> list[tuple[int, ...]]:
    if space.cardinality <= n_initial:
        return list(itertools.product(*(range(lo, hi + 1) for lo, hi in space.bounds)))
    design: list[tuple[int, ...]] = []
    seen: set[tuple[int, ...]] = set()
    index = 1
    while len(design) < n_initial and index <= 100 * n_initial:
        w = _unit_to_widths(halton_point(index, space.n_layers), space)
        index += 1
        if w in seen:
            continue
        seen.add(w)
        design.append(w)
    while len(design) < n_initial:
        w = tuple(int(rng.integers(lo, hi + 1)) for lo, hi in space.bounds)
        if w not in seen:
            seen.add(w)
            design.append(w)
    return design


def search_minimum(objective, space: SearchSpace, budget: int, rng_seed: int = 0,
                   n_initial: int = 10, n_candidates: int = 1000
                   ) -> tuple[Trial, list[Trial]]:
    """Minimize objective(widths, seed) with exactly `budget` evaluations.

    Quasi-random initial design, then GP + expected improvement over a
    random candidate pool (the full grid when the space is small). A GP
    fitting failure downgrades that iteration to a random proposal.
    """
    check_positive_int(budget, "budget")
    n_initial = min(n_initial, space.cardinality)
    if budget < n_initial:
        raise ValueError(f"budget {budget} smaller than initial design {n_initial}")
    rng = np.random.default_rng(rng_seed)
    trials: list[Trial] = []

    def evaluate(widths: tuple[int, ...]) -> None:
        seed = rng_seed + len(trials)
        value = float(objective(widths, seed))
        if not math.isfinite(value):
            raise ValueError(f"objective returned non-finite value at {widths}")
        trials.append(Trial(widths, value, seed))

    for widths in _initial_design(space, n_initial, rng):
        if len(trials) == budget:
            break
        evaluate(widths)

    while len(trials) < budget:
        observed = {t.widths for t in trials}
        candidates = _candidate_pool(space, observed, rng, n_candidates)
        try:
            x = _scale01(np.array([t.widths for t in trials], dtype=np.float64), space)
            y = np.array([t.objective for t in trials])
            predict_fn, _ = _fit_gp(x, y)
            mean, std = predict_fn(_scale01(np.array(candidates, dtype=np.float64), space))
            ei = expected_improvement(mean, std, float(y.min()))
            choice = candidates[int(np.argmax(ei))]
        except _GPFailure as exc:
            logger.warning("GP fit failed (%s); random proposal this iteration", exc)
            choice = candidates[int(rng.integers(len(candidates)))]
        evaluate(choice)

    best = min(trials, key=lambda t: t.objective)
    return best, trials


def optimize(dataset_train: Dataset, space: SearchSpace, budget: int,
             training_config: TrainingConfig, rng_seed: int = 0,
             n_initial: int = 10, n_candidates: int = 1000
             ) -> tuple[Trial, list[Trial]]:
    """Search hidden widths by training dense Xavier networks.

    Every proposal trains on 80% of dataset_train and is scored by its
    loss on the held-out 20%, so outer test data never enters the search.
    """
    plan = make_splits(dataset_train.n_samples, 1, 0.2, seed=rng_seed)
    train_idx, val_idx = plan.permutations[0]
    scaler = fit_scaler(dataset_train.features[train_idx])
    x_train = apply_scaler(dataset_train.features[train_idx], scaler)
    x_val = apply_scaler(dataset_train.features[val_idx], scaler)
    y_train = dataset_train.targets[train_idx]
    y_val = dataset_train.targets[val_idx]
    n_out = dataset_train.n_outputs
    loss = SOFTMAX_XENT if dataset_train.task == CLASSIFICATION else MSE

    def objective(widths: tuple[int, ...], seed: int) -> float:
        arch = Architecture(dataset_train.n_features, tuple(widths), n_out)
        init = random_dense_init(arch, rng_seed=seed)
        config = replace(training_config, loss=loss, shuffle_seed=seed)
        model, _ = train(network_from_initialized(init), x_train, y_train, config)
        cost, _ = loss_and_gradient(model, x_val, y_val, loss)
        return cost

    return search_minimum(objective, space, budget, rng_seed, n_initial, n_candidates)


def trials_to_csv(trials: list[Trial], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "widths", "objective", "seed"])
        for i, t in enumerate(trials):
            writer.writerow([i, "x".join(str(w) for w in t.widths), t.objective, t.seed])


def save_best_architecture(best: Trial, n_inputs: int, n_outputs: int, path) -> None:
    payload = {
        "n_inputs": n_inputs,
        "hidden_widths": list(best.widths),
        "n_outputs": n_outputs,
        "objective": best.objective,
        "seed": best.seed,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
