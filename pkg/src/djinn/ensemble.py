"""Forest to trained network ensemble: the full pipeline, plus the tree sweep."""
from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .baselines import SparsityBudget, random_dense_init, random_sparse_init
from .data import (
    Dataset,
    ScalingParams,
    SplitPlan,
    apply_scaler,
    fit_scaler,
    subset_dataset,
)
from .mapping import (
    Architecture,
    InitStats,
    analyze_topology,
    init_stats,
    map_tree,
    prune_dead_neurons,
)
from .net import (
    MSE,
    SOFTMAX_XENT,
    CostHistory,
    Network,
    TrainingConfig,
    model_to_dict,
    network_from_initialized,
    predict,
    train,
)
from .tree import fit_forest
from .validation import CLASSIFICATION, check_positive_int

SCHEME_DJINN = "djinn"
SCHEME_DENSE = "random_dense"
SCHEME_SPARSE = "random_sparse"
SCHEMES = (SCHEME_DJINN, SCHEME_DENSE, SCHEME_SPARSE)

# seed offsets keeping tree construction, weight draws, and batch shuffles
# on independent streams while staying reproducible from one base seed
_MAP_SEED_OFFSET = 10_000
_SHUFFLE_SEED_OFFSET = 20_000


@dataclass
class ForestConfig:
    n_trees: int = 10
    max_depth: int = 5
    min_leaf: int = 1
    bootstrap: bool = True
    feature_subsample: object = "auto"

    def __post_init__(self) -> None:
        check_positive_int(self.n_trees, "n_trees")
        check_positive_int(self.max_depth, "max_depth")
        check_positive_int(self.min_leaf, "min_leaf")


@dataclass
class DjinnEnsemble:
    members: list[Network]
    member_seeds: list[int]
    scaler: ScalingParams
    task: str
    n_outputs: int
    scheme: str = SCHEME_DJINN
    architectures: list[Architecture] = field(default_factory=list)
    stats: list[InitStats] = field(default_factory=list)
    cost_histories: list[CostHistory] = field(default_factory=list)


def _loss_for(task: str) -> str:
    return SOFTMAX_XENT if task == CLASSIFICATION else MSE


def _lift_budget(stats: InitStats, arch: Architecture) -> SparsityBudget:
    # a mapped layer can have fewer nonzeros than the row/column cover the
    # sparse baseline guarantees; lift such layers to the feasibility bound
    widths = arch.widths
    counts = []
    for k, count in enumerate(stats.nonzero_counts):
        rows, cols = widths[k + 1], widths[k]
        counts.append(min(max(count, max(rows, cols)), rows * cols))
    return SparsityBudget(tuple(counts))


def build_and_train(dataset_train: Dataset, forest_config: ForestConfig,
                    training_config: TrainingConfig, scheme: str = SCHEME_DJINN,
                    base_seed: int = 0, n_jobs: int = 1) -> DjinnEnsemble:
    """Fit a forest, map every tree, initialize per scheme, and train.

    The random schemes reuse the tree-derived (pruned) architectures and,
    for random_sparse, the per-layer nonzero budgets of the matching
    member, so all schemes with one base_seed train identical shapes on
    identical data. Member i derives every seed from base_seed + i.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    scaler = fit_scaler(dataset_train.features)
    x = apply_scaler(dataset_train.features, scaler)
    y = dataset_train.targets
    loss = _loss_for(dataset_train.task)
    n_out = dataset_train.n_outputs

    forest = fit_forest(
        x, y, dataset_train.task,
        n_trees=forest_config.n_trees,
        max_depth=forest_config.max_depth,
        min_leaf=forest_config.min_leaf,
        rng_seed=base_seed,
        bootstrap=forest_config.bootstrap,
        feature_subsample=forest_config.feature_subsample,
    )

    def build_member(i: int):
        tree = forest.trees[i]
        mapped = map_tree(tree, analyze_topology(tree), dataset_train.n_features,
                          n_out, rng_seed=base_seed + _MAP_SEED_OFFSET + i)
        pruned = prune_dead_neurons(mapped)
        if scheme == SCHEME_DJINN:
            init = pruned
        elif scheme == SCHEME_DENSE:
            init = random_dense_init(pruned.architecture,
                                     rng_seed=base_seed + _MAP_SEED_OFFSET + i)
        else:
            init = random_sparse_init(
                pruned.architecture,
                _lift_budget(init_stats(pruned), pruned.architecture),
                rng_seed=base_seed + _MAP_SEED_OFFSET + i,
            )
        config = replace(training_config, loss=loss,
                         shuffle_seed=base_seed + _SHUFFLE_SEED_OFFSET + i)
        trained, history = train(network_from_initialized(init), x, y, config)
        return trained, init.architecture, init_stats(init), history

    indices = range(forest_config.n_trees)
    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            built = list(pool.map(build_member, indices))
    else:
        built = [build_member(i) for i in indices]

    ensemble = DjinnEnsemble(
        members=[b[0] for b in built],
        member_seeds=[base_seed + i for i in indices],
        scaler=scaler,
        task=dataset_train.task,
        n_outputs=n_out,
        scheme=scheme,
        architectures=[b[1] for b in built],
        stats=[b[2] for b in built],
        cost_histories=[b[3] for b in built],
    )
    return ensemble


def predict_ensemble(ensemble: DjinnEnsemble, features) -> np.ndarray:
    """Mean member prediction: values (regression) or probabilities."""
    x = apply_scaler(features, ensemble.scaler)
    total = None
    for member in ensemble.members:
        out = predict(member, x, ensemble.task)
        total = out if total is None else total + out
    return total / len(ensemble.members)


def predict_ensemble_labels(ensemble: DjinnEnsemble, features) -> np.ndarray:
    if ensemble.task != CLASSIFICATION:
        raise ValueError("labels are only defined for classification ensembles")
    return np.argmax(predict_ensemble(ensemble, features), axis=1)


def ensemble_builder(forest_config: ForestConfig, training_config: TrainingConfig,
                     scheme: str = SCHEME_DJINN, base_seed: int = 0, n_jobs: int = 1):
    """Adapter growing a fresh ensemble per fold for crossval_evaluate."""

    def builder(train_ds: Dataset, fold: int):
        ensemble = build_and_train(train_ds, forest_config, training_config,
                                   scheme, base_seed, n_jobs)

        def model(features):
            return predict_ensemble(ensemble, features)

        model.ensemble = ensemble
        return model

    return builder


def mean_cost_curve(ensemble: DjinnEnsemble) -> list[float]:
    """Ensemble training-cost curve: mean over members per epoch."""
    costs = np.asarray([h.costs for h in ensemble.cost_histories])
    return [float(v) for v in costs.mean(axis=0)]


@dataclass(frozen=True)
class SweepPoint:
    n_trees: int
    permutation: int
    mse: float
    normalized_mse: float


def sweep_tree_count(dataset: Dataset, counts: list[int],
                     forest_config: ForestConfig, training_config: TrainingConfig,
                     plan: SplitPlan, base_seed: int = 0,
                     n_jobs: int = 1) -> list[SweepPoint]:
    """Cross-validated MSE per ensemble size, normalized to one tree.

    Member seeds depend only on the member index, so the c-tree ensemble
    is exactly the first c members of the largest one; each fold therefore
    trains max(counts) members once and reuses their predictions.
    """
    if dataset.task == CLASSIFICATION:
        raise ValueError("the tree sweep is defined for regression datasets")
    counts = sorted(set(int(c) for c in counts))
    if counts[0] < 1:
        raise ValueError("tree counts must be >= 1")
    top = max(counts + [1])
    points = []
    for fold, (train_idx, test_idx) in enumerate(plan.permutations):
        train_ds = subset_dataset(dataset, train_idx)
        big = build_and_train(train_ds, replace(forest_config, n_trees=top),
                              training_config, SCHEME_DJINN, base_seed, n_jobs)
        x_test = apply_scaler(dataset.features[test_idx], big.scaler)
        member_preds = np.stack([predict(m, x_test, dataset.task)
                                 for m in big.members])
        y_test = dataset.targets[test_idx]

        def fold_mse(c: int) -> float:
            pred = member_preds[:c].mean(axis=0)
            return float(((pred - y_test) ** 2).mean())

        base_mse = fold_mse(1)
        for c in counts:
            mse = fold_mse(c)
            points.append(SweepPoint(c, fold, mse, mse / base_mse))
    return points


def sweep_to_csv(points: list[SweepPoint], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n_trees", "permutation", "mse", "normalized_mse"])
        for p in points:
            writer.writerow([p.n_trees, p.permutation, p.mse, p.normalized_mse])


def ensemble_to_dict(ensemble: DjinnEnsemble) -> dict:
    members = []
    for net in ensemble.members:
        payload = model_to_dict(net, ensemble.task)
        del payload["task"]
        del payload["scaler"]
        members.append(payload)
    return {
        "task": ensemble.task,
        "scheme": ensemble.scheme,
        "n_outputs": ensemble.n_outputs,
        "member_seeds": list(ensemble.member_seeds),
        "scaler": {
            "minimum": ensemble.scaler.minimum.tolist(),
            "maximum": ensemble.scaler.maximum.tolist(),
        },
        "members": members,
    }


def ensemble_from_dict(payload: dict) -> DjinnEnsemble:
    members = [
        Network(
            [np.asarray(w, dtype=np.float64) for w in entry["weights"]],
            [np.asarray(b, dtype=np.float64) for b in entry["biases"]],
        )
        for entry in payload["members"]
    ]
    scaler = ScalingParams(
        np.asarray(payload["scaler"]["minimum"], dtype=np.float64),
        np.asarray(payload["scaler"]["maximum"], dtype=np.float64),
    )
    return DjinnEnsemble(
        members=members,
        member_seeds=[int(s) for s in payload["member_seeds"]],
        scaler=scaler,
        task=payload["task"],
        n_outputs=int(payload["n_outputs"]),
        scheme=payload.get("scheme", SCHEME_DJINN),
    )


def save_ensemble(ensemble: DjinnEnsemble, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(ensemble_to_dict(ensemble), fh)


def load_ensemble(path) -> DjinnEnsemble:
    with open(path, encoding="utf-8") as fh:
        return ensemble_from_dict(json.load(fh))
