"""Command-line surface: train, compare, sweep-trees, bayesopt, logic-demo, export-dot."""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from .baselines import random_dense_init
from .bayesopt import (
    default_search_space,
    optimize,
    save_best_architecture,
    trials_to_csv,
)
from .data import (
    Dataset,
    apply_scaler,
    fit_scaler,
    load_csv,
    make_dataset,
    make_splits,
    subset_dataset,
)
from .ensemble import (
    SCHEME_DJINN,
    SCHEMES,
    ForestConfig,
    build_and_train,
    ensemble_builder,
    mean_cost_curve,
    predict_ensemble_labels,
    save_ensemble,
    sweep_to_csv,
    sweep_tree_count,
)
from .mapping import (
    Architecture,
    analyze_topology,
    map_tree,
    network_to_dot,
    prune_dead_neurons,
)
from .metrics import (
    compare_reports,
    crossval_evaluate,
    format_comparison,
    report_to_dict,
)
from .net import (
    SOFTMAX_XENT,
    TrainingConfig,
    load_model,
    network_from_initialized,
    predict,
    train,
)
from .presets import PRESETS, get_preset
from .tree import fit_tree, tree_to_dot
from .validation import CLASSIFICATION, REGRESSION


@dataclass
class RunConfig:
    """Fully resolved experiment settings, validated before any training."""

    data_path: str
    target_columns: tuple[str, ...]
    task: str
    n_trees: int
    max_depth: int
    epochs: int
    learning_rate: float
    batch_size: int
    seed: int
    scheme: str
    out_dir: str
    min_leaf: int = 1
    n_permutations: int = 5
    test_fraction: float = 0.2
    subsample: int | None = None
    n_jobs: int = 1

    def forest_config(self) -> ForestConfig:
        return ForestConfig(n_trees=self.n_trees, max_depth=self.max_depth,
                            min_leaf=self.min_leaf)

    def training_config(self) -> TrainingConfig:
        return TrainingConfig(epochs=self.epochs, learning_rate=self.learning_rate,
                              batch_size=self.batch_size)


def _add_run_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--preset", choices=sorted(PRESETS),
                        help="named dataset preset supplying defaults")
    parser.add_argument("--data", help="CSV path (overrides the preset path)")
    parser.add_argument("--data-dir", default="data",
                        help="directory holding preset CSVs (default: data)")
    parser.add_argument("--task", choices=[REGRESSION, CLASSIFICATION])
    parser.add_argument("--target", action="append",
                        help="target column name (repeat for multi-output)")
    parser.add_argument("--trees", type=int, help="ensemble size")
    parser.add_argument("--max-depth", type=int, help="maximum tree depth")
    parser.add_argument("--min-leaf", type=int, default=1)
    parser.add_argument("--epochs", type=int)
    parser.add_argument("--lr", type=float, help="learning rate")
    parser.add_argument("--batch", type=int, help="mini-batch size")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--perms", type=int, default=5,
                        help="number of train/test permutations")
    parser.add_argument("--test-fraction", type=float, default=0.2)
    parser.add_argument("--subsample", type=int,
                        help="seeded row subsample taken before splitting")
    parser.add_argument("--jobs", type=int, default=1,
                        help="concurrent member training threads")
    parser.add_argument("--out", default="runs",
                        help="output directory for artifacts")


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    preset = get_preset(args.preset) if args.preset else None
    data_path = args.data
    if data_path is None and preset is not None:
        data_path = os.path.join(args.data_dir, preset.data_file)
    task = args.task or (preset.task if preset else None)
    targets = tuple(args.target) if args.target else (
        preset.target_columns if preset else None)
    if data_path is None or task is None or targets is None:
        raise ValueError("--data, --task and --target are required without --preset")

    def pick(explicit, preset_value, default):
        if explicit is not None:
            return explicit
        if preset_value is not None:
            return preset_value
        return default

    return RunConfig(
        data_path=data_path,
        target_columns=targets,
        task=task,
        n_trees=pick(args.trees, preset.n_trees if preset else None, 10),
        max_depth=pick(args.max_depth, preset.max_depth if preset else None, 5),
        epochs=pick(args.epochs, preset.epochs if preset else None, 100),
        learning_rate=pick(args.lr, preset.learning_rate if preset else None, 0.006),
        batch_size=pick(args.batch, preset.batch_size if preset else None, 32),
        seed=args.seed,
        scheme=getattr(args, "scheme", SCHEME_DJINN),
        out_dir=args.out,
        min_leaf=args.min_leaf,
        n_permutations=args.perms,
        test_fraction=args.test_fraction,
        subsample=args.subsample,
        n_jobs=args.jobs,
    )


def _load_run_dataset(cfg: RunConfig) -> Dataset:
    dataset = load_csv(cfg.data_path, list(cfg.target_columns), cfg.task)
    if cfg.subsample is not None and cfg.subsample < dataset.n_samples:
        rows = np.random.default_rng(cfg.seed).choice(
            dataset.n_samples, size=cfg.subsample, replace=False)
        dataset = subset_dataset(dataset, np.sort(rows))
    return dataset


def _scaled_cost_columns(costs: list[float], train_targets: np.ndarray,
                         task: str) -> dict[str, list[float]]:
    """For regression curves, add cost re-expressed for (0,1)-scaled targets."""
    if task == CLASSIFICATION:
        return {}
    span = float(train_targets.max() - train_targets.min())
    if span == 0.0:
        return {}
    return {"scaled_mse": [c / span ** 2 for c in costs]}


def _write_cost_csv(path: str, curve: list[float],
                    extra: dict[str, list[float]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "cost", *extra.keys()])
        for epoch, value in enumerate(curve):
            writer.writerow([epoch, value, *(extra[k][epoch] for k in extra)])


def cmd_train(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    dataset = _load_run_dataset(cfg)
    plan = make_splits(dataset.n_samples, cfg.n_permutations, cfg.test_fraction,
                       cfg.seed)
    captured = {}
    inner = ensemble_builder(cfg.forest_config(), cfg.training_config(),
                             cfg.scheme, cfg.seed, cfg.n_jobs)

    def builder(train_ds: Dataset, fold: int):
        model = inner(train_ds, fold)
        if fold == 0:
            captured["ensemble"] = model.ensemble
            captured["train_targets"] = train_ds.targets
        return model

    report = crossval_evaluate(builder, dataset, plan)

    os.makedirs(cfg.out_dir, exist_ok=True)
    ensemble = captured["ensemble"]
    save_ensemble(ensemble, os.path.join(cfg.out_dir, "ensemble.json"))
    curve = mean_cost_curve(ensemble)
    _write_cost_csv(
        os.path.join(cfg.out_dir, f"cost_history_{cfg.scheme}.csv"),
        curve,
        _scaled_cost_columns(curve, captured["train_targets"], cfg.task),
    )
    with open(os.path.join(cfg.out_dir, "report.json"), "w", encoding="utf-8") as fh:
        json.dump({"scheme": cfg.scheme, "report": report_to_dict(report)},
                  fh, indent=2)
    print(format_comparison({cfg.scheme: report}))
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    dataset = _load_run_dataset(cfg)
    plan = make_splits(dataset.n_samples, cfg.n_permutations, cfg.test_fraction,
                       cfg.seed)
    ensembles = {}
    train_targets = {}
    reports = {}
    for scheme in SCHEMES:
        inner = ensemble_builder(cfg.forest_config(), cfg.training_config(),
                                 scheme, cfg.seed, cfg.n_jobs)

        def builder(train_ds: Dataset, fold: int, _scheme=scheme, _inner=inner):
            model = _inner(train_ds, fold)
            if fold == 0:
                ensembles[_scheme] = model.ensemble
                train_targets[_scheme] = train_ds.targets
            return model

        reports[scheme] = crossval_evaluate(builder, dataset, plan)

    reports = {name: compare_reports(report, reports[SCHEME_DJINN])
               for name, report in reports.items()}

    os.makedirs(cfg.out_dir, exist_ok=True)
    for scheme, ensemble in ensembles.items():
        curve = mean_cost_curve(ensemble)
        _write_cost_csv(
            os.path.join(cfg.out_dir, f"cost_history_{scheme}.csv"),
            curve,
            _scaled_cost_columns(curve, train_targets[scheme], cfg.task),
        )
    payload = {
        "reference": SCHEME_DJINN,
        "schemes": {name: report_to_dict(report) for name, report in reports.items()},
    }
    with open(os.path.join(cfg.out_dir, "report.json"), "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
    print(format_comparison(reports))
    return 0


def cmd_sweep_trees(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    if cfg.task != REGRESSION:
        raise ValueError("sweep-trees runs on regression datasets")
    counts = [int(c) for c in args.counts.split(",") if c.strip()]
    dataset = _load_run_dataset(cfg)
    plan = make_splits(dataset.n_samples, cfg.n_permutations, cfg.test_fraction,
                       cfg.seed)
    points = sweep_tree_count(dataset, counts, cfg.forest_config(),
                              cfg.training_config(), plan, cfg.seed, cfg.n_jobs)
    os.makedirs(cfg.out_dir, exist_ok=True)
    sweep_to_csv(points, os.path.join(cfg.out_dir, "sweep.csv"))
    print("n_trees  mean_normalized_mse")
    for count in sorted(set(p.n_trees for p in points)):
        values = [p.normalized_mse for p in points if p.n_trees == count]
        print(f"{count:7d}  {np.mean(values):.4f}")
    return 0


def cmd_bayesopt(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    dataset = _load_run_dataset(cfg)
    plan = make_splits(dataset.n_samples, cfg.n_permutations, cfg.test_fraction,
                       cfg.seed)

    djinn_builder = ensemble_builder(cfg.forest_config(), cfg.training_config(),
                                     SCHEME_DJINN, cfg.seed, cfg.n_jobs)
    captured = {}

    def builder(train_ds: Dataset, fold: int):
        model = djinn_builder(train_ds, fold)
        if fold == 0:
            captured["ensemble"] = model.ensemble
        return model

    djinn_report = crossval_evaluate(builder, dataset, plan)
    architectures = captured["ensemble"].architectures
    n_layers = max(len(a.hidden_widths) for a in architectures)
    max_width = max(max(a.hidden_widths) for a in architectures)
    space = default_search_space(n_layers, max_width)

    train0 = subset_dataset(dataset, plan.permutations[0][0])
    best, trials = optimize(train0, space, args.budget, cfg.training_config(),
                            rng_seed=cfg.seed)

    loss = SOFTMAX_XENT if cfg.task == CLASSIFICATION else None

    def bayes_builder(train_ds: Dataset, fold: int):
        scaler = fit_scaler(train_ds.features)
        x = apply_scaler(train_ds.features, scaler)
        arch = Architecture(train_ds.n_features, best.widths, train_ds.n_outputs)
        config = cfg.training_config()
        if loss is not None:
            config = replace(config, loss=loss)
        model, _ = train(network_from_initialized(random_dense_init(arch, cfg.seed)),
                         x, train_ds.targets, config)

        def predictor(features):
            return predict(model, apply_scaler(features, scaler), cfg.task)

        return predictor

    bayes_report = compare_reports(
        crossval_evaluate(bayes_builder, dataset, plan), djinn_report)

    os.makedirs(cfg.out_dir, exist_ok=True)
    trials_to_csv(trials, os.path.join(cfg.out_dir, "trials.csv"))
    save_best_architecture(best, dataset.n_features, dataset.n_outputs,
                           os.path.join(cfg.out_dir, "best_architecture.json"))
    payload = {
        "reference": "djinn",
        "schemes": {
            "djinn": report_to_dict(djinn_report),
            "bayesopt": report_to_dict(bayes_report),
        },
        "best_widths": list(best.widths),
        "n_trials": len(trials),
    }
    with open(os.path.join(cfg.out_dir, "report.json"), "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
    print(format_comparison({"djinn": djinn_report, "bayesopt": bayes_report}))
    return 0


_GATES = {
    "if": (np.array([[0.0], [1.0]]), np.array([0, 1])),
    "or": (np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]),
           np.array([0, 1, 1, 1])),
    "xor": (np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]),
            np.array([0, 1, 1, 0])),
}


def run_logic_gate(gate: str, seed: int = 0, epochs: int = 500,
                   learning_rate: float = 0.006):
    """Map and train one gate; returns (tree, initialized net, accuracy, labels).

    The truth table is tiny, so this trains the usual ten-member ensemble
    (ten differently seeded mappings of the same tree) and scores its mean
    prediction; single members can start with dead neurons on unlucky bias
    draws. The returned initialized network is the seed's own mapping, for
    topology export.
    """
    x, y = _GATES[gate]
    tree = fit_tree(x, y, CLASSIFICATION, max_depth=2, rng_seed=seed)
    init = prune_dead_neurons(
        map_tree(tree, analyze_topology(tree), x.shape[1], 2, rng_seed=seed))
    dataset = make_dataset(x, y, CLASSIFICATION)
    ensemble = build_and_train(
        dataset,
        ForestConfig(n_trees=10, max_depth=2, bootstrap=False),
        TrainingConfig(epochs=epochs, learning_rate=learning_rate,
                       batch_size=x.shape[0]),
        base_seed=seed,
    )
    labels = predict_ensemble_labels(ensemble, x)
    accuracy = float((labels == y).mean())
    return tree, init, accuracy, labels


def cmd_logic_demo(args: argparse.Namespace) -> int:
    os.makedirs(args.out, exist_ok=True)
    names = {"if": ["x"], "or": ["x", "y"], "xor": ["x", "y"]}
    for gate in ("if", "or", "xor"):
        tree, init, accuracy, labels = run_logic_gate(gate, args.seed, args.epochs)
        x, y = _GATES[gate]
        print(f"{gate.upper()} gate: {int(accuracy * len(y))}/{len(y)} correct")
        for row, truth, label in zip(x, y, labels):
            inputs = ", ".join(str(int(v)) for v in row)
            print(f"  ({inputs}) -> {label}  [truth {truth}]")
        with open(os.path.join(args.out, f"{gate}_tree.dot"), "w",
                  encoding="utf-8") as fh:
            fh.write(tree_to_dot(tree, names[gate]) + "\n")
        with open(os.path.join(args.out, f"{gate}_network.dot"), "w",
                  encoding="utf-8") as fh:
            fh.write(network_to_dot(init.weights, names[gate], init.neuron_roles) + "\n")
    return 0


def cmd_export_dot(args: argparse.Namespace) -> int:
    net, _task, _scaler = load_model(args.model)
    dot = network_to_dot(net.weights)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(dot + "\n")
    else:
        print(dot)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="djinn",
        description="Tree-initialized neural network ensembles: training, "
                    "baselines, and architecture search.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train an ensemble and report scores")
    _add_run_arguments(p_train)
    p_train.add_argument("--scheme", choices=SCHEMES, default=SCHEME_DJINN)
    p_train.set_defaults(func=cmd_train)

    p_compare = sub.add_parser(
        "compare", help="evaluate all initialization schemes on shared folds")
    _add_run_arguments(p_compare)
    p_compare.set_defaults(func=cmd_compare)

    p_sweep = sub.add_parser("sweep-trees", help="normalized MSE vs ensemble size")
    _add_run_arguments(p_sweep)
    p_sweep.add_argument("--counts", default="1,2,5,10,20",
                         help="comma-separated ensemble sizes")
    p_sweep.set_defaults(func=cmd_sweep_trees)

    p_bayes = sub.add_parser(
        "bayesopt", help="architecture search compared against the ensemble")
    _add_run_arguments(p_bayes)
    p_bayes.add_argument("--budget", type=int, default=100,
                         help="number of architectures to evaluate")
    p_bayes.set_defaults(func=cmd_bayesopt)

    p_logic = sub.add_parser("logic-demo",
                             help="truth tables and DOT graphs for IF/OR/XOR")
    p_logic.add_argument("--out", default="logic-demo")
    p_logic.add_argument("--seed", type=int, default=0)
    p_logic.add_argument("--epochs", type=int, default=500)
    p_logic.set_defaults(func=cmd_logic_demo)

    p_dot = sub.add_parser("export-dot", help="emit DOT for a saved model JSON")
    p_dot.add_argument("model", help="model JSON path")
    p_dot.add_argument("--out", help="write DOT here instead of stdout")
    p_dot.set_defaults(func=cmd_export_dot)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
