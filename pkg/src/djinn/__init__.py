"""Tree-initialized deep neural networks.

Train CART ensembles, map each tree onto a warm-started feed-forward
network, fine-tune with Adam, and compare against random initializations
and Bayesian architecture search.
"""
from .baselines import SparsityBudget, budget_from_stats, random_dense_init, random_sparse_init
from .bayesopt import SearchSpace, Trial, default_search_space, optimize, search_minimum
from .data import (
    Dataset,
    ScalingParams,
    SplitPlan,
    apply_scaler,
    fit_scaler,
    invert_scaler,
    load_csv,
    make_dataset,
    make_splits,
    subset_dataset,
)
from .ensemble import (
    DjinnEnsemble,
    ForestConfig,
    build_and_train,
    ensemble_builder,
    predict_ensemble,
    predict_ensemble_labels,
    sweep_tree_count,
)
from .estimators import DJINNClassifier, DJINNRegressor
from .mapping import (
    Architecture,
    InitializedNetwork,
    InitStats,
    architecture_from_topology,
    init_stats,
    map_tree,
    network_to_dot,
    prune_dead_neurons,
    xavier_sigma,
)
from .metrics import (
    EvalReport,
    classification_metrics,
    compare_reports,
    crossval_evaluate,
    regression_metrics,
    ttest_pvalue,
)
from .net import (
    CostHistory,
    Network,
    TrainingConfig,
    forward,
    load_model,
    loss_and_gradient,
    network_from_initialized,
    predict,
    save_model,
    train,
)
from .synthetic import make_cliff_peak
from .tree import (
    DecisionTree,
    Forest,
    TreeTopology,
    analyze_topology,
    fit_forest,
    fit_tree,
    predict_tree,
    tree_to_dot,
)

__version__ = "0.1.0"

__all__ = [
    "Architecture",
    "CostHistory",
    "DJINNClassifier",
    "DJINNRegressor",
    "Dataset",
    "DecisionTree",
    "DjinnEnsemble",
    "EvalReport",
    "Forest",
    "ForestConfig",
    "InitStats",
    "InitializedNetwork",
    "Network",
    "ScalingParams",
    "SearchSpace",
    "SparsityBudget",
    "SplitPlan",
    "TrainingConfig",
    "TreeTopology",
    "Trial",
    "analyze_topology",
    "apply_scaler",
    "architecture_from_topology",
    "budget_from_stats",
    "build_and_train",
    "classification_metrics",
    "compare_reports",
    "crossval_evaluate",
    "default_search_space",
    "ensemble_builder",
    "fit_forest",
    "fit_scaler",
    "fit_tree",
    "forward",
    "init_stats",
    "invert_scaler",
    "load_csv",
    "load_model",
    "loss_and_gradient",
    "make_cliff_peak",
    "make_dataset",
    "make_splits",
    "map_tree",
    "network_from_initialized",
    "network_to_dot",
    "optimize",
    "predict",
    "predict_ensemble",
    "predict_ensemble_labels",
    "predict_tree",
    "prune_dead_neurons",
    "random_dense_init",
    "random_sparse_init",
    "regression_metrics",
    "save_model",
    "search_minimum",
    "subset_dataset",
    "sweep_tree_count",
    "train",
    "tree_to_dot",
    "ttest_pvalue",
    "xavier_sigma",
]
