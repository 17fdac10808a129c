"""CART decision trees, bootstrap forests, and the structural topology summary."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .validation import (
    CLASSIFICATION,
    REGRESSION,
    as_float_matrix,
    as_label_vector,
    check_positive_int,
    check_same_rows,
    check_task,
)


@dataclass
class TreeNode:
    kind: str  # "branch" or "leaf"
    level: int
    feature_index: int = -1
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    value: np.ndarray | int | None = None


@dataclass
class DecisionTree:
    root: TreeNode
    max_depth: int
    n_features: int
    task: str


@dataclass
class Forest:
    trees: list[DecisionTree]
    seeds: list[int]

    @property
    def n_features(self) -> int:
        return self.trees[0].n_features

    @property
    def task(self) -> str:
        return self.trees[0].task


@dataclass(frozen=True)
class TreeTopology:
    """Structure summary driving the network construction.

    depth: deepest level containing a branch, plus 1.
    branch_depth: depth - 1 (deepest level at which a branch sits).
    branch_counts: branches per level, length depth + 1, last entry 0.
    deepest_split_levels: per input, the deepest level at which it is
    split on, or None if the input is never split.
    """

    depth: int
    branch_depth: int
    branch_counts: tuple[int, ...]
    deepest_split_levels: tuple[int | None, ...]


def _resolve_subsample(rule, n_features: int, task: str) -> int:
    if rule == "auto":
        rule = None if task == REGRESSION else "sqrt"
    if rule is None or rule == "all":
        return n_features
    if rule == "sqrt":
        return min(n_features, math.ceil(math.sqrt(n_features)))
    k = check_positive_int(rule, "feature_subsample")
    return min(n_features, k)


def _best_split(x_block: np.ndarray, y, feats: np.ndarray, min_leaf: int,
                task: str, n_classes: int):
    """Exhaustive scan over midpoint candidates.

    Returns (feature, threshold) minimizing summed child impurity, or None.
    Ties resolve to the lowest feature index, then the smallest threshold:
    features are visited in ascending order with strict improvement, and
    argmin picks the first (smallest) of equal-score thresholds.
    """
    n = x_block.shape[0]
    if task == CLASSIFICATION:
        onehot = np.zeros((n, n_classes), dtype=np.float64)
        onehot[np.arange(n), y] = 1.0
    best_score = np.inf
    best = None
    for j, f in enumerate(feats):
        xs = x_block[:, j]
        order = np.argsort(xs, kind="stable")
        sx = xs[order]
        cut = np.nonzero(sx[1:] > sx[:-1])[0]
        if cut.size == 0:
            continue
        left_n = cut + 1
        valid = (left_n >= min_leaf) & (n - left_n >= min_leaf)
        if not np.any(valid):
            continue
        nl = left_n.astype(np.float64)
        nr = float(n) - nl
        if task == REGRESSION:
            ys = y[order]
            c1 = np.cumsum(ys, axis=0)
            c2 = np.cumsum(ys * ys, axis=0)
            sse_l = (c2[cut] - c1[cut] ** 2 / nl[:, None]).sum(axis=1)
            sse_r = ((c2[-1] - c2[cut]) - (c1[-1] - c1[cut]) ** 2 / nr[:, None]).sum(axis=1)
            score = sse_l + sse_r
        else:
            cc = np.cumsum(onehot[order], axis=0)
            cl = cc[cut]
            cr = cc[-1] - cl
            score = (nl - (cl ** 2).sum(axis=1) / nl) + (nr - (cr ** 2).sum(axis=1) / nr)
        score = np.where(valid, score, np.inf)
        k = int(np.argmin(score))
        if score[k] < best_score:
            best_score = float(score[k])
            best = (int(f), float((sx[cut[k]] + sx[cut[k] + 1]) / 2.0))
    return best


def _leaf(y, task: str, n_classes: int, level: int) -> TreeNode:
    if task == CLASSIFICATION:
        value = int(np.bincount(y, minlength=n_classes).argmax())
    else:
        value = y.mean(axis=0)
    return TreeNode(kind="leaf", level=level, value=value)


def _is_pure(y) -> bool:
    return bool(np.all(y == y[0]))


def fit_tree(features, targets, task: str, max_depth: int, min_leaf: int = 1,
             feature_subsample=None, rng_seed: int = 0) -> DecisionTree:
    """Greedy CART. Rows with x[feature] <= threshold go left.

    Splits minimize summed child SSE (regression, summed over outputs)
    or summed child Gini impurity (classification), over midpoints of
    consecutive sorted unique values of each candidate feature.
    """
    check_task(task)
    x = as_float_matrix(features, "features")
    if task == CLASSIFICATION:
        y = as_label_vector(targets, "targets")
        n_classes = int(y.max()) + 1
    else:
        y = as_float_matrix(targets, "targets")
        n_classes = 0
    check_same_rows(x, y, "features, targets")
    max_depth = check_positive_int(max_depth, "max_depth")
    min_leaf = check_positive_int(min_leaf, "min_leaf")
    if x.shape[0] < 2 * min_leaf:
        raise ValueError(
            f"need at least {2 * min_leaf} rows to split with min_leaf={min_leaf}"
        )
    m = _resolve_subsample(feature_subsample, x.shape[1], task)
    rng = np.random.default_rng(rng_seed)
    d = x.shape[1]

    def grow(rows: np.ndarray, level: int) -> TreeNode:
        yr = y[rows]
        if level >= max_depth or rows.size < 2 * min_leaf or _is_pure(yr):
            return _leaf(yr, task, n_classes, level)
        if m < d:
            feats = np.sort(rng.choice(d, size=m, replace=False))
        else:
            feats = np.arange(d)
        found = _best_split(x[np.ix_(rows, feats)], yr, feats, min_leaf, task, n_classes)
        if found is None:
            return _leaf(yr, task, n_classes, level)
        f, thr = found
        mask = x[rows, f] <= thr
        node = TreeNode(kind="branch", level=level, feature_index=f, threshold=thr)
        node.left = grow(rows[mask], level + 1)
        node.right = grow(rows[~mask], level + 1)
        return node

    root = grow(np.arange(x.shape[0]), 0)
    return DecisionTree(root=root, max_depth=max_depth, n_features=d, task=task)


def fit_forest(features, targets, task: str, n_trees: int, max_depth: int,
               min_leaf: int = 1, rng_seed: int = 0, bootstrap: bool = True,
               feature_subsample="auto") -> Forest:
    """Bootstrap ensemble; member i resamples and fits with seed rng_seed + i.

    feature_subsample "auto" uses every feature per split for regression
    and ceil(sqrt(n_features)) for classification.
    """
    n_trees = check_positive_int(n_trees, "n_trees")
    x = as_float_matrix(features, "features")
    n = x.shape[0]
    trees = []
    seeds = []
    for i in range(n_trees):
        seed = rng_seed + i
        if bootstrap:
            rows = np.random.default_rng(seed).integers(0, n, size=n)
        else:
            rows = np.arange(n)
        y = np.asarray(targets)[rows]
        trees.append(fit_tree(x[rows], y, task, max_depth, min_leaf,
                              feature_subsample, rng_seed=seed))
        seeds.append(seed)
    return Forest(trees=trees, seeds=seeds)


def predict_tree(tree: DecisionTree, features) -> np.ndarray:
    x = as_float_matrix(features, "features")
    if x.shape[1] != tree.n_features:
        raise ValueError(
            f"feature count {x.shape[1]} does not match tree ({tree.n_features})"
        )
    out = []
    for row in x:
        node = tree.root
        while node.kind == "branch":
            node = node.left if row[node.feature_index] <= node.threshold else node.right
        out.append(node.value)
    if tree.task == CLASSIFICATION:
        return np.asarray(out, dtype=np.int64)
    return np.asarray(out, dtype=np.float64)


def analyze_topology(tree: DecisionTree) -> TreeTopology:
    """Walk the tree and summarize branch structure per level and per input."""
    branch_levels: list[int] = []
    feat_levels: dict[int, int] = {}

    def walk(node: TreeNode) -> None:
        if node.kind == "branch":
            branch_levels.append(node.level)
            f = node.feature_index
            feat_levels[f] = max(feat_levels.get(f, -1), node.level)
            walk(node.left)
            walk(node.right)

    walk(tree.root)
    if not branch_levels:
        raise ValueError("tree is a single leaf; no branch nodes to analyze")
    depth = max(branch_levels) + 1
    counts = [0] * (depth + 1)
    for lvl in branch_levels:
        counts[lvl] += 1
    levels = tuple(
        feat_levels.get(i) for i in range(tree.n_features)
    )
    return TreeTopology(
        depth=depth,
        branch_depth=depth - 1,
        branch_counts=tuple(counts),
        deepest_split_levels=levels,
    )


def tree_to_dict(tree: DecisionTree) -> dict:
    def encode(node: TreeNode) -> dict:
        if node.kind == "leaf":
            value = node.value
            if isinstance(value, np.ndarray):
                value = value.tolist()
            return {"kind": "leaf", "level": node.level, "value": value}
        return {
            "kind": "branch",
            "level": node.level,
            "feature_index": node.feature_index,
            "threshold": node.threshold,
            "left": encode(node.left),
            "right": encode(node.right),
        }

    return {
        "root": encode(tree.root),
        "max_depth": tree.max_depth,
        "n_features": tree.n_features,
        "task": tree.task,
    }


def tree_from_dict(payload: dict) -> DecisionTree:
    task = check_task(payload["task"])

    def decode(obj: dict) -> TreeNode:
        if obj["kind"] == "leaf":
            value = obj["value"]
            if task == CLASSIFICATION:
                value = int(value)
            else:
                value = np.asarray(value, dtype=np.float64)
            return TreeNode(kind="leaf", level=int(obj["level"]), value=value)
        return TreeNode(
            kind="branch",
            level=int(obj["level"]),
            feature_index=int(obj["feature_index"]),
            threshold=float(obj["threshold"]),
            left=decode(obj["left"]),
            right=decode(obj["right"]),
        )

    return DecisionTree(
        root=decode(payload["root"]),
        max_depth=int(payload["max_depth"]),
        n_features=int(payload["n_features"]),
        task=task,
    )


def tree_to_dot(tree: DecisionTree, feature_names: list[str] | None = None) -> str:
    """Graphviz source for a tree; branches labeled "x <= t", leaves by payload."""
    names = feature_names or [f"x{i}" for i in range(tree.n_features)]
    lines = ["digraph tree {", "  node [shape=box];"]
    counter = [0]

    def emit(node: TreeNode) -> str:
        nid = f"n{counter[0]}"
        counter[0] += 1
        if node.kind == "leaf":
            if isinstance(node.value, np.ndarray):
                label = ", ".join(f"{v:.4g}" for v in node.value)
            else:
                label = f"class {node.value}"
            lines.append(f'  {nid} [label="{label}"];')
        else:
            lines.append(
                f'  {nid} [label="{names[node.feature_index]} <= {node.threshold:.4g}"];'
            )
            left = emit(node.left)
            right = emit(node.right)
            lines.append(f'  {nid} -> {left} [label="yes"];')
            lines.append(f'  {nid} -> {right} [label="no"];')
        return nid

    emit(tree.root)
    lines.append("}")
    return "\n".join(lines)
