"""Non-informative initializations used to ablate the tree-derived topology."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mapping import (
    ROLE_FREE,
    Architecture,
    InitializedNetwork,
    InitStats,
    xavier_sigma,
)


@dataclass(frozen=True)
class SparsityBudget:
    """Per-weight-layer nonzero counts, mirrored from a mapped network."""

    counts: tuple[int, ...]


def budget_from_stats(stats: InitStats) -> SparsityBudget:
    return SparsityBudget(tuple(stats.nonzero_counts))


def _layer_shapes(arch: Architecture) -> list[tuple[int, int]]:
    widths = arch.widths
    return [(widths[k + 1], widths[k]) for k in range(len(widths) - 1)]


def _free_roles(arch: Architecture) -> list[list[str]]:
    # baselines carry no tree structure, so no neuron earns a tree role
    return [[ROLE_FREE] * w for w in arch.hidden_widths]


def random_dense_init(arch: Architecture, rng_seed: int = 0) -> InitializedNetwork:
    """Every weight and bias drawn from N(0, 3/(n_prev + n_cur))."""
    rng = np.random.default_rng(rng_seed)
    weights = []
    biases = []
    for rows, cols in _layer_shapes(arch):
        sigma = xavier_sigma(cols, rows)
        weights.append(rng.normal(0.0, sigma, size=(rows, cols)))
        biases.append(rng.normal(0.0, sigma, size=rows))
    return InitializedNetwork(arch, weights, biases, _free_roles(arch))


def random_sparse_init(arch: Architecture, budget: SparsityBudget,
                       rng_seed: int = 0) -> InitializedNetwork:
    """Random sparse layers holding the per-layer nonzero counts.

    Each layer first covers every row and every column (shuffle the longer
    dimension, walk the shuffled shorter one cyclically), then spends the
    remaining budget on uniformly random empty cells.
    """
    shapes = _layer_shapes(arch)
    if len(budget.counts) != len(shapes):
        raise ValueError(
            f"budget has {len(budget.counts)} layers, architecture has {len(shapes)}"
        )
    for count, (rows, cols) in zip(budget.counts, shapes):
        if count < max(rows, cols):
            raise ValueError(
                f"infeasible budget {count} for {rows}x{cols} layer "
                f"(needs at least {max(rows, cols)})"
            )
        if count > rows * cols:
            raise ValueError(
                f"budget {count} exceeds capacity of {rows}x{cols} layer"
            )

    rng = np.random.default_rng(rng_seed)
    weights = []
    biases = []
    for count, (rows, cols) in zip(budget.counts, shapes):
        sigma = xavier_sigma(cols, rows)
        w = np.zeros((rows, cols))
        if rows >= cols:
            longer = rng.permutation(rows)
            shorter = rng.permutation(cols)
            cells = [(int(longer[k]), int(shorter[k % cols])) for k in range(rows)]
        else:
            longer = rng.permutation(cols)
            shorter = rng.permutation(rows)
            cells = [(int(shorter[k % rows]), int(longer[k])) for k in range(cols)]
        taken = set(cells)
        remaining = count - len(cells)
        if remaining > 0:
            empty = [(r, c) for r in range(rows) for c in range(cols)
                     if (r, c) not in taken]
            picks = rng.choice(len(empty), size=remaining, replace=False)
            cells.extend(empty[int(p)] for p in picks)
        for r, c in cells:
            w[r, c] = rng.normal(0.0, sigma)
        weights.append(w)
        biases.append(rng.normal(0.0, sigma, size=rows))
    return InitializedNetwork(arch, weights, biases, _free_roles(arch))
