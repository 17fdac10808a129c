"""Decision tree to initialized network: architecture, warm-start weights, pruning.

A network for a tree of branch depth B has B hidden layers (one per branch
level below the root) plus an output layer. Hidden layer l keeps the first
n(l-1) neuron slots aligned with the previous layer ("copy" slots, so input
i occupies index i everywhere) and appends one new slot per branch at tree
level l. Weight entries are written once and never overwritten: unity
passthrough entries first, then sampled decision-path entries in depth-first
left-to-right tree order, then all biases layer by layer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .tree import DecisionTree, TreeNode, TreeTopology, analyze_topology
from .validation import CLASSIFICATION, check_positive_int

ROLE_PASSTHROUGH = "passthrough"
ROLE_DECISION = "decision"
ROLE_FREE = "free"


@dataclass(frozen=True)
class Architecture:
    n_inputs: int
    hidden_widths: tuple[int, ...]
    n_outputs: int

    @property
    def widths(self) -> tuple[int, ...]:
        return (self.n_inputs, *self.hidden_widths, self.n_outputs)


@dataclass
class InitializedNetwork:
    architecture: Architecture
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    neuron_roles: list[list[str]]
    n_pruned: int = 0


@dataclass(frozen=True)
class InitStats:
    nonzero_counts: tuple[int, ...]
    unity_counts: tuple[int, ...]
    n_pruned: int


def xavier_sigma(n_prev: int, n_cur: int) -> float:
    """Standard deviation sqrt(3 / (n_prev + n_cur)) for nonzero draws."""
    n_prev = check_positive_int(n_prev, "n_prev")
    n_cur = check_positive_int(n_cur, "n_cur")
    return math.sqrt(3.0 / (n_prev + n_cur))


def architecture_from_topology(topology: TreeTopology, n_in: int,
                               n_out: int) -> Architecture:
    """Widths by accumulation: n(l) = n(l-1) + branches at level l.

    The root branch rides on its split feature's input neuron, so level 0
    adds nothing. Branch depth 0 (a stump) still gets one hidden layer of
    width n_in so every network has at least one hidden layer.
    """
    n_in = check_positive_int(n_in, "n_in")
    n_out = check_positive_int(n_out, "n_out")
    n_split = sum(1 for lvl in topology.deepest_split_levels if lvl is not None)
    if n_in < n_split:
        raise ValueError(
            f"n_in={n_in} smaller than the {n_split} features the tree splits on"
        )
    if topology.branch_depth == 0:
        return Architecture(n_in, (n_in,), n_out)
    widths = []
    cur = n_in
    for level in range(1, topology.branch_depth + 1):
        cur += topology.branch_counts[level]
        widths.append(cur)
    return Architecture(n_in, tuple(widths), n_out)


def map_tree(tree: DecisionTree, topology: TreeTopology, n_in: int, n_out: int,
             rng_seed: int = 0) -> InitializedNetwork:
    """Build the warm-start network for one tree.

    Nonzero weights and all biases are drawn from N(0, 3/(n_prev + n_cur))
    of the adjoining layer widths. Unity entries carry split-on inputs
    through layers below their deepest split level. Each non-root branch
    claims the next new slot of its level's layer and is fed by its parent's
    neuron and its split feature's carrier; each leaf forwards its parent's
    neuron diagonally through the remaining hidden layers and into the leaf
    class output (classification) or every output (regression).
    """
    if topology != analyze_topology(tree):
        raise ValueError("topology does not describe this tree")
    arch = architecture_from_topology(topology, n_in, n_out)
    widths = arch.widths
    n_layers = len(widths) - 1
    rng = np.random.default_rng(rng_seed)
    weights = [np.zeros((widths[k + 1], widths[k])) for k in range(n_layers)]
    sigmas = [xavier_sigma(widths[k], widths[k + 1]) for k in range(n_layers)]
    branch_depth = topology.branch_depth

    def write(layer: int, row: int, col: int) -> None:
        # first writer wins; a draw is only consumed when the slot is empty
        if weights[layer - 1][row, col] == 0.0:
            weights[layer - 1][row, col] = rng.normal(0.0, sigmas[layer - 1])

    def connect_leaf(node: TreeNode, parent_slot: int) -> None:
        # chain through every remaining hidden layer, then into the output;
        # n_layers covers the stump case, whose single hidden layer is synthetic
        for lam in range(node.level, n_layers):
            write(lam, parent_slot, parent_slot)
        out_layer = n_layers
        if tree.task == CLASSIFICATION:
            if not 0 <= int(node.value) < n_out:
                raise ValueError(f"leaf class {node.value} out of range for n_out={n_out}")
            write(out_layer, int(node.value), parent_slot)
        else:
            for row in range(n_out):
                write(out_layer, row, parent_slot)

    if branch_depth == 0:
        # stump: identity hidden layer, leaves wired from the root's carrier
        np.fill_diagonal(weights[0], 1.0)
        root = tree.root
        carrier = root.feature_index
        for child in (root.left, root.right):
            connect_leaf(child, carrier)
    else:
        for i, lmax in enumerate(topology.deepest_split_levels):
            if lmax is None:
                continue
            for layer in range(1, lmax):
                weights[layer - 1][i, i] = 1.0

        next_slot = [None] + [widths[k] for k in range(n_layers - 1)]

        def descend(node: TreeNode, slot: int) -> None:
            for child in (node.left, node.right):
                if child.kind == "leaf":
                    connect_leaf(child, slot)
                else:
                    new = next_slot[child.level]
                    next_slot[child.level] += 1
                    write(child.level, new, slot)
                    write(child.level, new, child.feature_index)
                    descend(child, new)

        descend(tree.root, tree.root.feature_index)

    biases = [rng.normal(0.0, sigmas[k], size=widths[k + 1]) for k in range(n_layers)]

    roles = []
    for k in range(n_layers - 1):
        layer_roles = []
        for s in range(widths[k + 1]):
            if s >= widths[k]:
                layer_roles.append(ROLE_DECISION)
            elif np.any(weights[k][s, :] != 0.0):
                layer_roles.append(ROLE_PASSTHROUGH)
            else:
                layer_roles.append(ROLE_FREE)
        roles.append(layer_roles)

    return InitializedNetwork(arch, weights, biases, roles)


def prune_dead_neurons(net: InitializedNetwork) -> InitializedNetwork:
    """Drop hidden neurons with no incoming weight and a negative bias.

    Neurons on decision paths always have incoming weights, so only free
    neurons that can never activate are removed. Widths shrink accordingly,
    which is what makes pruned hidden widths non-monotonic.
    """
    n_hidden = len(net.weights) - 1
    keep_prev = np.ones(net.architecture.n_inputs, dtype=bool)
    weights = []
    biases = []
    roles = []
    removed = 0
    for k in range(n_hidden):
        w = net.weights[k][:, keep_prev]
        keep = (np.abs(w).sum(axis=1) > 0.0) | (net.biases[k] >= 0.0)
        if not np.any(keep):
            raise ValueError(f"pruning would empty hidden layer {k + 1}")
        removed += int((~keep).sum())
        weights.append(w[keep])
        biases.append(net.biases[k][keep])
        roles.append([r for r, k_ in zip(net.neuron_roles[k], keep) if k_])
        keep_prev = keep
    weights.append(net.weights[-1][:, keep_prev])
    biases.append(net.biases[-1])
    arch = Architecture(
        net.architecture.n_inputs,
        tuple(w.shape[0] for w in weights[:-1]),
        net.architecture.n_outputs,
    )
    return InitializedNetwork(arch, weights, biases, roles,
                              n_pruned=net.n_pruned + removed)


def init_stats(net: InitializedNetwork) -> InitStats:
    nonzero = tuple(int(np.count_nonzero(w)) for w in net.weights)
    unity = tuple(int(np.sum(w == 1.0)) for w in net.weights)
    return InitStats(nonzero, unity, net.n_pruned)


def initialized_network_to_dict(net: InitializedNetwork) -> dict:
    return {
        "widths": list(net.architecture.widths),
        "weights": [w.tolist() for w in net.weights],
        "biases": [b.tolist() for b in net.biases],
        "neuron_roles": [list(r) for r in net.neuron_roles],
        "n_pruned": net.n_pruned,
    }


def initialized_network_from_dict(payload: dict) -> InitializedNetwork:
    widths = [int(w) for w in payload["widths"]]
    arch = Architecture(widths[0], tuple(widths[1:-1]), widths[-1])
    weights = [np.asarray(w, dtype=np.float64) for w in payload["weights"]]
    biases = [np.asarray(b, dtype=np.float64) for b in payload["biases"]]
    roles = [list(r) for r in payload["neuron_roles"]]
    net = InitializedNetwork(arch, weights, biases, roles,
                             n_pruned=int(payload.get("n_pruned", 0)))
    for k, w in enumerate(weights):
        if w.shape != (widths[k + 1], widths[k]):
            raise ValueError(f"weight layer {k + 1} has shape {w.shape}, "
                             f"expected {(widths[k + 1], widths[k])}")
    return net


def network_to_dot(weights: list[np.ndarray],
                   feature_names: list[str] | None = None,
                   neuron_roles: list[list[str]] | None = None) -> str:
    """Graphviz source: neurons as nodes per layer, nonzero weights as edges.

    Unity passthrough edges are drawn with penwidth=2; sampled edges thin.
    Free neurons (when roles are given) are marked with an asterisk.
    """
    widths = [weights[0].shape[1]] + [w.shape[0] for w in weights]
    names = feature_names or [f"x{i}" for i in range(widths[0])]
    lines = ["digraph network {", "  rankdir=LR;", "  node [shape=circle];"]

    def node_id(layer: int, idx: int) -> str:
        return f"l{layer}_{idx}"

    for layer, width in enumerate(widths):
        members = []
        for i in range(width):
            nid = node_id(layer, i)
            if layer == 0:
                label = names[i]
            elif layer == len(widths) - 1:
                label = f"y{i}"
            else:
                label = f"h{layer}.{i}"
                if neuron_roles is not None and neuron_roles[layer - 1][i] == ROLE_FREE:
                    label += "*"
            lines.append(f'  {nid} [label="{label}"];')
            members.append(nid)
        lines.append(f"  {{rank=same; {'; '.join(members)}}}")

    for k, w in enumerate(weights):
        rows, cols = np.nonzero(w)
        for r, c in zip(rows, cols):
            style = " [penwidth=2]" if w[r, c] == 1.0 else ""
            lines.append(f"  {node_id(k, int(c))} -> {node_id(k + 1, int(r))}{style};")
    lines.append("}")
    return "\n".join(lines)
