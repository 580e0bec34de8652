"""Regression trees grown by recursive variance-reduction splitting.

The tree is the cheap surrogate the optimizer leans on: it only has to rank
configurations well enough to pick the next one to measure, so there is no
pruning and no smoothing beyond the leaf-size knobs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np


@dataclass(frozen=True)
class CartParams:
    min_samples_split: int = 4
    min_samples_leaf: int = 2
    max_depth: int | None = None

    def __post_init__(self):
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")
        if self.min_samples_split < 2 * self.min_samples_leaf:
            raise ValueError("min_samples_split must be >= 2 * min_samples_leaf")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be >= 1 or None")


@dataclass(frozen=True)
class Leaf:
    prediction: float
    count: int


@dataclass(frozen=True)
class Split:
    option_index: int
    threshold: float
    left: "TreeNode"
    right: "TreeNode"


TreeNode = Union[Leaf, Split]


def _best_split(X: np.ndarray, y: np.ndarray, min_leaf: int):
    """Best (gain, option index, threshold) over all candidate splits, or None.

    Thresholds are midpoints between consecutive distinct sorted values of
    each option within this node.  Ties in gain resolve to the lowest option
    index, then the lowest threshold.
    """
    n = y.size
    total_sum = y.sum()
    total_sq = (y * y).sum()
    base_sse = total_sq - total_sum * total_sum / n
    eps = 1e-12 * (abs(base_sse) + 1.0)

    best_gain = 0.0
    best = None
    for j in range(X.shape[1]):
        order = np.argsort(X[:, j], kind="stable")
        xv = X[order, j]
        yv = y[order]
        cuts = np.nonzero(xv[1:] > xv[:-1])[0]
        if cuts.size == 0:
            continue
        left_n = cuts + 1
        right_n = n - left_n
        ok = (left_n >= min_leaf) & (right_n >= min_leaf)
        if not ok.any():
            continue
        csum = np.cumsum(yv)
        csq = np.cumsum(yv * yv)
        ls = csum[cuts]
        lq = csq[cuts]
        rs = total_sum - ls
        rq = total_sq - lq
        child_sse = (lq - ls * ls / left_n) + (rq - rs * rs / right_n)
        gain = np.where(ok, base_sse - child_sse, -np.inf)
        k = int(np.argmax(gain))
        if gain[k] > best_gain + eps or (best is None and gain[k] > eps):
            best_gain = float(gain[k])
            thr = float((xv[cuts[k]] + xv[cuts[k] + 1]) / 2.0)
            best = (best_gain, j, thr)
    return best


def _grow(X: np.ndarray, y: np.ndarray, depth: int, params: CartParams) -> TreeNode:
    n = y.size
    if (
        n < params.min_samples_split
        or (params.max_depth is not None and depth >= params.max_depth)
        or y.max() == y.min()
    ):
        return Leaf(float(y.mean()), n)
    found = _best_split(X, y, params.min_samples_leaf)
    if found is None:
        return Leaf(float(y.mean()), n)
    _, j, thr = found
    mask = X[:, j] <= thr
    return Split(
        j,
        thr,
        _grow(X[mask], y[mask], depth + 1, params),
        _grow(X[~mask], y[~mask], depth + 1, params),
    )


def fit(xs, ys, params: CartParams = CartParams()) -> TreeNode:
    """Fit a regression tree on configuration rows `xs` and targets `ys`."""
    X = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if X.ndim != 2:
        raise ValueError("xs must be a 2-D array of configuration rows")
    if y.ndim != 1 or y.size != X.shape[0]:
        raise ValueError("ys must be a 1-D array aligned with xs")
    if y.size == 0:
        raise ValueError("cannot fit a tree on zero rows")
    if not np.isfinite(y).all():
        raise ValueError("targets must be finite")
    return _grow(X, y, 0, params)


def _max_option_index(tree: TreeNode) -> int:
    if isinstance(tree, Leaf):
        return -1
    return max(
        tree.option_index,
        _max_option_index(tree.left),
        _max_option_index(tree.right),
    )


def predict(tree: TreeNode, config: Sequence[float]) -> float:
    """Descend by threshold comparisons to a leaf and return its prediction."""
    node = tree
    while isinstance(node, Split):
        if node.option_index >= len(config):
            raise ValueError(
                f"configuration has {len(config)} options, tree splits on index {node.option_index}"
            )
        node = node.left if config[node.option_index] <= node.threshold else node.right
    return node.prediction


def predict_batch(tree: TreeNode, configs) -> np.ndarray:
    """Elementwise predict over many configurations; order preserved."""
    X = np.asarray(configs, dtype=float)
    if X.size == 0:
        return np.zeros(0, dtype=float)
    if X.ndim != 2:
        raise ValueError("configs must be a 2-D array of configuration rows")
    if X.shape[1] <= _max_option_index(tree):
        raise ValueError(
            f"configurations have {X.shape[1]} options, tree splits on index {_max_option_index(tree)}"
        )
    out = np.empty(X.shape[0], dtype=float)

    def walk(node: TreeNode, idx: np.ndarray) -> None:
        if isinstance(node, Leaf):
            out[idx] = node.prediction
            return
        mask = X[idx, node.option_index] <= node.threshold
        if mask.any():
            walk(node.left, idx[mask])
        if not mask.all():
            walk(node.right, idx[~mask])

    walk(tree, np.arange(X.shape[0]))
    return out


def dump_tree(tree: TreeNode, option_names: Sequence[str] | None = None) -> str:
    """Indented text rendering of a tree, for --dump-tree debugging output."""
    lines: list[str] = []

    def name(j: int) -> str:
        return option_names[j] if option_names is not None else f"option[{j}]"

    def walk(node: TreeNode, indent: int) -> None:
        pad = "  " * indent
        if isinstance(node, Leaf):
            lines.append(f"{pad}leaf prediction={node.prediction:.6g} count={node.count}")
        else:
            lines.append(f"{pad}split {name(node.option_index)} <= {node.threshold:.6g}")
            walk(node.left, indent + 1)
            walk(node.right, indent + 1)

    walk(tree, 0)
    return "\n".join(lines) + "\n"
