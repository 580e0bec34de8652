"""Evaluation measures: relative error, rank agreement, dominance, fronts.

Everything here is pure and direction-aware.  Objective vectors are mapped to
canonical minimize form internally so every comparison reads the same way.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .space import MINIMIZE, MAXIMIZE, Dataset


def _as_min(values, directions) -> np.ndarray:
    """Map objective values so smaller is better in every column."""
    V = np.asarray(values, dtype=float)
    out = V.copy()
    flat = out.ndim == 1
    if flat:
        out = out[None, :]
    if out.shape[1] != len(directions):
        raise ValueError("objective vector length does not match directions")
    for j, d in enumerate(directions):
        if d == MAXIMIZE:
            out[:, j] = -out[:, j]
        elif d != MINIMIZE:
            raise ValueError(f"unknown direction {d!r}")
    return out[0] if flat else out


def mmre(predicted: Sequence[float], actual: Sequence[float]) -> float:
    """Mean magnitude of relative error, in percent.

    Defined as mean(|predicted - actual| / actual) * 100.  The denominator is
    the actual value itself, so non-positive actuals are rejected rather than
    silently flipping the sign of the error.
    """
    p = np.asarray(predicted, dtype=float)
    a = np.asarray(actual, dtype=float)
    if p.shape != a.shape or p.ndim != 1 or p.size == 0:
        raise ValueError("predicted and actual must be equal-length non-empty vectors")
    if (a <= 0).any():
        raise ValueError("mmre is undefined for non-positive actual values")
    return float(np.mean(np.abs(p - a) / a) * 100.0)


def average_ranks(values: Sequence[float]) -> np.ndarray:
    """Ascending 1-based ranks; tied values share the average of their positions."""
    v = np.asarray(values, dtype=float)
    order = np.argsort(v, kind="stable")
    ranks = np.empty(v.size, dtype=float)
    sv = v[order]
    i = 0
    while i < v.size:
        j = i
        while j + 1 < v.size and sv[j + 1] == sv[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def mu_rd(predicted: Sequence[float], actual: Sequence[float]) -> float:
    """Mean absolute difference between predicted and actual rank orderings."""
    p = np.asarray(predicted, dtype=float)
    a = np.asarray(actual, dtype=float)
    if p.shape != a.shape or p.ndim != 1 or p.size == 0:
        raise ValueError("predicted and actual must be equal-length non-empty vectors")
    return float(np.mean(np.abs(average_ranks(a) - average_ranks(p))))


def min_rank(values: Sequence[float], i: int, direction: str = MINIMIZE) -> int:
    """1-based rank of entry i, counting ties as the smallest tied rank."""
    v = _as_min(np.asarray(values, dtype=float)[:, None], (direction,))[:, 0]
    return int(np.sum(v < v[i])) + 1


def rank_difference(
    predicted_best: int,
    dataset: Dataset,
    objective: int = 0,
    direction: str | None = None,
) -> int:
    """|rank(actual best) - rank(predicted best)| over the whole dataset.

    Rank 1 is the best row.  Ties take the smallest rank among equal values,
    so picking any tied optimum scores 0.
    """
    if not (0 <= predicted_best < dataset.n_rows):
        raise ValueError(f"unknown row id {predicted_best}")
    if direction is None:
        direction = dataset.objectives[objective].direction
    column = dataset.values[:, objective]
    return min_rank(column, predicted_best, direction) - 1


def dominates(a: Sequence[float], b: Sequence[float], directions: Sequence[str]) -> bool:
    """True iff `a` is no worse than `b` everywhere and strictly better somewhere."""
    av = _as_min(a, directions)
    bv = _as_min(b, directions)
    if av.shape != bv.shape:
        raise ValueError("objective vectors must have the same shape")
    return bool(np.all(av <= bv) and np.any(av < bv))


def _front_mask(V: np.ndarray) -> np.ndarray:
    """Non-dominated mask for rows of V (already mapped to minimize form)."""
    n, m = V.shape
    if m == 2:
        # sort by (f0, f1); a row is dominated iff an earlier f0-group reaches
        # an equal-or-smaller f1, or its own group holds a strictly smaller f1
        keep = np.ones(n, dtype=bool)
        order = np.lexsort((V[:, 1], V[:, 0]))
        best_prev = np.inf
        i = 0
        while i < n:
            j = i
            while j + 1 < n and V[order[j + 1], 0] == V[order[i], 0]:
                j += 1
            group = order[i:j + 1]
            group_min = V[group, 1].min()
            for k in group:
                if V[k, 1] >= best_prev or V[k, 1] > group_min:
                    keep[k] = False
            best_prev = min(best_prev, group_min)
            i = j + 1
        return keep
    keep = np.ones(n, dtype=bool)
    for i in range(n):
        le = np.all(V <= V[i], axis=1)
        lt = np.any(V < V[i], axis=1)
        if np.any(le & lt):
            keep[i] = False
    return keep


def pareto_front(points, directions: Sequence[str]) -> tuple[int, ...]:
    """Indices of points not dominated by any other; duplicates all retained."""
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[0] == 0:
        raise ValueError("points must be a non-empty 2-D array")
    keep = _front_mask(_as_min(P, directions))
    return tuple(int(i) for i in np.nonzero(keep)[0])


def best_rows(dataset: Dataset, objective: int = 0, direction: str | None = None) -> tuple[int, ...]:
    """Row ids attaining the optimal value of one objective (ties included)."""
    if direction is None:
        direction = dataset.objectives[objective].direction
    v = _as_min(dataset.values[:, objective][:, None], (direction,))[:, 0]
    return tuple(int(i) for i in np.nonzero(v == v.min())[0])


@dataclass(frozen=True)
class FrontComparison:
    """A true front, an approximated front, and normalization ranges.

    Ranges come from the true front; objectives whose range collapses are
    dropped from the distance computation.
    """

    true_front: tuple[tuple[float, ...], ...]
    approx_front: tuple[tuple[float, ...], ...]
    lo: tuple[float, ...]
    hi: tuple[float, ...]
    active: tuple[int, ...]


def front_comparison(true_front, approx_front, directions: Sequence[str]) -> FrontComparison:
    """Validate two fronts and derive normalization ranges from the true one."""
    T = np.asarray(true_front, dtype=float)
    A = np.asarray(approx_front, dtype=float)
    if T.ndim != 2 or T.shape[0] == 0 or A.ndim != 2 or A.shape[0] == 0:
        raise ValueError("both fronts must be non-empty 2-D arrays")
    if T.shape[1] != A.shape[1] or T.shape[1] != len(directions):
        raise ValueError("front objective counts must match the directions")
    for name, F in (("true", T), ("approx", A)):
        if len(pareto_front(F, directions)) != F.shape[0]:
            raise ValueError(f"{name} front is not internally non-dominated")
    lo = T.min(axis=0)
    hi = T.max(axis=0)
    active = tuple(int(j) for j in range(T.shape[1]) if hi[j] > lo[j])
    if not active:
        raise ValueError("every objective is degenerate on the true front")
    return FrontComparison(
        tuple(map(tuple, T)),
        tuple(map(tuple, A)),
        tuple(lo),
        tuple(hi),
        active,
    )


def _normalized(cmp: FrontComparison, front) -> np.ndarray:
    F = np.asarray(front, dtype=float)[:, list(cmp.active)]
    lo = np.asarray(cmp.lo)[list(cmp.active)]
    hi = np.asarray(cmp.hi)[list(cmp.active)]
    return (F - lo) / (hi - lo)


def _mean_nearest(src: np.ndarray, dst: np.ndarray) -> float:
    d2 = ((src[:, None, :] - dst[None, :, :]) ** 2).sum(axis=2)
    return float(np.mean(np.sqrt(d2.min(axis=1))))


def gd(cmp: FrontComparison) -> float:
    """Mean distance from each approximated point to its nearest true point."""
    return _mean_nearest(_normalized(cmp, cmp.approx_front), _normalized(cmp, cmp.true_front))


def igd(cmp: FrontComparison) -> float:
    """Mean distance from each true point to its nearest approximated point."""
    return _mean_nearest(_normalized(cmp, cmp.true_front), _normalized(cmp, cmp.approx_front))
