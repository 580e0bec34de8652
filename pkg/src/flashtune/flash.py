"""Sequential model-based search with a CART surrogate.

After a random warm-up sample, each step fits one regression tree per
objective on everything measured so far, predicts the rest of the pool, and
measures the candidate the acquisition rule likes best: plain best-predicted
value for one objective, the random-projection mean-weight rule for several.
Acquired candidates leave the pool, so nothing is measured twice.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import cart, metrics
from .runs import OptimizationRun, STOP_BUDGET, STOP_POOL_EXHAUSTED
from .space import MAXIMIZE, MINIMIZE


@dataclass(frozen=True)
class FlashParams:
    size: int = 30
    budget: int = 50
    n_projections: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("size must be >= 1")
        if self.budget < 0:
            raise ValueError("budget must be >= 0")
        if self.n_projections < 1:
            raise ValueError("n_projections must be >= 1")


def _direction_signs(directions: Sequence[str]) -> np.ndarray:
    signs = np.empty(len(directions))
    for j, d in enumerate(directions):
        if d == MINIMIZE:
            signs[j] = 1.0
        elif d == MAXIMIZE:
            signs[j] = -1.0
        else:
            raise ValueError(f"unknown direction {d!r}")
    return signs


def bazza_select(
    predicted,
    n_projections: int,
    directions: Sequence[str],
    seed: int,
) -> int:
    """Pick the candidate with the best mean score under random weight vectors.

    Predictions are mapped so larger is better (minimized objectives are
    negated), then min-max normalized to [0, 1] per objective over the
    candidate list so differently scaled objectives weigh comparably.  The
    mean over the weight vectors distributes over the sum, so this is a single
    pass over candidates.  Ties resolve to the lowest index.
    """
    P = np.asarray(predicted, dtype=float)
    if P.ndim != 2 or P.shape[0] == 0:
        raise ValueError("predicted must be a non-empty 2-D array")
    if P.shape[1] != len(directions):
        raise ValueError("prediction width must match the directions")
    if not np.isfinite(P).all():
        raise ValueError("predictions must be finite")
    if n_projections < 1:
        raise ValueError("n_projections must be >= 1")
    G = P * -_direction_signs(directions)
    lo = G.min(axis=0)
    span = G.max(axis=0) - lo
    span[span == 0.0] = 1.0
    G = (G - lo) / span
    weights = np.random.default_rng(seed).random((n_projections, len(directions)))
    scores = G @ weights.mean(axis=0)
    return int(np.argmax(scores))


class _Trace:
    """Measurement bookkeeping over a sorted candidate pool."""

    def __init__(self, candidates: Mapping[int, Sequence[float]], oracle):
        self.ids = np.array(sorted(candidates), dtype=int)
        self.X = np.array([candidates[int(i)] for i in self.ids], dtype=float)
        self.oracle = oracle
        self.measured = np.zeros(self.ids.size, dtype=bool)
        self.evaluated: list[tuple[int, tuple[float, ...]]] = []
        self.Y: np.ndarray | None = None

    def take(self, pos: int) -> None:
        values = tuple(float(v) for v in self.oracle.measure(tuple(self.X[pos])))
        if self.Y is None:
            self.Y = np.zeros((self.ids.size, len(values)))
        elif len(values) != self.Y.shape[1]:
            raise ValueError("oracle returned vectors of inconsistent width")
        self.measured[pos] = True
        self.Y[pos] = values
        self.evaluated.append((int(self.ids[pos]), values))

    def pool(self) -> np.ndarray:
        return np.nonzero(~self.measured)[0]


def _run(
    candidates: Mapping[int, Sequence[float]],
    oracle,
    params: FlashParams,
    directions: Sequence[str],
    cart_params: cart.CartParams,
    objective: int | None,
) -> OptimizationRun:
    start = time.perf_counter()
    trace = _Trace(candidates, oracle)
    n = trace.ids.size
    if n < params.size:
        raise ValueError(
            f"candidate pool has {n} configurations, need at least size={params.size}"
        )
    signs = _direction_signs(directions)
    rng = np.random.default_rng(params.seed)

    for pos in rng.choice(n, size=params.size, replace=False):
        trace.take(int(pos))
    width = trace.Y.shape[1]
    if objective is None and width != len(directions):
        raise ValueError(f"oracle returns {width} objectives, got {len(directions)} directions")
    if objective is not None and not (0 <= objective < width):
        raise ValueError(f"objective index {objective} outside oracle vector of width {width}")

    spent = 0
    stop = STOP_BUDGET
    while spent < params.budget:
        pool = trace.pool()
        if pool.size == 0:
            stop = STOP_POOL_EXHAUSTED
            break
        if params.budget - spent >= pool.size:
            # every remaining candidate gets measured regardless of the
            # acquisition order, so skip the pointless surrogate refits
            for pos in pool:
                trace.take(int(pos))
            spent += pool.size
            stop = STOP_POOL_EXHAUSTED
            break
        Xe = trace.X[trace.measured]
        Ye = trace.Y[trace.measured]
        if objective is not None:
            tree = cart.fit(Xe, Ye[:, objective], cart_params)
            preds = cart.predict_batch(tree, trace.X[pool]) * signs[0]
            pick = int(np.argmin(preds))
        else:
            preds = np.column_stack([
                cart.predict_batch(cart.fit(Xe, Ye[:, j], cart_params), trace.X[pool])
                for j in range(width)
            ])
            pick = bazza_select(
                preds, params.n_projections, directions, int(rng.integers(2 ** 63))
            )
        trace.take(int(pool[pick]))
        spent += 1

    wall = time.perf_counter() - start
    evaluated = trace.evaluated
    if objective is not None:
        scores = np.array([signs[0] * v[objective] for _, v in evaluated])
        best = evaluated[int(np.argmin(scores))][0]
        return OptimizationRun(tuple(evaluated), best, None, len(evaluated), wall, stop,
                               initial_sample=params.size)
    front_pos = metrics.pareto_front([v for _, v in evaluated], directions)
    front = tuple(sorted(evaluated[p][0] for p in front_pos))
    return OptimizationRun(tuple(evaluated), None, front, len(evaluated), wall, stop,
                           initial_sample=params.size)


def flash_single(
    candidates: Mapping[int, Sequence[float]],
    oracle,
    params: FlashParams = FlashParams(),
    direction: str = MINIMIZE,
    cart_params: cart.CartParams = cart.CartParams(),
    objective: int = 0,
) -> OptimizationRun:
    """Optimize one objective; `objective` selects the oracle vector column."""
    return _run(candidates, oracle, params, (direction,), cart_params, objective)


def flash_multi(
    candidates: Mapping[int, Sequence[float]],
    oracle,
    params: FlashParams = FlashParams(),
    directions: Sequence[str] = (MINIMIZE, MINIMIZE),
    cart_params: cart.CartParams = cart.CartParams(),
) -> OptimizationRun:
    """Optimize several objectives; returns the non-dominated measured front."""
    if len(directions) < 2:
        raise ValueError("flash_multi needs at least two objectives")
    return _run(candidates, oracle, params, directions, cart_params, None)
