"""Prior-work optimizers used as comparison points.

Progressive and rank-based sampling both grow a training set one random
configuration at a time and stop after `lives` consecutive model-building
steps fail to improve a holdout score (negated relative error for the first,
mean rank difference for the second).  Both charge the holdout measurements
to the run.  ePAL keeps a Gaussian process per objective and discards
candidates whose optimistic prediction is epsilon-dominated by some other
point's pessimistic one.  Random search is the control.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import cart, metrics
from .gp import GpParams, gp_fit, gp_predict_batch
from .runs import (
    OptimizationRun,
    STOP_BUDGET,
    STOP_LIVES,
    STOP_POOL_EXHAUSTED,
    STOP_WALL_TIME,
)
from .space import MAXIMIZE, MINIMIZE


@dataclass(frozen=True)
class LivesParams:
    lives: int = 3
    step: int = 1

    def __post_init__(self):
        if self.lives < 1:
            raise ValueError("lives must be >= 1")
        if self.step < 1:
            raise ValueError("step must be >= 1")


@dataclass(frozen=True)
class EpalParams:
    epsilon: float = 0.01
    init_size: int = 20
    max_wall_time: float | None = None

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.init_size < 1:
            raise ValueError("init_size must be >= 1")


def _sorted_pool(candidates: Mapping[int, Sequence[float]]):
    ids = np.array(sorted(candidates), dtype=int)
    X = np.array([candidates[int(i)] for i in ids], dtype=float)
    return ids, X


def _sign(direction: str) -> float:
    if direction == MINIMIZE:
        return 1.0
    if direction == MAXIMIZE:
        return -1.0
    raise ValueError(f"unknown direction {direction!r}")


def _lives_loop(
    train_pool: Mapping[int, Sequence[float]],
    holdout: Mapping[int, Sequence[float]],
    validation: Mapping[int, Sequence[float]],
    oracle,
    params: LivesParams,
    cart_params: cart.CartParams,
    direction: str,
    objective: int,
    seed: int,
    with_replacement: bool,
    scorer,
) -> tuple[cart.TreeNode, OptimizationRun]:
    """Shared grow/score/lose-a-life loop.

    `scorer(predicted, actual)` maps holdout predictions to a score where
    higher is better; a life is lost whenever the score fails to improve.
    """
    start = time.perf_counter()
    if not train_pool or not holdout or not validation:
        raise ValueError("train pool, holdout, and validation must be non-empty")
    if set(train_pool) & set(holdout):
        raise ValueError("holdout must be disjoint from the train pool")
    pool_ids, pool_X = _sorted_pool(train_pool)
    hold_ids, hold_X = _sorted_pool(holdout)
    val_ids, val_X = _sorted_pool(validation)
    rng = np.random.default_rng(seed)

    evaluated: list[tuple[int, tuple[float, ...]]] = []

    def measure(cid: int, config) -> tuple[float, ...]:
        values = tuple(float(v) for v in oracle.measure(tuple(config)))
        evaluated.append((cid, values))
        return values

    # the holdout is measured up front and its cost charged to this run
    hold_actual = np.array(
        [measure(int(i), x)[objective] for i, x in zip(hold_ids, hold_X)]
    )

    if with_replacement:
        order = rng.integers(0, pool_ids.size, size=pool_ids.size)
    else:
        order = rng.permutation(pool_ids.size)

    train_X: list[np.ndarray] = []
    train_y: list[float] = []
    tree: cart.TreeNode | None = None
    lives = params.lives
    # worst score first, so the first model never costs a life
    last_score = -np.inf
    stop = STOP_POOL_EXHAUSTED
    cursor = 0
    while cursor < order.size:
        chunk = order[cursor:cursor + params.step]
        cursor += params.step
        for pos in chunk:
            values = measure(int(pool_ids[pos]), pool_X[pos])
            train_X.append(pool_X[pos])
            train_y.append(values[objective])
        tree = cart.fit(np.array(train_X), np.array(train_y), cart_params)
        preds = cart.predict_batch(tree, hold_X)
        score = scorer(preds, hold_actual)
        if score <= last_score:
            lives -= 1
        last_score = score
        if lives == 0:
            stop = STOP_LIVES
            break

    # the model's answer: best predicted configuration in the validation pool
    val_preds = cart.predict_batch(tree, val_X) * _sign(direction)
    best_pos = int(np.argmin(val_preds))
    best_id = int(val_ids[best_pos])
    measure(best_id, val_X[best_pos])

    run = OptimizationRun(
        tuple(evaluated),
        best_id,
        None,
        len(evaluated),
        time.perf_counter() - start,
        stop,
        initial_sample=hold_ids.size,
    )
    return tree, run


def progressive_sampling(
    train_pool: Mapping[int, Sequence[float]],
    holdout: Mapping[int, Sequence[float]],
    validation: Mapping[int, Sequence[float]],
    oracle,
    params: LivesParams = LivesParams(),
    cart_params: cart.CartParams = cart.CartParams(),
    direction: str = MINIMIZE,
    objective: int = 0,
    seed: int = 0,
    with_replacement: bool = False,
) -> tuple[cart.TreeNode, OptimizationRun]:
    """Residual-based sampling: holdout accuracy is the negated relative error."""
    return _lives_loop(
        train_pool, holdout, validation, oracle, params, cart_params,
        direction, objective, seed, with_replacement,
        scorer=lambda preds, actual: -metrics.mmre(preds, actual),
    )


def rank_based(
    train_pool: Mapping[int, Sequence[float]],
    holdout: Mapping[int, Sequence[float]],
    validation: Mapping[int, Sequence[float]],
    oracle,
    params: LivesParams = LivesParams(),
    cart_params: cart.CartParams = cart.CartParams(),
    direction: str = MINIMIZE,
    objective: int = 0,
    seed: int = 0,
    with_replacement: bool = False,
) -> tuple[cart.TreeNode, OptimizationRun]:
    """Rank-based sampling: a life is lost when the holdout mean rank
    difference stops decreasing."""
    return _lives_loop(
        train_pool, holdout, validation, oracle, params, cart_params,
        direction, objective, seed, with_replacement,
        scorer=lambda preds, actual: -metrics.mu_rd(preds, actual),
    )


def random_search(
    candidates: Mapping[int, Sequence[float]],
    oracle,
    n: int,
    directions: Sequence[str],
    seed: int = 0,
) -> OptimizationRun:
    """Measure n uniformly chosen distinct candidates; the control baseline."""
    start = time.perf_counter()
    ids, X = _sorted_pool(candidates)
    if n < 1 or n > ids.size:
        raise ValueError(f"n must lie in [1, {ids.size}]")
    rng = np.random.default_rng(seed)
    chosen = rng.choice(ids.size, size=n, replace=False)
    evaluated = []
    for pos in chosen:
        values = tuple(float(v) for v in oracle.measure(tuple(X[pos])))
        evaluated.append((int(ids[pos]), values))
    wall = time.perf_counter() - start
    if len(directions) == 1:
        scores = np.array([_sign(directions[0]) * v[0] for _, v in evaluated])
        best = evaluated[int(np.argmin(scores))][0]
        return OptimizationRun(tuple(evaluated), best, None, n, wall, STOP_BUDGET)
    front_pos = metrics.pareto_front([v for _, v in evaluated], directions)
    front = tuple(sorted(evaluated[p][0] for p in front_pos))
    return OptimizationRun(tuple(evaluated), None, front, n, wall, STOP_BUDGET)


def epsilon_discard(
    h_measured: np.ndarray,
    h_unknown: np.ndarray,
    s_unknown: np.ndarray,
    epsilon: float,
) -> np.ndarray:
    """Mask of unknown candidates discarded by the epsilon-dominance rule.

    Operates in larger-is-better space.  Candidate a is discarded when some
    other point b's pessimistic vector, shifted up by epsilon, is at least
    a's optimistic vector everywhere and strictly above it somewhere.
    Measured points are their own pessimistic bound (sigma 0); a candidate
    never discards itself.
    """
    pess = np.vstack([h_measured, h_unknown - s_unknown]) + epsilon
    optimistic = h_unknown + s_unknown
    ge = np.all(pess[:, None, :] >= optimistic[None, :, :], axis=2)
    gt = np.any(pess[:, None, :] > optimistic[None, :, :], axis=2)
    pair = ge & gt
    idx = np.arange(h_unknown.shape[0])
    pair[h_measured.shape[0] + idx, idx] = False
    return pair.any(axis=0)


def epal(
    candidates: Mapping[int, Sequence[float]],
    oracle,
    params: EpalParams = EpalParams(),
    directions: Sequence[str] = (MINIMIZE, MINIMIZE),
    seed: int = 0,
    gp_params: GpParams = GpParams(refine=True),
) -> OptimizationRun:
    """Pareto active learning with a Gaussian process per objective.

    Loops until every candidate is measured or discarded: fit the processes,
    predict (mu, sigma) for the unevaluated pool, discard any candidate whose
    optimistic vector is epsilon-dominated by another point's pessimistic one,
    then measure the most uncertain survivor (largest sigma-vector norm).
    Comparisons happen in per-objective min-max normalized space over the
    values measured so far, so epsilon is scale-free.  A wall-clock limit
    aborts with partial results.
    """
    start = time.perf_counter()
    if len(directions) < 2:
        raise ValueError("epal needs at least two objectives")
    ids, X = _sorted_pool(candidates)
    n = ids.size
    if n < params.init_size:
        raise ValueError(f"candidate pool has {n} rows, need init_size={params.init_size}")
    m = len(directions)
    signs = np.array([_sign(d) for d in directions])

    # normalize inputs per option over the candidate set for the kernel
    x_lo = X.min(axis=0)
    x_span = X.max(axis=0) - x_lo
    x_span[x_span == 0.0] = 1.0
    Xn = (X - x_lo) / x_span

    rng = np.random.default_rng(seed)
    measured = np.zeros(n, dtype=bool)
    discarded = np.zeros(n, dtype=bool)
    Y = np.zeros((n, m))
    evaluated: list[tuple[int, tuple[float, ...]]] = []

    def take(pos: int) -> None:
        values = tuple(float(v) for v in oracle.measure(tuple(X[pos])))
        if len(values) != m:
            raise ValueError("oracle returned a vector of unexpected width")
        measured[pos] = True
        Y[pos] = values
        evaluated.append((int(ids[pos]), values))

    for pos in rng.choice(n, size=params.init_size, replace=False):
        take(int(pos))

    stop = STOP_POOL_EXHAUSTED
    while True:
        unknown = np.nonzero(~measured & ~discarded)[0]
        if unknown.size == 0:
            break
        if params.max_wall_time is not None and time.perf_counter() - start > params.max_wall_time:
            stop = STOP_WALL_TIME
            break

        # larger-is-better mapped targets, one GP per objective
        G_meas = -(Y[measured] * signs)
        mu = np.empty((unknown.size, m))
        sd = np.empty((unknown.size, m))
        for j in range(m):
            g = gp_fit(Xn[measured], G_meas[:, j], gp_params)
            mu[:, j], sd[:, j] = gp_predict_batch(g, Xn[unknown])

        lo = G_meas.min(axis=0)
        span = G_meas.max(axis=0) - lo
        span[span == 0.0] = 1.0
        h_meas = (G_meas - lo) / span
        h_unknown = (mu - lo) / span
        s_unknown = sd / span

        discard_now = epsilon_discard(
            h_meas, h_unknown, s_unknown, params.epsilon
        )
        discarded[unknown[discard_now]] = True

        survivors = unknown[~discard_now]
        if survivors.size == 0:
            break
        norms = np.linalg.norm(s_unknown[~discard_now], axis=1)
        take(int(survivors[int(np.argmax(norms))]))

    wall = time.perf_counter() - start
    front_pos = metrics.pareto_front([v for _, v in evaluated], directions)
    front = tuple(sorted(evaluated[p][0] for p in front_pos))
    return OptimizationRun(tuple(evaluated), None, front, len(evaluated), wall, stop,
                           initial_sample=params.init_size)
