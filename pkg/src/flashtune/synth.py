"""Desk-scale synthetic configuration spaces with known optima and fronts.

Each kind enumerates every combination of boolean options and computes its
objectives from a closed form, so the ground truth is available by scanning
the table.  Objectives are kept strictly positive so relative-error scoring
is always defined.

single-peak
    cost = 1 + sum_j w_j * |x_j - c_j| for seed-drawn weights w_j in
    (0.5, 2) and a hidden optimal configuration c.  Unique optimum at c.
interaction
    cost = shift + sum_j w_j x_j + sum_{(j,k)} u_jk x_j x_k with signed
    pairwise terms; shifted so the minimum is exactly 1.
bi-objective-tradeoff
    f1 = 1 + sum_j x_j and f2 = 1 + sum_j (1 - x_j), both minimized; every
    row is Pareto-optimal and the distinct objective vectors form a line.
"""

from __future__ import annotations

import itertools

import numpy as np

from .space import BOOLEAN, MINIMIZE, Dataset, ObjectiveSchema, OptionSchema

SINGLE_PEAK = "single-peak"
INTERACTION = "interaction"
BI_OBJECTIVE = "bi-objective-tradeoff"
KINDS = (SINGLE_PEAK, INTERACTION, BI_OBJECTIVE)

MAX_SPACE = 2 ** 20


def generate_synthetic(kind: str, n_options: int, seed: int) -> Dataset:
    """Enumerate a boolean space of 2**n_options rows for the given kind."""
    if kind not in KINDS:
        raise ValueError(f"unknown synthetic kind {kind!r}; choose from {KINDS}")
    if n_options < 2:
        raise ValueError("n_options must be >= 2")
    if 2 ** n_options > MAX_SPACE:
        raise ValueError(f"space of 2**{n_options} rows exceeds the guard limit {MAX_SPACE}")

    options = [OptionSchema(f"o{j:02d}", BOOLEAN) for j in range(n_options)]
    X = np.array(list(itertools.product((0.0, 1.0), repeat=n_options)))
    rng = np.random.default_rng(seed)

    if kind == SINGLE_PEAK:
        center = rng.integers(0, 2, size=n_options).astype(float)
        weights = rng.uniform(0.5, 2.0, size=n_options)
        y = 1.0 + np.abs(X - center) @ weights
        objectives = [ObjectiveSchema("perf", MINIMIZE)]
        return Dataset(options, objectives, X, y[:, None])

    if kind == INTERACTION:
        weights = rng.uniform(0.5, 2.0, size=n_options)
        pairs = list(itertools.combinations(range(n_options), 2))
        pick = rng.choice(len(pairs), size=min(n_options, len(pairs)), replace=False)
        raw = X @ weights
        for p in pick:
            j, k = pairs[int(p)]
            raw = raw + rng.uniform(-2.0, 2.0) * X[:, j] * X[:, k]
        y = raw - raw.min() + 1.0
        objectives = [ObjectiveSchema("perf", MINIMIZE)]
        return Dataset(options, objectives, X, y[:, None])

    f1 = 1.0 + X.sum(axis=1)
    f2 = 1.0 + (1.0 - X).sum(axis=1)
    objectives = [ObjectiveSchema("perf_a", MINIMIZE), ObjectiveSchema("perf_b", MINIMIZE)]
    return Dataset(options, objectives, X, np.column_stack([f1, f2]))
