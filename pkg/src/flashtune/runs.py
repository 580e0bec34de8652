"""Shared optimizer run trace: what was measured, in what order, and the answer."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

STOP_BUDGET = "budget"
STOP_POOL_EXHAUSTED = "pool-exhausted"
STOP_LIVES = "lives"
STOP_WALL_TIME = "wall-time"


@dataclass(frozen=True)
class OptimizationRun:
    """Ordered measurement trace of one optimizer run.

    `evaluated` lists (candidate id, measured objective vector) in measurement
    order; `best` is set for single-objective runs, `front` (mutually
    non-dominated ids) for multi-objective ones.
    """

    evaluated: tuple[tuple[int, tuple[float, ...]], ...]
    best: int | None
    front: tuple[int, ...] | None
    measurements_used: int
    wall_time: float
    stop_reason: str
    initial_sample: int = 0

    def __post_init__(self):
        if self.measurements_used != len(self.evaluated):
            raise ValueError("measurements_used must equal the trace length")
        if not (0 <= self.initial_sample <= self.measurements_used):
            raise ValueError("initial_sample must lie within the trace length")
        ids = {i for i, _ in self.evaluated}
        if self.best is not None and self.best not in ids:
            raise ValueError("best must appear in the evaluated trace")
        if self.front is not None and not set(self.front) <= ids:
            raise ValueError("front members must appear in the evaluated trace")

    @property
    def evaluated_ids(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.evaluated)

    @property
    def acquisitions(self) -> int:
        """Measurements made after the warm-up / holdout phase."""
        return self.measurements_used - self.initial_sample


def write_trace_csv(
    run: OptimizationRun,
    path: str | Path,
    candidates: Mapping[int, Sequence[float]],
    option_names: Sequence[str],
    objective_names: Sequence[str],
) -> None:
    """Export a run trace as CSV: step, id, configuration values, objectives."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["step", "id", *option_names, *objective_names])
        for step, (cid, values) in enumerate(run.evaluated, start=1):
            writer.writerow(
                [step, cid]
                + [repr(float(v)) for v in candidates[cid]]
                + [repr(float(v)) for v in values]
            )
