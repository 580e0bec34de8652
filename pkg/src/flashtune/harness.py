"""Experiment harness: repeated seeded runs, method comparison, report files.

Within one repeat every method sees the same seed-derived split and its own
fresh oracle, so measurement counts are comparable by construction.  Methods
that sample from a training pool (progressive, rank-based) use the
train/holdout/validation partition; pool searchers (flash, random, epal) get
the train and validation pools merged.  A method failure inside one repeat is
recorded as an "X" row instead of aborting the experiment.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import metrics
from .baselines import EpalParams, LivesParams, epal, progressive_sampling, random_search, rank_based
from .cart import CartParams
from .flash import FlashParams, flash_multi, flash_single
from .gp import GpParams
from .space import Dataset, SplitSpec, TableOracle, load_dataset, split
from .stats import SkParams, Treatment, quartile_report, scott_knott
from .synth import generate_synthetic

METHOD_KINDS = ("flash", "progressive", "rank", "epal", "random")
SINGLE_ONLY = ("progressive", "rank")
MULTI_ONLY = ("epal",)


@dataclass(frozen=True)
class MethodSpec:
    """One competitor: a label, a method kind, and per-method overrides."""

    kind: str
    label: str = ""
    options: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in METHOD_KINDS:
            raise ValueError(f"unknown method kind {self.kind!r}; choose from {METHOD_KINDS}")
        if not self.label:
            object.__setattr__(self, "label", self.kind)


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything one experiment needs; identical specs yield identical reports."""

    methods: tuple[MethodSpec, ...]
    manifest: str | Path | None = None
    data: str | Path | None = None
    synthetic: tuple[str, int] | None = None
    objectives: tuple[int, ...] = ()
    repeats: int = 20
    seed: int = 0
    flash: FlashParams = FlashParams()
    cart: CartParams = CartParams()
    lives: LivesParams = LivesParams()
    epsilon: float = 0.01
    max_wall_time: float | None = None
    with_replacement: bool = False
    split: SplitSpec = SplitSpec()
    sk: SkParams = SkParams()

    def __post_init__(self):
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if not self.methods:
            raise ValueError("at least one method is required")
        labels = [m.label for m in self.methods]
        if len(set(labels)) != len(labels):
            raise ValueError("method labels must be unique")
        has_files = self.manifest is not None and self.data is not None
        if has_files == (self.synthetic is not None):
            raise ValueError("provide either manifest+data paths or a synthetic spec")


@dataclass(frozen=True)
class MethodResult:
    """Outcome of one method in one repeat; failures keep the row with status X."""

    method: str
    repeat: int
    failed: bool
    rd: int | None = None
    pool_rd: int | None = None
    gd: float | None = None
    igd: float | None = None
    measurements: int | None = None
    acquisitions: int | None = None
    wall_time: float | None = None


@dataclass(frozen=True)
class QualityReport:
    dataset_label: str
    objective_names: tuple[str, ...]
    single_objective: bool
    methods: tuple[str, ...]
    repeats: int
    seed: int
    rows: tuple[MethodResult, ...]
    ranks: Mapping[str, Mapping[str, int | None]]

    def metric_names(self) -> tuple[str, ...]:
        if self.single_objective:
            return ("rd", "measurements")
        return ("gd", "igd", "measurements")

    def observations(self, metric: str, method: str) -> list[float]:
        return [
            float(getattr(r, metric))
            for r in self.rows
            if r.method == method and not r.failed and getattr(r, metric) is not None
        ]


class _ColumnOracle:
    """Restrict an oracle's objective vector to the selected columns."""

    def __init__(self, inner, columns: Sequence[int]):
        self._inner = inner
        self._columns = tuple(columns)

    def measure(self, config):
        values = self._inner.measure(config)
        return tuple(values[j] for j in self._columns)

    @property
    def count(self) -> int:
        return self._inner.count


def load_experiment_dataset(spec: ExperimentSpec) -> tuple[Dataset, str]:
    if spec.synthetic is not None:
        kind, n_options = spec.synthetic
        return generate_synthetic(kind, n_options, spec.seed), f"{kind}({n_options} options)"
    return load_dataset(spec.manifest, spec.data), str(spec.data)


def _pool_rank(dataset: Dataset, pool: np.ndarray, best: int, objective: int) -> int:
    direction = dataset.objectives[objective].direction
    values = dataset.values[pool, objective]
    pos = int(np.nonzero(pool == best)[0][0])
    return metrics.min_rank(values, pos, direction) - 1


def _run_one(
    method: MethodSpec,
    dataset: Dataset,
    objectives: tuple[int, ...],
    pools,
    seed: int,
    spec: ExperimentSpec,
) -> MethodResult:
    train_ids, hold_ids, val_ids, merged = pools
    directions = tuple(dataset.objectives[j].direction for j in objectives)
    single = len(objectives) == 1
    oracle = TableOracle(dataset)
    opt = method.options

    if single:
        run_oracle = oracle
        objective_col = objectives[0]
    else:
        run_oracle = _ColumnOracle(oracle, objectives)
        objective_col = 0

    fp = FlashParams(
        size=int(opt.get("size", spec.flash.size)),
        budget=int(opt.get("budget", spec.flash.budget)),
        n_projections=int(opt.get("projections", spec.flash.n_projections)),
        seed=seed,
    )

    if method.kind == "flash":
        cands = dataset.candidates(merged)
        if single:
            run = flash_single(cands, run_oracle, fp, directions[0], spec.cart, objective_col)
        else:
            run = flash_multi(cands, run_oracle, fp, directions, spec.cart)
    elif method.kind == "random":
        n = int(opt.get("n", fp.size + fp.budget))
        run = random_search(dataset.candidates(merged), run_oracle, n, directions, seed)
    elif method.kind in ("progressive", "rank"):
        if not single:
            raise ValueError(f"{method.kind} handles a single objective only")
        lives = LivesParams(
            lives=int(opt.get("lives", spec.lives.lives)),
            step=int(opt.get("step", spec.lives.step)),
        )
        fn = progressive_sampling if method.kind == "progressive" else rank_based
        _, run = fn(
            dataset.candidates(train_ids),
            dataset.candidates(hold_ids),
            dataset.candidates(val_ids),
            run_oracle,
            lives,
            spec.cart,
            direction=directions[0],
            objective=objective_col,
            seed=seed,
            with_replacement=bool(opt.get("with_replacement", spec.with_replacement)),
        )
    elif method.kind == "epal":
        if single:
            raise ValueError("epal handles multi-objective problems only")
        ep = EpalParams(
            epsilon=float(opt.get("epsilon", spec.epsilon)),
            init_size=int(opt.get("init_size", 20)),
            max_wall_time=opt.get("max_wall_time", spec.max_wall_time),
        )
        run = epal(dataset.candidates(merged), run_oracle, ep, directions, seed,
                   gp_params=opt.get("gp", GpParams(refine=True)))
    else:  # pragma: no cover - guarded by MethodSpec validation
        raise ValueError(method.kind)

    if oracle.count != len(run.evaluated):
        raise RuntimeError("oracle count does not match the run trace")

    if single:
        rd = metrics.rank_difference(run.best, dataset, objectives[0])
        pool = merged if method.kind in ("flash", "random") else val_ids
        pool_rd = _pool_rank(dataset, np.asarray(pool), run.best, objectives[0])
        return MethodResult(method.label, 0, False, rd=rd, pool_rd=pool_rd,
                            measurements=run.measurements_used,
                            acquisitions=run.acquisitions, wall_time=run.wall_time)

    true_vectors = _true_front_vectors(dataset, objectives)
    approx = [dict(run.evaluated)[i] for i in run.front]
    cmp = metrics.front_comparison(true_vectors, approx, directions)
    return MethodResult(method.label, 0, False, gd=metrics.gd(cmp), igd=metrics.igd(cmp),
                        measurements=run.measurements_used,
                        acquisitions=run.acquisitions, wall_time=run.wall_time)


def _true_front_vectors(dataset: Dataset, objectives: tuple[int, ...]):
    directions = tuple(dataset.objectives[j].direction for j in objectives)
    V = dataset.values[:, list(objectives)]
    idx = metrics.pareto_front(V, directions)
    return [tuple(V[i]) for i in idx]


def run_experiment(spec: ExperimentSpec, dataset: Dataset | None = None) -> QualityReport:
    """Execute every method for every repeat and rank the outcomes."""
    if dataset is None:
        dataset, label = load_experiment_dataset(spec)
    else:
        label = "in-memory dataset"
    objectives = spec.objectives or tuple(range(len(dataset.objectives)))
    for j in objectives:
        if not (0 <= j < len(dataset.objectives)):
            raise ValueError(f"objective index {j} outside dataset")
    single = len(objectives) == 1
    for m in spec.methods:
        if single and m.kind in MULTI_ONLY:
            raise ValueError(f"method {m.label!r} needs >= 2 objectives")
        if not single and m.kind in SINGLE_ONLY:
            raise ValueError(f"method {m.label!r} handles a single objective only")

    rows: list[MethodResult] = []
    for r in range(spec.repeats):
        seed_r = spec.seed + r
        parts = split(dataset, SplitSpec(
            spec.split.train_fraction, spec.split.holdout_fraction,
            spec.split.validation_fraction, seed=seed_r,
        ))
        train_ids, hold_ids, val_ids = parts
        merged = np.sort(np.concatenate([train_ids, val_ids]))
        pools = (train_ids, hold_ids, val_ids, merged)
        for m in spec.methods:
            try:
                result = _run_one(m, dataset, objectives, pools, seed_r, spec)
                rows.append(replace(result, repeat=r))
            except Exception:
                rows.append(MethodResult(m.label, r, True))

    labels = tuple(m.label for m in spec.methods)
    report = QualityReport(
        dataset_label=label,
        objective_names=tuple(dataset.objective_names[j] for j in objectives),
        single_objective=single,
        methods=labels,
        repeats=spec.repeats,
        seed=spec.seed,
        rows=tuple(rows),
        ranks={},
    )
    ranks: dict[str, dict[str, int | None]] = {}
    for metric in report.metric_names():
        treatments = []
        for label_ in labels:
            obs = report.observations(metric, label_)
            if obs:
                treatments.append(Treatment(label_, tuple(obs)))
        metric_ranks: dict[str, int | None] = {label_: None for label_ in labels}
        if treatments:
            metric_ranks.update(scott_knott(treatments, spec.sk))
        ranks[metric] = metric_ranks
    return replace(report, ranks=ranks)


def _fmt(value, as_int: bool = False) -> str:
    if value is None:
        return "X"
    if as_int:
        return str(int(value))
    return repr(float(value))


def render_report(report: QualityReport, include_timing: bool = False) -> str:
    """Human-readable text report: setup, quartile charts, failures."""
    lines = [
        "experiment report",
        f"dataset: {report.dataset_label}",
        f"objectives: {', '.join(report.objective_names)}",
        f"mode: {'single-objective' if report.single_objective else 'multi-objective'}",
        f"repeats: {report.repeats}  seed: {report.seed}",
        "",
    ]
    for metric in report.metric_names():
        lines.append(f"metric: {metric} (lower is better)")
        treatments = []
        ranks = {}
        for label in report.methods:
            obs = report.observations(metric, label)
            if obs:
                treatments.append(Treatment(label, tuple(obs)))
                ranks[label] = report.ranks[metric][label]
        if treatments:
            lines.append(quartile_report(treatments, ranks).rstrip("\n"))
        missing = [label for label in report.methods if not report.observations(metric, label)]
        for label in missing:
            lines.append(f"   X  {label}  no successful repeats")
        lines.append("")
    if include_timing:
        lines.append("wall time (median seconds per repeat)")
        for label in report.methods:
            obs = report.observations("wall_time", label)
            med = f"{np.median(obs):.3f}" if obs else "X"
            lines.append(f"      {label}  {med}")
        lines.append("")
    failures = [(r.method, r.repeat) for r in report.rows if r.failed]
    if failures:
        lines.append("failures (recorded as X):")
        for method, repeat in failures:
            lines.append(f"      {method}  repeat {repeat}")
        lines.append("")
    return "\n".join(lines)


def write_raw_results(report: QualityReport, path: Path, include_timing: bool = False) -> None:
    header = ["method", "repeat", "status", "rd", "pool_rd", "gd", "igd", "measurements",
              "acquisitions"]
    if include_timing:
        header.append("wall_time")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for r in report.rows:
            row = [
                r.method,
                r.repeat,
                "X" if r.failed else "ok",
                _fmt(r.rd, as_int=True),
                _fmt(r.pool_rd, as_int=True),
                _fmt(r.gd),
                _fmt(r.igd),
                _fmt(r.measurements, as_int=True),
                _fmt(r.acquisitions, as_int=True),
            ]
            if include_timing:
                row.append(_fmt(r.wall_time))
            writer.writerow(row)


def emit_plot_data(report: QualityReport, out_dir: str | Path, include_timing: bool = False) -> list[Path]:
    """Write one deterministic CSV per figure kind; returns the paths written.

    The wall-time file is only written when timing is requested, because its
    contents vary from run to run while everything else is seed-reproducible.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    by_key = {(r.method, r.repeat): r for r in report.rows}

    def cell(method: str, repeat: int, metric: str, as_int=False) -> str:
        r = by_key[(method, repeat)]
        if r.failed:
            return "X"
        return _fmt(getattr(r, metric), as_int=as_int)

    if report.single_objective:
        path = out / "rank_difference.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["method", "repeat", "rank_difference", "measurements"])
            for method in report.methods:
                for rep in range(report.repeats):
                    writer.writerow([method, rep,
                                     cell(method, rep, "rd", as_int=True),
                                     cell(method, rep, "measurements", as_int=True)])
        written.append(path)
    else:
        path = out / "quality_indicators.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["method", "repeat", "gd", "igd", "measurements"])
            for method in report.methods:
                for rep in range(report.repeats):
                    writer.writerow([method, rep,
                                     cell(method, rep, "gd"),
                                     cell(method, rep, "igd"),
                                     cell(method, rep, "measurements", as_int=True)])
        written.append(path)

    # measurement ratios as percent of a reference method, one column per method
    reference = report.methods[0]
    for label in report.methods:
        if label.startswith("progressive"):
            reference = label
            break
    path = out / "measurement_ratio.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(report.methods))
        for rep in range(report.repeats):
            ref = by_key[(reference, rep)]
            row = []
            for method in report.methods:
                r = by_key[(method, rep)]
                if r.failed or ref.failed or not ref.measurements:
                    row.append("X")
                else:
                    row.append(repr(100.0 * r.measurements / ref.measurements))
            writer.writerow(row)
    written.append(path)

    if include_timing:
        reference = report.methods[0]
        for label in report.methods:
            if label.startswith("flash"):
                reference = label
                break
        path = out / "time_gain.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(list(report.methods))
            for rep in range(report.repeats):
                ref = by_key[(reference, rep)]
                row = []
                for method in report.methods:
                    r = by_key[(method, rep)]
                    if r.failed or ref.failed or not ref.wall_time:
                        row.append("X")
                    else:
                        row.append(repr(r.wall_time / ref.wall_time))
                writer.writerow(row)
        written.append(path)
    return written
