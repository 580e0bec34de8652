"""Command-line front end.

Subcommands: tune (single-objective search), tune-mo (multi-objective),
baseline (one prior-work method), eval (score two fronts against a dataset),
experiment (the full repeated-comparison rig), synth (generate a synthetic
dataset with its ground truth).

Exit codes: 0 success, 1 validation error (bad inputs or arguments),
2 runtime failure.
"""

from __future__ import annotations

import csv
import sys
from dataclasses import replace
from pathlib import Path

import click
import numpy as np

from . import metrics
from .baselines import EpalParams, LivesParams, epal, progressive_sampling, random_search, rank_based
from .cart import CartParams, dump_tree, fit as cart_fit
from .flash import FlashParams, flash_multi, flash_single
from .harness import (
    ExperimentSpec,
    MethodSpec,
    emit_plot_data,
    load_experiment_dataset,
    render_report,
    run_experiment,
    write_raw_results,
)
from .runs import write_trace_csv
from .space import (
    Dataset,
    DatasetError,
    MeasureError,
    SplitSpec,
    TableOracle,
    load_dataset,
    save_dataset,
    split,
)
from .stats import SkParams
from .synth import KINDS, generate_synthetic


def _dataset_options(fn):
    fn = click.option("--manifest", type=click.Path(exists=True, dir_okay=False), required=True,
                      help="Manifest file declaring options and objectives.")(fn)
    fn = click.option("--data", type=click.Path(exists=True, dir_okay=False), required=True,
                      help="CSV table, one row per measured configuration.")(fn)
    return fn


def _cart_options(fn):
    fn = click.option("--cart-min-split", type=int, default=4, show_default=True,
                      help="Smallest node the tree may split.")(fn)
    fn = click.option("--cart-min-leaf", type=int, default=2, show_default=True,
                      help="Smallest leaf the tree may create.")(fn)
    return fn


def _search_options(fn):
    fn = click.option("--size", type=int, default=30, show_default=True,
                      help="Random configurations measured before the model loop.")(fn)
    fn = click.option("--budget", type=int, default=50, show_default=True,
                      help="Model-guided measurements after the initial sample.")(fn)
    return fn


@click.group()
def cli():
    """Find high-performing configurations with few measurements."""


def _resolve_objective(dataset: Dataset, objective: str) -> int:
    names = dataset.objective_names
    if objective in names:
        return names.index(objective)
    try:
        idx = int(objective)
    except ValueError:
        raise DatasetError(f"unknown objective {objective!r}; have {names}") from None
    if not (0 <= idx < len(names)):
        raise DatasetError(f"objective index {idx} outside dataset with {len(names)} objectives")
    return idx


def _write_summary(path: Path, lines: list[str]) -> None:
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


@cli.command()
@_dataset_options
@_cart_options
@_search_options
@click.option("--objective", default="0", show_default=True, help="Objective name or index.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(file_okay=False), required=True)
@click.option("--dump-tree", "dump_tree_flag", is_flag=True, help="Also write the final surrogate tree.")
def tune(manifest, data, cart_min_split, cart_min_leaf, size, budget, objective, seed, out, dump_tree_flag):
    """Single-objective model-based search over the whole dataset."""
    dataset = load_dataset(manifest, data)
    obj = _resolve_objective(dataset, objective)
    direction = dataset.objectives[obj].direction
    cart_params = CartParams(min_samples_split=cart_min_split, min_samples_leaf=cart_min_leaf)
    oracle = TableOracle(dataset)
    run = flash_single(
        dataset.candidates(), oracle,
        FlashParams(size=size, budget=budget, seed=seed),
        direction, cart_params, obj,
    )
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_trace_csv(run, out_dir / "trace.csv", dataset.candidates(),
                    dataset.option_names, dataset.objective_names)
    rd = metrics.rank_difference(run.best, dataset, obj)
    best_cfg = dataset.config(run.best)
    _write_summary(out_dir / "summary.txt", [
        f"objective: {dataset.objective_names[obj]} ({direction})",
        f"best id: {run.best}",
        "best configuration: " + ", ".join(
            f"{n}={v:g}" for n, v in zip(dataset.option_names, best_cfg)),
        f"best measured value: {dataset.values[run.best, obj]!r}",
        f"rank difference: {rd}",
        f"measurements used: {run.measurements_used}",
        f"stop reason: {run.stop_reason}",
    ])
    if dump_tree_flag:
        Xe = np.array([dataset.config(i) for i, _ in run.evaluated])
        ye = np.array([v[obj] for _, v in run.evaluated])
        tree = cart_fit(Xe, ye, cart_params)
        (out_dir / "tree.txt").write_text(dump_tree(tree, dataset.option_names), encoding="utf-8")
    click.echo(f"best id {run.best}, rank difference {rd}, "
               f"{run.measurements_used} measurements -> {out_dir}")


@cli.command("tune-mo")
@_dataset_options
@_cart_options
@_search_options
@click.option("--projections", type=int, default=10, show_default=True,
              help="Random weight vectors per acquisition step.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(file_okay=False), required=True)
def tune_mo(manifest, data, cart_min_split, cart_min_leaf, size, budget, projections, seed, out):
    """Multi-objective model-based search; writes the measured front."""
    dataset = load_dataset(manifest, data)
    if len(dataset.objectives) < 2:
        raise DatasetError("tune-mo needs a dataset with at least two objectives")
    cart_params = CartParams(min_samples_split=cart_min_split, min_samples_leaf=cart_min_leaf)
    oracle = TableOracle(dataset)
    run = flash_multi(
        dataset.candidates(), oracle,
        FlashParams(size=size, budget=budget, n_projections=projections, seed=seed),
        dataset.directions, cart_params,
    )
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_trace_csv(run, out_dir / "trace.csv", dataset.candidates(),
                    dataset.option_names, dataset.objective_names)
    _write_front_csv(out_dir / "front.csv", dataset, run.front)
    true_vectors = [tuple(dataset.values[i]) for i in
                    metrics.pareto_front(dataset.values, dataset.directions)]
    approx = [tuple(dataset.values[i]) for i in run.front]
    cmp = metrics.front_comparison(true_vectors, approx, dataset.directions)
    _write_summary(out_dir / "summary.txt", [
        f"objectives: {', '.join(dataset.objective_names)}",
        f"front size: {len(run.front)}",
        f"gd: {metrics.gd(cmp)!r}",
        f"igd: {metrics.igd(cmp)!r}",
        f"measurements used: {run.measurements_used}",
        f"stop reason: {run.stop_reason}",
    ])
    click.echo(f"front of {len(run.front)} configurations, "
               f"{run.measurements_used} measurements -> {out_dir}")


def _write_front_csv(path: Path, dataset: Dataset, ids) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", *dataset.option_names, *dataset.objective_names])
        for i in ids:
            writer.writerow(
                [i]
                + [repr(float(v)) for v in dataset.configs[i]]
                + [repr(float(v)) for v in dataset.values[i]]
            )


@cli.command()
@_dataset_options
@_cart_options
@_search_options
@click.option("--method", type=click.Choice(["flash", "progressive", "rank", "epal", "random"]),
              required=True)
@click.option("--objective", default="0", show_default=True, help="Objective name or index.")
@click.option("--lives", type=int, default=3, show_default=True)
@click.option("--epsilon", type=float, default=0.01, show_default=True)
@click.option("--with-replacement", is_flag=True,
              help="Sample the training pool with replacement (literal prior-work procedure).")
@click.option("--max-wall-time", type=float, default=None,
              help="Abort epal with partial results after this many seconds.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(file_okay=False), required=True)
def baseline(manifest, data, cart_min_split, cart_min_leaf, size, budget, method, objective,
             lives, epsilon, with_replacement, max_wall_time, seed, out):
    """Run one method once, on the same pools the experiment rig uses."""
    dataset = load_dataset(manifest, data)
    cart_params = CartParams(min_samples_split=cart_min_split, min_samples_leaf=cart_min_leaf)
    train_ids, hold_ids, val_ids = split(dataset, SplitSpec(seed=seed))
    merged = np.sort(np.concatenate([train_ids, val_ids]))
    oracle = TableOracle(dataset)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)

    summary = [f"method: {method}", f"seed: {seed}"]
    if method in ("progressive", "rank"):
        obj = _resolve_objective(dataset, objective)
        fn = progressive_sampling if method == "progressive" else rank_based
        _, run = fn(
            dataset.candidates(train_ids), dataset.candidates(hold_ids),
            dataset.candidates(val_ids), oracle,
            LivesParams(lives=lives), cart_params,
            direction=dataset.objectives[obj].direction, objective=obj,
            seed=seed, with_replacement=with_replacement,
        )
        summary.append(f"best id: {run.best}")
        summary.append(f"rank difference: {metrics.rank_difference(run.best, dataset, obj)}")
    elif method == "epal":
        if len(dataset.objectives) < 2:
            raise DatasetError("epal needs a dataset with at least two objectives")
        run = epal(dataset.candidates(merged), oracle,
                   EpalParams(epsilon=epsilon, max_wall_time=max_wall_time),
                   dataset.directions, seed)
        summary.append(f"front size: {len(run.front)}")
    elif method == "random":
        obj = _resolve_objective(dataset, objective)
        directions = (dataset.objectives[obj].direction,) if len(dataset.objectives) == 1 \
            else dataset.directions
        run = random_search(dataset.candidates(merged), oracle, size + budget, directions, seed)
        if run.best is not None:
            summary.append(f"best id: {run.best}")
            summary.append(f"rank difference: {metrics.rank_difference(run.best, dataset, obj)}")
        else:
            summary.append(f"front size: {len(run.front)}")
    else:
        obj = _resolve_objective(dataset, objective)
        run = flash_single(
            dataset.candidates(merged), oracle,
            FlashParams(size=size, budget=budget, seed=seed),
            dataset.objectives[obj].direction, cart_params, obj,
        )
        summary.append(f"best id: {run.best}")
        summary.append(f"rank difference: {metrics.rank_difference(run.best, dataset, obj)}")

    summary.append(f"measurements used: {run.measurements_used}")
    summary.append(f"stop reason: {run.stop_reason}")
    write_trace_csv(run, out_dir / "trace.csv", dataset.candidates(),
                    dataset.option_names, dataset.objective_names)
    _write_summary(out_dir / "summary.txt", summary)
    click.echo(f"{method}: {run.measurements_used} measurements -> {out_dir}")


@cli.command("eval")
@_dataset_options
@click.option("--true-front", type=click.Path(exists=True, dir_okay=False), required=True,
              help="CSV of option columns naming the reference front rows.")
@click.option("--approx-front", type=click.Path(exists=True, dir_okay=False), required=True,
              help="CSV of option columns naming the approximated front rows.")
def eval_fronts(manifest, data, true_front, approx_front):
    """Score an approximated front against a reference front on a dataset."""
    dataset = load_dataset(manifest, data)
    true_ids = _read_front_ids(dataset, Path(true_front))
    approx_ids = _read_front_ids(dataset, Path(approx_front))
    true_vectors = [tuple(dataset.values[i]) for i in true_ids]
    approx_vectors = [tuple(dataset.values[i]) for i in approx_ids]
    cmp = metrics.front_comparison(true_vectors, approx_vectors, dataset.directions)
    click.echo(f"gd={metrics.gd(cmp)!r}")
    click.echo(f"igd={metrics.igd(cmp)!r}")
    for j, name in enumerate(dataset.objective_names):
        direction = dataset.objectives[j].direction
        col = [dataset.values[i, j] for i in approx_ids]
        best_pos = int(np.argmin(col)) if direction == "minimize" else int(np.argmax(col))
        rd = metrics.rank_difference(approx_ids[best_pos], dataset, j)
        click.echo(f"rd[{name}]={rd}")


def _read_front_ids(dataset: Dataset, path: Path) -> list[int]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DatasetError(f"{path} is empty") from None
        cols = []
        for name in dataset.option_names:
            if name not in header:
                raise DatasetError(f"{path} is missing option column {name!r}")
            cols.append(header.index(name))
        ids = []
        for rowno, record in enumerate(reader, start=1):
            if not record or all(not c.strip() for c in record):
                continue
            try:
                config = tuple(float(record[c]) for c in cols)
            except (ValueError, IndexError):
                raise DatasetError(f"{path} row {rowno}: non-numeric option value") from None
            try:
                ids.append(dataset.lookup(config))
            except KeyError:
                raise DatasetError(f"{path} row {rowno}: configuration not in dataset") from None
    if not ids:
        raise DatasetError(f"{path} lists no configurations")
    return ids


@cli.command()
@click.option("--manifest", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--data", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--kind", type=click.Choice(KINDS), default=None,
              help="Generate a synthetic dataset instead of loading files.")
@click.option("--options", "n_options", type=int, default=10, show_default=True,
              help="Boolean options for the synthetic dataset.")
@click.option("--methods", default="flash,random", show_default=True,
              help="Comma list; epal takes a colon suffix for epsilon, random for its budget "
                   "(e.g. 'flash,epal:0.01,epal:0.3' or 'flash,random:50').")
@click.option("--objectives", default="", help="Comma list of objective names or indices; default all.")
@click.option("--repeats", type=int, default=20, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@_cart_options
@_search_options
@click.option("--projections", type=int, default=10, show_default=True)
@click.option("--lives", type=int, default=3, show_default=True)
@click.option("--epsilon", type=float, default=0.01, show_default=True)
@click.option("--with-replacement", is_flag=True)
@click.option("--max-wall-time", type=float, default=None)
@click.option("--emit-timing", is_flag=True,
              help="Also write wall-time data; those files vary run to run.")
@click.option("--out", type=click.Path(file_okay=False), required=True)
def experiment(manifest, data, kind, n_options, methods, objectives, repeats, seed,
               cart_min_split, cart_min_leaf, size, budget, projections, lives, epsilon,
               with_replacement, max_wall_time, emit_timing, out):
    """Repeat every method over seeded splits and rank the results."""
    method_specs = []
    for token in [t.strip() for t in methods.split(",") if t.strip()]:
        kind_name, _, arg = token.partition(":")
        options_map = {}
        label = kind_name
        if arg:
            if kind_name == "epal":
                options_map["epsilon"] = float(arg)
            elif kind_name == "random":
                options_map["n"] = int(arg)
            elif kind_name == "flash":
                options_map["budget"] = int(arg)
            else:
                raise DatasetError(f"method {kind_name!r} takes no parameter suffix")
            label = f"{kind_name}_{arg}"
        method_specs.append(MethodSpec(kind_name, label, options_map))

    spec = ExperimentSpec(
        methods=tuple(method_specs),
        manifest=manifest,
        data=data,
        synthetic=(kind, n_options) if kind else None,
        repeats=repeats,
        seed=seed,
        flash=FlashParams(size=size, budget=budget, n_projections=projections, seed=seed),
        cart=CartParams(min_samples_split=cart_min_split, min_samples_leaf=cart_min_leaf),
        lives=LivesParams(lives=lives),
        epsilon=epsilon,
        max_wall_time=max_wall_time,
        with_replacement=with_replacement,
        sk=SkParams(seed=seed),
    )
    dataset, _ = load_experiment_dataset(spec)
    if objectives:
        idx = tuple(_resolve_objective(dataset, o.strip()) for o in objectives.split(","))
        spec = replace(spec, objectives=idx)
    report = run_experiment(spec, dataset)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.txt").write_text(render_report(report, include_timing=emit_timing),
                                        encoding="utf-8")
    write_raw_results(report, out_dir / "results.csv", include_timing=emit_timing)
    emit_plot_data(report, out_dir, include_timing=emit_timing)
    click.echo(render_report(report, include_timing=emit_timing))
    click.echo(f"report files -> {out_dir}")


@cli.command()
@click.option("--kind", type=click.Choice(KINDS), required=True)
@click.option("--options", "n_options", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(file_okay=False), required=True)
def synth(kind, n_options, seed, out):
    """Generate a synthetic dataset plus its brute-force ground truth."""
    dataset = generate_synthetic(kind, n_options, seed)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_dataset(dataset, out_dir / "manifest.txt", out_dir / "data.csv")
    with open(out_dir / "truth.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["kind", "objective", "id"])
        for j, name in enumerate(dataset.objective_names):
            for i in metrics.best_rows(dataset, j):
                writer.writerow(["best", name, i])
        if len(dataset.objectives) >= 2:
            for i in metrics.pareto_front(dataset.values, dataset.directions):
                writer.writerow(["front", "", i])
    click.echo(f"{dataset.n_rows} rows -> {out_dir}")


def main(argv=None) -> int:
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except (DatasetError, ValueError) as exc:
        click.echo(f"validation error: {exc}", err=True)
        return 1
    except click.ClickException as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except MeasureError as exc:
        click.echo(f"runtime failure: {exc}", err=True)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        click.echo(f"runtime failure: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
