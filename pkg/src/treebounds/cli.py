"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 verification failure.
"""

from __future__ import annotations

import csv
import io
import sys
import time
from typing import Sequence

import click

from .bounds import (
    CLAMP_MODES,
    PER_K,
    BoundCache,
    PriorConfig,
    log_growth_func_ub,
    log_parti_func_ub,
    parti_func_ub,
    stump_vcdim_real,
    vcdim_ub,
)
from .data import DataError, Dataset, FeatureLandscape, bundled_dataset_path, load_dataset, split_dataset
from .experiment import MODELS, SUMMARY_FIELDS, ExperimentConfig, run_experiment, run_seed
from .induction import GrowthConstraints, grow_greedy
from .tree import STUMP, TreeError, errors, height, n_leaves, parse_shape, tree_to_text
from .verification import block_equality, dominance_suite, stump_exactness

EXIT_USAGE, EXIT_DATA, EXIT_VERIFY = 1, 2, 3


class VerificationFailed(Exception):
    pass


def _counts(text: str | None) -> tuple[int, ...]:
    if not text:
        return ()
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise click.UsageError(f"category counts must be comma-separated integers, got {text!r}") from None


def _landscape(real: int, ordinal: str | None, nominal: str | None) -> FeatureLandscape:
    try:
        return FeatureLandscape(real, _counts(ordinal), _counts(nominal))
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None


def _shape(text: str):
    try:
        return parse_shape(text)
    except TreeError as exc:
        raise click.UsageError(str(exc)) from None


def _emit(rows: Sequence[dict], fmt: str) -> None:
    if not rows:
        return
    columns = list(rows[0])
    cells = [[_cell(row.get(col), col) for col in columns] for row in rows]
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(cells)
        click.echo(buffer.getvalue(), nl=False)
        return
    widths = [max(len(col), *(len(row[i]) for row in cells)) for i, col in enumerate(columns)]
    click.echo("  ".join(col.rjust(w) for col, w in zip(columns, widths)))
    for row in cells:
        click.echo("  ".join(v.rjust(w) for v, w in zip(row, widths)))


def _cell(value, column: str = "") -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        # wall-clock columns carry millisecond precision
        return f"{value:.3f}" if column.startswith("time") else f"{value:.4f}"
    return str(value)


def _load(path: str | None) -> Dataset:
    return load_dataset(path if path else bundled_dataset_path("iris"))


landscape_options = [
    click.option("--real", "real", type=click.IntRange(min=0), default=0, show_default=True, help="Real-valued features."),
    click.option("--ordinal", help="Category counts of ordinal features, e.g. 5,3."),
    click.option("--nominal", help="Category counts of nominal features, e.g. 4,4."),
]


def with_landscape(fn):
    for option in reversed(landscape_options):
        fn = option(fn)
    return fn


def format_option(default: str = "table"):
    return click.option("--format", "fmt", type=click.Choice(["csv", "table"]), default=default, show_default=True)
data_option = click.option("--data", type=click.Path(dir_okay=False), help="CSV with a schema header (default: bundled Iris).")


@click.group()
def cli() -> None:
    """Bounds on decision-tree classes, and trees grown and pruned with them."""


@cli.command()
@click.option("--shape", "shape_text", required=True, help="Shape: '.' is a leaf, '(L,R)' a node.")
@with_landscape
@click.option("--exact-stump", is_flag=True, help="Print the exact stump value instead of the bound.")
@click.option("--clamp", type=click.Choice(CLAMP_MODES), default=PER_K, show_default=True)
def vcdim(shape_text, real, ordinal, nominal, exact_stump, clamp) -> None:
    """Upper bound on the VC dimension of a tree class."""
    shape = _shape(shape_text)
    ls = _landscape(real, ordinal, nominal)
    if exact_stump:
        if shape != STUMP or ls.omega or ls.nu or ls.ell < 1:
            raise click.UsageError("--exact-stump needs the shape (.,.) and only real features")
        click.echo(stump_vcdim_real(ls.ell))
        return
    click.echo(vcdim_ub(shape, ls, BoundCache(), clamp))


@cli.command()
@click.option("--shape", "shape_text", required=True)
@click.option("-c", "--parts", "c", type=click.IntRange(min=1), required=True, help="Number of parts c.")
@click.option("-m", "--examples", "m", type=click.IntRange(min=1), required=True, help="Sample size m.")
@with_landscape
@click.option("--clamp", type=click.Choice(CLAMP_MODES), default=PER_K, show_default=True)
@format_option()
def bound(shape_text, c, m, real, ordinal, nominal, clamp, fmt) -> None:
    """Bounds on the c-partitioning function at m examples."""
    shape = _shape(shape_text)
    ls = _landscape(real, ordinal, nominal)
    cache = BoundCache()
    _emit([{
        "shape": shape.text, "c": c, "m": m,
        "parti_func_ub": parti_func_ub(shape, c, m, ls, cache, clamp),
        "log_parti_func_ub": log_parti_func_ub(shape, c, m, ls, cache).value,
    }], fmt)


@cli.command()
@click.option("--shape", "shape_text", required=True)
@click.option("--n-classes", type=click.IntRange(min=1), required=True)
@click.option("-m", "--examples", "m", type=click.IntRange(min=1), required=True)
@with_landscape
@format_option()
def growth(shape_text, n_classes, m, real, ordinal, nominal, fmt) -> None:
    """Log of an upper bound on the growth function."""
    shape = _shape(shape_text)
    ls = _landscape(real, ordinal, nominal)
    value = log_growth_func_ub(shape, n_classes, m, ls, BoundCache()).value
    _emit([{"shape": shape.text, "n_classes": n_classes, "m": m, "log_growth_func_ub": value}], fmt)


@cli.command()
@data_option
@click.option("--max-leaves", type=click.IntRange(min=1), default=75, show_default=True)
@click.option("--train-fraction", type=float, help="Grow on a seeded split instead of the full data.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--literal-gini", is_flag=True, help="Score splits by the unweighted sum of child impurities.")
def grow(data, max_leaves, train_fraction, seed, literal_gini) -> None:
    """Grow a tree greedily and print it in text form."""
    D = _load(data)
    if train_fraction is not None:
        D, _ = split_dataset(D, train_fraction, seed)
    t = grow_greedy(D, GrowthConstraints(max_leaves), weighted=not literal_gini)
    click.echo(tree_to_text(t))
    click.echo(f"leaves={n_leaves(t)} height={height(t)} train_acc={1 - errors(t, D.examples) / len(D):.4f}")


_RUN_COLUMNS = ("model", "seed", "train_acc", "val_acc", "test_acc", "leaves", "height", "time", "bound")


@cli.command()
@data_option
@click.option("--model", type=click.Choice([m.lower() for m in MODELS], case_sensitive=False), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--train-fraction", type=float, default=0.85, show_default=True)
@click.option("--max-leaves", type=click.IntRange(min=1), default=75, show_default=True)
@click.option("--delta", type=float, default=0.05, show_default=True)
@click.option("--r", "r", type=float, default=2 ** -10.5, show_default=True)
@click.option("--timing/--no-timing", default=True, help="Include wall-clock seconds.")
@click.option("--show-tree", is_flag=True, help="Also print the pruned tree in text form.")
@format_option("csv")
def prune(data, model, seed, train_fraction, max_leaves, delta, r, timing, show_tree, fmt) -> None:
    """Grow on a seeded split, prune with one model, report one row."""
    name = next(m for m in MODELS if m.lower() == model.lower())
    cfg = _config(n_runs=1, train_fraction=train_fraction, max_leaves=max_leaves, models=(name,), delta=delta, r=r)
    (rec,) = run_seed(_load(data), seed, cfg)
    row = {col: getattr(rec, col) for col in _RUN_COLUMNS}
    row["time"] = rec.time if timing else None
    _emit([row], fmt)
    if show_tree:
        click.echo(tree_to_text(rec.tree))


def _config(**kwargs) -> ExperimentConfig:
    try:
        return ExperimentConfig(**kwargs)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None


@cli.command()
@data_option
@click.option("--runs", type=click.IntRange(min=1), default=25, show_default=True)
@click.option("--models", default=",".join(MODELS), show_default=True)
@click.option("--seed", "base_seed", type=int, default=0, show_default=True)
@click.option("--train-fraction", type=float, default=0.85, show_default=True)
@click.option("--max-leaves", type=click.IntRange(min=1), default=75, show_default=True)
@click.option("--delta", type=float, default=0.05, show_default=True)
@click.option("--r", "r", type=float, default=2 ** -10.5, show_default=True)
@click.option("--cc-folds", type=click.IntRange(min=2), default=5, show_default=True)
@click.option("--timing/--no-timing", default=True)
@format_option()
def experiment(data, runs, models, base_seed, train_fraction, max_leaves, delta, r, cc_folds, timing, fmt) -> None:
    """Mean and standard deviation of every metric over seeded splits."""
    wanted = tuple(m.strip() for m in models.split(",") if m.strip())
    cfg = _config(
        n_runs=runs, train_fraction=train_fraction, max_leaves=max_leaves, models=wanted, delta=delta, r=r,
        cc_folds=cc_folds, base_seed=base_seed,
    )
    _, rows = run_experiment(_load(data), cfg)
    if not timing:
        for row in rows:
            row.pop("time_mean")
            row.pop("time_std")
    _emit(rows, fmt)


@cli.command()
@click.option("--instances", type=click.IntRange(min=1), default=500, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def verify(instances, seed) -> None:
    """Compare the bounds with exhaustive enumeration on tiny samples."""
    failures = 0
    for m, ell, got, want in stump_exactness():
        ok = got == want
        failures += not ok
        click.echo(f"{'PASS' if ok else 'FAIL'} stump m={m} ell={ell}: enumerated {got}, bound {want}")
    for m, ell, got, want in block_equality():
        ok = got == want
        failures += not ok
        click.echo(f"{'PASS' if ok else 'FAIL'} block sample m={m} ell={ell}: enumerated {got}, expected {want}")
    start = time.perf_counter()
    rows = dominance_suite(instances, seed)
    bad = [row for row in rows if not row.ok]
    failures += len(bad)
    for row in bad[:10]:
        inst = row.instance
        click.echo(f"FAIL dominance {inst.kind} shape={inst.shape} m={inst.m} c={inst.c}: {row}")
    click.echo(
        f"{'PASS' if not bad else 'FAIL'} dominance: {len(rows) - len(bad)}/{len(rows)} instances "
        f"in {time.perf_counter() - start:.1f}s"
    )
    if failures:
        raise VerificationFailed(f"{failures} verification failures")


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cli.main(args=list(argv) if argv is not None else None, prog_name="treebounds", standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return EXIT_USAGE
    except click.Abort:
        click.echo("aborted", err=True)
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except DataError as exc:
        click.echo(f"data error: {exc}", err=True)
        return EXIT_DATA
    except VerificationFailed as exc:
        click.echo(str(exc), err=True)
        return EXIT_VERIFY
    return 0


if __name__ == "__main__":
    sys.exit(main())
