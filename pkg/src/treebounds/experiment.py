"""Repeated train/test runs comparing the pruning models."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bounds import BoundCache, PriorConfig
from .data import Dataset, split_count, split_dataset
from .induction import GrowthConstraints, grow_greedy
from .pruning import DEFAULT_KM_GRID, PruneResult, prune_bound, prune_cc, prune_km, prune_oracle, prune_re
from .tree import Tree, errors, height, n_leaves

MODELS = ("OG", "CC", "RE", "KM", "Ours", "Oracle")


@dataclass(frozen=True)
class ExperimentConfig:
    n_runs: int = 25
    train_fraction: float = 0.85
    max_leaves: int = 75
    models: tuple[str, ...] = MODELS
    delta: float = 0.05
    r: float = 2 ** -10.5
    cc_folds: int = 5
    km_folds: int = 5
    km_grid: tuple[float, ...] = DEFAULT_KM_GRID
    base_seed: int = 0

    def __post_init__(self) -> None:
        if self.n_runs < 1:
            raise ValueError("n_runs must be at least 1")
        if not 0 < self.train_fraction < 1:
            raise ValueError("train_fraction must lie in (0, 1)")
        unknown = set(self.models) - set(MODELS)
        if unknown:
            raise ValueError(f"unknown models: {sorted(unknown)}")

    @property
    def prior(self) -> PriorConfig:
        return PriorConfig(self.delta, self.r)


@dataclass
class RunRecord:
    model: str
    seed: int
    train_acc: float
    test_acc: float
    leaves: int
    height: int
    time: float
    val_acc: float | None = None
    bound: float | None = None
    result: PruneResult | None = field(default=None, repr=False)
    tree: Tree | None = field(default=None, repr=False)


def _accuracy(t: Tree, S: Dataset) -> float:
    return 1.0 - errors(t, S.examples) / len(S) if len(S) else float("nan")


def run_seed(
    D: Dataset, seed: int, cfg: ExperimentConfig = ExperimentConfig(), cache: BoundCache | None = None
) -> list[RunRecord]:
    """One split of ``D`` and one record per requested model, in ``MODELS`` order."""
    cache = cache if cache is not None else BoundCache()
    constraints = GrowthConstraints(cfg.max_leaves)
    train, test = split_dataset(D, cfg.train_fraction, seed)
    start = time.perf_counter()
    og = grow_greedy(train, constraints)
    grow_time = time.perf_counter() - start
    records = []

    def record(model: str, tree: Tree, elapsed: float, fit: Dataset = train, **extra) -> None:
        records.append(
            RunRecord(model, seed, _accuracy(tree, fit), _accuracy(tree, test), n_leaves(tree), height(tree),
                      elapsed, tree=tree, **extra)
        )

    for model in MODELS:
        if model not in cfg.models:
            continue
        start = time.perf_counter()
        if model == "OG":
            record(model, og, grow_time)
        elif model == "Ours":
            res = prune_bound(og, train, cfg.prior, cache)
            record(model, res.tree, time.perf_counter() - start, bound=res.final_bound, result=res)
        elif model == "CC":
            res = prune_cc(og, train, cfg.cc_folds, seed, constraints)
            record(model, res.tree, time.perf_counter() - start, result=res)
        elif model == "KM":
            res = prune_km(og, train, cfg.km_grid, cfg.km_folds, cfg.delta, cache, seed, constraints)
            record(model, res.tree, time.perf_counter() - start, result=res)
        elif model == "Oracle":
            res = prune_oracle(og, test, label_sample=train)
            record(model, res.tree, time.perf_counter() - start, result=res)
        elif model == "RE":
            # the validation part matches the test part in size
            fit, val = split_count(train, len(train) - len(test), seed)
            og_re = grow_greedy(fit, constraints)
            res = prune_re(og_re, val, label_sample=fit)
            record(model, res.tree, time.perf_counter() - start, fit=fit, val_acc=_accuracy(res.tree, val),
                   result=res)
    return records


SUMMARY_FIELDS = ("train_acc", "val_acc", "test_acc", "leaves", "height", "time", "bound")


def summarize(records: Sequence[RunRecord], models: Sequence[str] = MODELS) -> list[dict]:
    """Mean and population standard deviation of each metric, one row per model."""
    rows = []
    for model in models:
        mine = [r for r in records if r.model == model]
        if not mine:
            continue
        row: dict = {"model": model, "runs": len(mine)}
        for name in SUMMARY_FIELDS:
            values = [getattr(r, name) for r in mine if getattr(r, name) is not None]
            row[f"{name}_mean"] = float(np.mean(values)) if values else None
            row[f"{name}_std"] = float(np.std(values)) if values else None
        rows.append(row)
    return rows


def run_experiment(
    D: Dataset, cfg: ExperimentConfig = ExperimentConfig(), cache: BoundCache | None = None
) -> tuple[list[RunRecord], list[dict]]:
    cache = cache if cache is not None else BoundCache()
    records = []
    for run in range(cfg.n_runs):
        records += run_seed(D, cfg.base_seed + run, cfg, cache)
    return records, summarize(records, cfg.models)
