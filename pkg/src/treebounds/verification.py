"""Checks of the bounds against exhaustive enumeration, used by ``treebounds verify``."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .bounds import (
    BoundCache,
    log_parti_func_ub,
    parti_func_ub,
    stump_pf2_real,
    tree_pf_nominal,
    tree_pf_ordinal,
    tree_pf_real,
)
from .bruteforce import (
    PERMUTATION_MATRICES,
    appendix_sample,
    enumerate_stump_partitions,
    enumerate_tree_partitions,
)
from .combinatorics import stirling2
from .data import Dataset, Example, FeatureLandscape
from .tree import TreeShape, parse_shape

SMALL_SHAPES = tuple(
    parse_shape(s)
    for s in (".", "(.,.)", "((.,.),.)", "(.,(.,.))", "((.,.),(.,.))", "(((.,.),.),.)", "((.,(.,.)),.)", "(.,((.,.),.))")
)


@dataclass(frozen=True)
class Instance:
    kind: str
    shape: TreeShape
    sample: Dataset
    c: int

    @property
    def m(self) -> int:
        return len(self.sample)


def random_instance(rng: random.Random, max_m: int = 7, max_ell: int = 3, max_k: int = 4) -> Instance:
    """A tiny sample of one feature kind (or a mixture), a shape with at most 4 leaves and c <= 3."""
    kind = rng.choice(("real", "ordinal", "nominal", "mixed"))
    ell = rng.randint(1, max_ell) if kind in ("real", "mixed") else 0
    omega = tuple(rng.randint(1, max_k) for _ in range(rng.randint(1, 2))) if kind in ("ordinal", "mixed") else ()
    nu = tuple(rng.randint(1, max_k) for _ in range(rng.randint(1, 2))) if kind in ("nominal", "mixed") else ()
    m = rng.randint(1, max_m)
    # distinct real values realize the most partitions
    orders = [rng.sample(range(m), m) for _ in range(ell)]
    examples = tuple(
        Example(
            tuple(float(order[i]) for order in orders),
            tuple(rng.randint(1, k) for k in omega),
            tuple(rng.randint(1, k) for k in nu),
        )
        for i in range(m)
    )
    sample = Dataset(FeatureLandscape(ell, omega, nu), examples, n_classes=1)
    return Instance(kind, rng.choice(SMALL_SHAPES), sample, rng.randint(1, 3))


@dataclass(frozen=True)
class DominanceRow:
    instance: Instance
    enumerated: int
    specific: int
    mixed: int
    stirling: int
    log_mixed: float

    @property
    def ok(self) -> bool:
        chain = self.enumerated <= self.specific <= self.mixed <= self.stirling
        relaxed = self.mixed == 0 or self.log_mixed >= math.log(self.mixed) - 1e-9
        return chain and relaxed


def dominance_row(inst: Instance, cache: BoundCache | None = None) -> DominanceRow:
    ls, m, c, shape = inst.sample.landscape, inst.m, inst.c, inst.shape
    mixed = parti_func_ub(shape, c, m, ls, cache)
    if inst.kind == "real":
        specific = tree_pf_real(shape, c, m, ls.ell, cache)
    elif inst.kind == "ordinal":
        specific = tree_pf_ordinal(shape, c, m, ls.omega_counts, cache)
    elif inst.kind == "nominal":
        specific = tree_pf_nominal(shape, c, m, ls.nu_counts, cache)
    else:
        specific = mixed
    return DominanceRow(
        inst,
        len(enumerate_tree_partitions(shape, inst.sample, c)),
        specific,
        mixed,
        stirling2(m, c),
        log_parti_func_ub(shape, c, m, ls, cache).value,
    )


def dominance_suite(n_instances: int = 500, seed: int = 0, cache: BoundCache | None = None) -> list[DominanceRow]:
    rng = random.Random(seed)
    return [dominance_row(random_instance(rng), cache) for _ in range(n_instances)]


def stump_exactness() -> list[tuple[int, int, int, int]]:
    """(m, ell, enumerated, bound) on the explicit worst-case samples for m = 2..7."""
    rows = []
    for m in range(2, 8):
        ell = len(PERMUTATION_MATRICES[m])
        rows.append((m, ell, len(enumerate_stump_partitions(appendix_sample(m, ell, "matrix"))), stump_pf2_real(m, ell)))
    return rows


def block_equality(pairs=((6, 3), (8, 2), (9, 3))) -> list[tuple[int, int, int, int]]:
    """(m, ell, enumerated, ell (m-1)) on the rotating block samples."""
    return [
        (m, ell, len(enumerate_stump_partitions(appendix_sample(m, ell, "block"))), ell * (m - 1))
        for m, ell in pairs
    ]
