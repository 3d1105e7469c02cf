"""Exhaustive enumeration of realizable partitions on tiny samples, and worst-case samples for stumps.

These routines share no code with :mod:`treebounds.bounds`; they serve as
independent oracles for it.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Iterator

from .data import Dataset, Example, FeatureLandscape
from .tree import TreeShape

MAX_EXAMPLES = 8
MAX_LEAVES = 4

Partition = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class RealizedPartitionSet:
    """Distinct partitions of example indices, each a sorted tuple of sorted blocks."""

    partitions: frozenset[Partition]

    def __len__(self) -> int:
        return len(self.partitions)

    def __iter__(self) -> Iterator[Partition]:
        return iter(sorted(self.partitions))

    def __contains__(self, item: object) -> bool:
        return item in self.partitions

    def histogram(self) -> dict[int, int]:
        """Number of partitions per part count."""
        return dict(sorted(Counter(len(p) for p in self.partitions).items()))


def _blocks(masks: frozenset[int] | tuple[int, ...]) -> Partition:
    return tuple(sorted(tuple(i for i in range(mask.bit_length()) if mask >> i & 1) for mask in masks))


def _rule_masks(S: Dataset) -> list[int]:
    """Left-sets of every rule of the landscape, with both child orientations."""
    full = (1 << len(S)) - 1
    ls = S.landscape
    masks = set()

    def mask_of(pred) -> int:
        return sum(1 << i for i, x in enumerate(S.examples) if pred(x))

    for j in range(ls.ell):
        # a threshold below every value sends nothing left
        masks.add(0)
        for v in {x.reals[j] for x in S.examples}:
            masks.add(mask_of(lambda x: x.reals[j] <= v))
    for j, k in enumerate(ls.omega_counts):
        for theta in range(1, k):
            masks.add(mask_of(lambda x: x.ordinals[j] <= theta))
    for j, k in enumerate(ls.nu_counts):
        for cat in range(1, k + 1):
            masks.add(mask_of(lambda x: x.nominals[j] == cat))
    return sorted(masks | {full ^ mask for mask in masks})


def enumerate_stump_partitions(S: Dataset) -> RealizedPartitionSet:
    """All nontrivial 2-partitions that one rule realizes on ``S``."""
    m = len(S)
    if m < 2:
        return RealizedPartitionSet(frozenset())
    full = (1 << m) - 1
    found = set()
    for mask in _rule_masks(S):
        if mask not in (0, full):
            found.add(_blocks((mask, full ^ mask)))
    return RealizedPartitionSet(frozenset(found))


def _leaf_partitions(shape: TreeShape, subset: int, masks: list[int], memo: dict) -> set[frozenset[int]]:
    key = (shape.text, subset)
    if key in memo:
        return memo[key]
    if shape.is_leaf:
        result = {frozenset({subset}) if subset else frozenset()}
    else:
        result = set()
        for mask in masks:
            lefts = _leaf_partitions(shape.left, subset & mask, masks, memo)
            rights = _leaf_partitions(shape.right, subset & ~mask, masks, memo)
            for pl in lefts:
                for pr in rights:
                    result.add(pl | pr)
    memo[key] = result
    return result


def _groupings(items: list[int], c: int) -> Iterator[list[list[int]]]:
    """Set partitions of ``items`` into exactly ``c`` nonempty groups."""
    if c == 0:
        if not items:
            yield []
        return
    if len(items) < c:
        return
    first, rest = items[0], items[1:]
    for groups in _groupings(rest, c - 1):
        yield [[first]] + groups
    for groups in _groupings(rest, c):
        for i in range(len(groups)):
            yield groups[:i] + [[first] + groups[i]] + groups[i + 1:]


def _check_limits(shape: TreeShape, S: Dataset) -> None:
    if len(S) > MAX_EXAMPLES or shape.n_leaves > MAX_LEAVES:
        raise ValueError(
            f"enumeration limited to {MAX_EXAMPLES} examples and {MAX_LEAVES} leaves, "
            f"got {len(S)} and {shape.n_leaves}"
        )


def leaf_partitions(shape: TreeShape, S: Dataset) -> set[frozenset[int]]:
    """Distinct ways the shape's leaves can carve up ``S``, as sets of bitmasks."""
    _check_limits(shape, S)
    return _leaf_partitions(shape, (1 << len(S)) - 1, _rule_masks(S), {})


def enumerate_tree_partitions(shape: TreeShape, S: Dataset, c: int) -> RealizedPartitionSet:
    """All c-partitions of ``S`` obtained by some rule assignment and leaf labeling."""
    found = set()
    for blocks in leaf_partitions(shape, S):
        for groups in _groupings(sorted(blocks), c):
            merged = [0] * len(groups)
            for g, group in enumerate(groups):
                for block in group:
                    merged[g] |= block
            found.add(_blocks(merged))
    return RealizedPartitionSet(frozenset(found))


def count_tree_labelings(shape: TreeShape, S: Dataset, n_classes: int) -> int:
    """Number of distinct functions from ``S`` to ``1..n_classes`` realized by the shape."""
    m = len(S)
    found = set()
    for blocks in leaf_partitions(shape, S):
        ordered = sorted(blocks)
        for labels in itertools.product(range(1, n_classes + 1), repeat=len(ordered)):
            out = [0] * m
            for block, label in zip(ordered, labels):
                for i in range(m):
                    if block >> i & 1:
                        out[i] = label
            found.add(tuple(out))
    return len(found)


# ---------------------------------------------------------------- worst-case samples

# Row i lists the example order along feature i; example sigma_j gets value j.
PERMUTATION_MATRICES: dict[int, tuple[tuple[int, ...], ...]] = {
    1: ((1,),),
    2: ((1, 2),),
    3: ((1, 2, 3), (1, 3, 2)),
    4: ((1, 2, 4, 3), (2, 3, 1, 4), (1, 3, 2, 4)),
    5: ((1, 2, 3, 5, 4), (2, 3, 4, 1, 5), (3, 4, 1, 2, 5), (1, 3, 5, 2, 4), (1, 4, 2, 3, 5)),
    6: (
        (1, 2, 3, 6, 5, 4), (2, 3, 4, 1, 6, 5), (3, 4, 5, 2, 1, 6), (1, 3, 6, 5, 4, 2), (3, 5, 2, 1, 6, 4),
        (5, 1, 4, 3, 2, 6), (1, 4, 3, 6, 2, 5), (3, 6, 5, 1, 2, 4), (1, 2, 5, 3, 4, 6), (1, 3, 5, 2, 4, 6),
    ),
    7: (
        (1, 2, 3, 4, 5, 6, 7), (2, 3, 4, 7, 1, 5, 6), (3, 4, 7, 6, 2, 1, 5), (4, 7, 6, 2, 5, 1, 3),
        (1, 4, 3, 7, 6, 2, 5), (5, 7, 4, 3, 2, 1, 6), (3, 7, 5, 6, 1, 2, 4), (2, 7, 4, 1, 6, 3, 5),
        (2, 6, 3, 7, 1, 4, 5), (1, 7, 3, 5, 2, 4, 6), (3, 6, 7, 1, 2, 4, 5), (1, 4, 7, 6, 2, 3, 5),
        (1, 2, 7, 3, 4, 5, 6), (1, 5, 7, 2, 3, 4, 6), (1, 6, 7, 2, 3, 4, 5), (2, 3, 7, 5, 1, 4, 6),
        (2, 5, 7, 4, 3, 6, 1), (2, 6, 7, 1, 3, 4, 5),
    ),
}


def block_permutations(m: int, ell: int) -> list[tuple[int, ...]]:
    """Rotating block construction for 2 ell <= m; every feature cuts off ``m - 1`` new pairs."""
    if ell < 1 or 2 * ell > m:
        raise ValueError(f"block construction needs 1 <= ell and 2 ell <= m, got m={m}, ell={ell}")
    span = 2 * ell

    def wrap(v: int) -> int:
        return (v - 1) % span + 1

    rows = []
    for i in range(1, ell + 1):
        head = [wrap(j + i - 1) for j in range(1, ell + 1)]
        middle = list(range(span + 1, m + 1))
        tail = [wrap(span - j + i - 1) for j in range(ell)]
        rows.append(tuple(head + middle + tail))
    return rows


def _from_permutations(m: int, rows: list[tuple[int, ...]]) -> Dataset:
    values = [[0.0] * len(rows) for _ in range(m)]
    for i, row in enumerate(rows):
        for j, example in enumerate(row, start=1):
            values[example - 1][i] = float(j)
    examples = tuple(Example(reals=tuple(v)) for v in values)
    return Dataset(FeatureLandscape(ell=len(rows)), examples, n_classes=1)


def appendix_sample(m: int, ell: int, construction: str = "auto") -> Dataset:
    """Real-valued sample on which stumps realize as many 2-partitions as the bound allows.

    Args:
        construction: ``"matrix"`` uses the explicit permutation matrices
            (m <= 7, ell at least the matrix height; extra features repeat the
            first row), ``"block"`` the rotating construction (2 ell <= m), and
            ``"auto"`` picks whichever applies, preferring the matrices.
    """
    if m < 1 or ell < 1:
        raise ValueError("need m >= 1 and ell >= 1")
    matrix_ok = m in PERMUTATION_MATRICES and ell >= len(PERMUTATION_MATRICES[m])
    if construction == "auto":
        construction = "matrix" if matrix_ok else "block"
    if construction == "matrix":
        if not matrix_ok:
            raise ValueError(f"no permutation matrix for m={m} with ell={ell} features")
        rows = list(PERMUTATION_MATRICES[m])
        rows += [rows[0]] * (ell - len(rows))
        return _from_permutations(m, rows)
    if construction == "block":
        return _from_permutations(m, block_permutations(m, ell))
    raise ValueError(f"unknown construction {construction!r}")
