"""Greedy top-down tree growth with Gini impurity."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .data import Dataset, Example
from .tree import DecisionRule, Leaf, NominalEq, Node, ThresholdOrdinal, ThresholdReal, Tree, majority_label


@dataclass(frozen=True)
class ClassCounts:
    """Per-class example counts; ``z[a]`` holds label ``a + 1``."""

    z: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.z)

    @classmethod
    def of(cls, labels: Sequence[int], n_classes: int) -> "ClassCounts":
        z = [0] * n_classes
        for y in labels:
            z[y - 1] += 1
        return cls(tuple(z))


@dataclass(frozen=True)
class GrowthConstraints:
    max_leaves: int = 75
    max_height: int | None = None

    def __post_init__(self) -> None:
        if self.max_leaves < 1:
            raise ValueError("max_leaves must be at least 1")


@dataclass(frozen=True)
class SplitCandidate:
    rule: DecisionRule
    g_left: float
    g_right: float
    score: float


def gini(z: ClassCounts | Sequence[int]) -> float:
    """1 - sum of squared class frequencies; 0 for an empty set."""
    counts = z.z if isinstance(z, ClassCounts) else z
    m = sum(counts)
    if m == 0:
        return 0.0
    return 1.0 - sum(v * v for v in counts) / (m * m)


def _feature_readers(S: Dataset) -> list[tuple[str, int, Callable[[Example], float]]]:
    ls = S.landscape
    readers = [("real", j, (lambda x, j=j: x.reals[j])) for j in range(ls.ell)]
    readers += [("ord", j, (lambda x, j=j: x.ordinals[j])) for j in range(ls.omega)]
    readers += [("nom", j, (lambda x, j=j: x.nominals[j])) for j in range(ls.nu)]
    return readers


def _scan_feature(
    kind: str, feature: int, values: list, labels: list[int], n_classes: int, weighted: bool
) -> SplitCandidate | None:
    m = len(values)
    order = sorted(range(m), key=values.__getitem__)
    zl = [0] * n_classes
    zr = [0] * n_classes
    for y in labels:
        zr[y - 1] += 1

    def score(gl: float, gr: float, nl: int) -> float:
        return (nl * gl + (m - nl) * gr) / m if weighted else gl + gr

    best_score = gini(zr)
    best = None
    n_left = 0
    for j in range(m):
        y = labels[order[j]] - 1
        zl[y] += 1
        zr[y] -= 1
        n_left += 1
        v = values[order[j]]
        at_end = j == m - 1
        if not at_end and values[order[j + 1]] == v:
            continue
        if kind == "nom":
            # the left side holds one category; the last category is tested too
            if n_left < m:
                gl, gr = gini(zl), gini(zr)
                s = score(gl, gr, n_left)
                if s <= best_score:
                    best_score, best = s, SplitCandidate(NominalEq(feature, v), gl, gr, s)
            for a in range(n_classes):
                zr[a] += zl[a]
                zl[a] = 0
            n_left = 0
        elif not at_end:
            gl, gr = gini(zl), gini(zr)
            s = score(gl, gr, n_left)
            if s <= best_score:
                if kind == "real":
                    rule: DecisionRule = ThresholdReal(feature, (v + values[order[j + 1]]) / 2)
                else:
                    rule = ThresholdOrdinal(feature, v)
                best_score, best = s, SplitCandidate(rule, gl, gr, s)
    return best


def _best_split(S: Dataset, examples: Sequence[Example], weighted: bool) -> SplitCandidate | None:
    labels = [x.label for x in examples]
    best = None
    for kind, feature, read in _feature_readers(S):
        cand = _scan_feature(kind, feature, [read(x) for x in examples], labels, S.n_classes, weighted)
        # across features the lowest index keeps ties
        if cand is not None and (best is None or cand.score < best.score):
            best = cand
    return best


def find_best_split(S: Dataset, weighted: bool = True) -> SplitCandidate | None:
    """Lowest-impurity rule on ``S``; ``None`` if no rule separates it.

    Args:
        weighted: score candidates by size-weighted child impurities (default).
            ``False`` scores them by the plain sum of child impurities, which
            can leave impure leaves that no split improves.
    """
    if len(S) < 2:
        raise ValueError("a split needs at least two examples")
    return _best_split(S, S.examples, weighted)


class _Grow:
    def __init__(self, examples: list[Example], depth: int) -> None:
        self.examples = examples
        self.depth = depth
        self.label = majority_label(x.label for x in examples)
        self.rule: DecisionRule | None = None
        self.left: _Grow | None = None
        self.right: _Grow | None = None

    def errors(self) -> int:
        return sum(1 for x in self.examples if x.label != self.label)

    def freeze(self) -> Tree:
        if self.rule is None:
            return Leaf(self.label)
        return Node(self.rule, self.left.freeze(), self.right.freeze())


def grow_greedy(
    S: Dataset, constraints: GrowthConstraints = GrowthConstraints(), weighted: bool = True
) -> Tree:
    """Grow a tree best-first: always apply the lowest-impurity admissible split among open leaves."""
    if len(S) == 0:
        raise ValueError("cannot grow a tree on an empty sample")
    root = _Grow(list(S.examples), 0)
    leaves = [root]
    candidates: dict[int, SplitCandidate] = {}

    def consider(leaf: _Grow) -> None:
        if len(leaf.examples) < 2:
            return
        if constraints.max_height is not None and leaf.depth >= constraints.max_height:
            return
        cand = _best_split(S, leaf.examples, weighted)
        g_leaf = gini(ClassCounts.of([x.label for x in leaf.examples], S.n_classes))
        if cand is not None and cand.score < g_leaf:
            candidates[id(leaf)] = cand

    consider(root)
    while candidates and len(leaves) < constraints.max_leaves:
        if sum(leaf.errors() for leaf in leaves) == 0:
            break
        # earliest-created leaf wins ties
        chosen = min(leaves, key=lambda lf: candidates[id(lf)].score if id(lf) in candidates else float("inf"))
        cand = candidates.pop(id(chosen))
        chosen.rule = cand.rule
        chosen.left = _Grow([x for x in chosen.examples if cand.rule.holds(x)], chosen.depth + 1)
        chosen.right = _Grow([x for x in chosen.examples if not cand.rule.holds(x)], chosen.depth + 1)
        index = leaves.index(chosen)
        leaves[index:index + 1] = []
        leaves.extend([chosen.left, chosen.right])
        for child in (chosen.left, chosen.right):
            consider(child)
    return root.freeze()
