"""Pruning: risk-bound minimization, cost-complexity, reduced-error, Kearns-Mansour and oracle."""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .bounds import BoundCache, PriorConfig, log_growth_func_ub, shawe_taylor_epsilon
from .data import Dataset, Example, shuffled_indices
from .induction import GrowthConstraints, grow_greedy
from .tree import (
    Leaf,
    Node,
    PruneMode,
    Tree,
    TreeError,
    caterpillar,
    check_rule,
    errors,
    internal_paths,
    majority_label,
    n_leaves,
    prune_edit,
    shape_of,
    tree_to_text,
)

DEFAULT_KM_GRID = tuple(10.0 ** e for e in range(-20, 1))

# preference among equally scored edits: leaf, then right child, then left child
_MODE_RANK = {PruneMode.REPLACE_WITH_LEAF: 0, PruneMode.REPLACE_WITH_RIGHT: 1, PruneMode.REPLACE_WITH_LEFT: 2}


class PruningError(ValueError):
    pass


@dataclass(frozen=True)
class PruneStep:
    leaves: int
    errors: int
    score: float


@dataclass(frozen=True)
class PruneResult:
    tree: Tree
    final_bound: float | None
    history: tuple[PruneStep, ...]

    def tree_text(self) -> str:
        return tree_to_text(self.tree)

    def history_csv(self) -> str:
        """One row per accepted step: leaves, training errors and score."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(("step", "leaves", "errors", "score"))
        for i, step in enumerate(self.history):
            writer.writerow((i, step.leaves, step.errors, repr(step.score)))
        return buffer.getvalue()


def _check_landscape(t: Tree, S: Dataset) -> None:
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Node):
            try:
                check_rule(node.rule, S.landscape)
            except TreeError as exc:
                raise PruningError(f"tree does not match the sample's landscape: {exc}") from None
            stack += [node.left, node.right]


def _greedy_prune(
    t: Tree, score: Callable[[Tree], float], label_sample: Dataset, error_sample: Dataset
) -> tuple[Tree, float, list[PruneStep]]:
    """Repeatedly apply the best-scoring edit while the score does not increase."""
    current, current_score = t, score(t)
    history = [PruneStep(n_leaves(t), errors(t, error_sample.examples), current_score)]
    while isinstance(current, Node):
        best_key, best_tree = None, None
        for path in internal_paths(current):
            for mode in PruneMode:
                candidate = prune_edit(current, path, mode, label_sample)
                key = (score(candidate), n_leaves(candidate), _MODE_RANK[mode], len(path), path)
                if best_key is None or key < best_key:
                    best_key, best_tree = key, candidate
        # every edit removes at least one leaf, so accepting ties cannot cycle
        if best_key[0] > current_score:
            break
        current, current_score = best_tree, best_key[0]
        history.append(PruneStep(n_leaves(current), errors(current, error_sample.examples), current_score))
    return current, current_score, history


def tree_bound(t: Tree, S: Dataset, cfg: PriorConfig = PriorConfig(), cache: BoundCache | None = None) -> float:
    """Risk bound of ``t`` given its training sample ``S``."""
    return shawe_taylor_epsilon(
        len(S), errors(t, S.examples), shape_of(t), S.landscape, S.n_classes, cfg, cache
    )


def prune_bound(
    t: Tree, S: Dataset, cfg: PriorConfig = PriorConfig(), cache: BoundCache | None = None
) -> PruneResult:
    """Prune greedily while the risk bound does not increase."""
    _check_landscape(t, S)
    if len(S) == 0:
        raise PruningError("the training sample is empty")
    tree, bound, history = _greedy_prune(t, lambda u: tree_bound(u, S, cfg, cache), S, S)
    return PruneResult(tree, bound, tuple(history))


def prune_re(t: Tree, S_val: Dataset, label_sample: Dataset | None = None) -> PruneResult:
    """Reduced-error pruning: same loop, scored by the error count on ``S_val``.

    Args:
        label_sample: sample whose majority labels new leaves; defaults to ``S_val``.
    """
    _check_landscape(t, S_val)
    if len(S_val) == 0:
        raise PruningError("the validation sample is empty")
    labels = label_sample if label_sample is not None else S_val
    tree, _, history = _greedy_prune(t, lambda u: float(errors(u, S_val.examples)), labels, S_val)
    return PruneResult(tree, None, tuple(history))


def prune_oracle(t: Tree, S_test: Dataset, label_sample: Dataset | None = None) -> PruneResult:
    """Reduced-error pruning scored on the test sample itself."""
    return prune_re(t, S_test, label_sample)


# ---------------------------------------------------------------- bottom-up pruners


def _bottom_up(
    t: Tree,
    examples: Sequence[Example],
    collapse: Callable[[Node, Sequence[Example], str, int], bool],
    path: str = "",
    inherited: int = 1,
) -> Tree:
    """Post-order pass; ``collapse`` sees each node after its children were processed."""
    if isinstance(t, Leaf):
        return t
    label = majority_label(x.label for x in examples)
    label = inherited if label is None else label
    if not examples:
        # nothing reaches this node, so its label is inherited from above
        return Leaf(label)
    left_ex = [x for x in examples if t.rule.holds(x)]
    right_ex = [x for x in examples if not t.rule.holds(x)]
    node = Node(
        t.rule,
        _bottom_up(t.left, left_ex, collapse, path + "0", label),
        _bottom_up(t.right, right_ex, collapse, path + "1", label),
    )
    if collapse(node, examples, path, label):
        return Leaf(label)
    return node


def _leaf_errors(examples: Sequence[Example], label: int) -> int:
    return sum(1 for x in examples if x.label != label)


def critical_alpha(node: Node, examples: Sequence[Example], label: int) -> float:
    """Errors saved per extra leaf by keeping the subtree instead of a leaf."""
    return (_leaf_errors(examples, label) - errors(node, examples)) / (n_leaves(node) - 1)


def _critical_by_path(t: Tree, S: Dataset) -> dict[str, float]:
    """Critical value of every internal node that some example reaches, computed on ``t`` itself."""
    found: dict[str, float] = {}

    def record(node: Node, ex: Sequence[Example], path: str, label: int) -> bool:
        found[path] = critical_alpha(node, ex, label)
        return False

    _bottom_up(t, S.examples, record)
    return found


def cc_prune_with(t: Tree, S: Dataset, alpha: float) -> Tree:
    """Collapse every subtree whose critical value in ``t`` is at most ``alpha``.

    Critical values are fixed on the input tree, so raising ``alpha`` past one
    of them prunes one more node and keeps earlier prunes.
    """
    critical = _critical_by_path(t, S)
    return _bottom_up(t, S.examples, lambda node, ex, path, label: critical[path] <= alpha)


def critical_alphas(t: Tree, S: Dataset) -> list[float]:
    """Distinct critical values of ``t``'s internal nodes, increasing; at most L - 1 of them."""
    return sorted(set(_critical_by_path(t, S).values()))


def km_prune_with(
    t: Tree, S: Dataset, C: float, delta: float = 0.05, cache: BoundCache | None = None
) -> Tree:
    """Collapse a subtree when its error savings do not exceed the complexity penalty for constant ``C``."""
    m = len(S)
    ls, n = S.landscape, S.n_classes

    def collapse(node: Node, ex: Sequence[Example], path: str, label: int) -> bool:
        if C == 0:
            return errors(node, ex) >= _leaf_errors(ex, label)
        m_n = len(ex)
        ln_path = log_growth_func_ub(caterpillar(len(path)), n, m_n, ls, cache).value
        ln_sub = log_growth_func_ub(shape_of(node), n, m_n, ls, cache).value
        penalty = C * math.sqrt((ln_path + ln_sub + math.log(m / delta)) / m)
        return errors(node, ex) + penalty >= _leaf_errors(ex, label)

    return _bottom_up(t, S.examples, collapse)


def _folds(m: int, folds: int, seed: int) -> list[list[int]]:
    order = shuffled_indices(m, seed)
    return [list(map(int, chunk)) for chunk in np.array_split(order, folds)]


def _cross_validate(
    S: Dataset,
    folds: int,
    seed: int,
    constraints: GrowthConstraints,
    candidates: Callable[[Tree, Dataset], Sequence[float]],
    prune: Callable[[Tree, Dataset, float], Tree],
) -> list[float]:
    """Per fold: grow on the rest, keep the candidate with the fewest held-out errors.

    Ties go to the largest candidate, i.e. the most aggressive pruning.
    """
    if folds < 2:
        raise PruningError("need at least two folds")
    if len(S) < folds:
        raise PruningError(f"cannot make {folds} folds from {len(S)} examples")
    winners = []
    for held in _folds(len(S), folds, seed):
        held_set = set(held)
        train = S.subset([i for i in range(len(S)) if i not in held_set])
        val = S.subset(held)
        if len({x.label for x in train.examples}) < S.n_classes:
            warnings.warn("a cross-validation fold is missing a class", RuntimeWarning, stacklevel=3)
        tree = grow_greedy(train, constraints)
        scored = [(errors(prune(tree, train, v), val.examples), -v, v) for v in candidates(tree, train)]
        winners.append(min(scored)[2])
    return winners


def prune_cc(
    t: Tree, S: Dataset, folds: int = 5, seed: int = 0, constraints: GrowthConstraints = GrowthConstraints()
) -> PruneResult:
    """Cost-complexity pruning with the complexity weight averaged over cross-validation winners."""
    _check_landscape(t, S)
    winners = _cross_validate(
        S, folds, seed, constraints,
        lambda tree, train: critical_alphas(tree, train) or [0.0],
        cc_prune_with,
    )
    alpha = float(np.mean(winners))
    pruned = cc_prune_with(t, S, alpha)
    return PruneResult(pruned, None, _endpoints(t, pruned, S, alpha))


def prune_km(
    t: Tree,
    S: Dataset,
    C_grid: Sequence[float] = DEFAULT_KM_GRID,
    folds: int = 5,
    delta: float = 0.05,
    cache: BoundCache | None = None,
    seed: int = 0,
    constraints: GrowthConstraints = GrowthConstraints(),
) -> PruneResult:
    """Kearns-Mansour pruning with C chosen by cross-validation (winners averaged in log10)."""
    _check_landscape(t, S)
    if not C_grid:
        raise PruningError("the C grid is empty")
    if any(c <= 0 for c in C_grid):
        raise PruningError("grid values must be positive to average them in log space")
    winners = _cross_validate(
        S, folds, seed, constraints,
        lambda tree, train: sorted(C_grid),
        lambda tree, train, C: km_prune_with(tree, train, C, delta, cache),
    )
    C = float(10 ** np.mean(np.log10(winners)))
    pruned = km_prune_with(t, S, C, delta, cache)
    return PruneResult(pruned, None, _endpoints(t, pruned, S, C))


def _endpoints(before: Tree, after: Tree, S: Dataset, parameter: float) -> tuple[PruneStep, ...]:
    steps = [PruneStep(n_leaves(before), errors(before, S.examples), parameter)]
    if n_leaves(after) < n_leaves(before):
        steps.append(PruneStep(n_leaves(after), errors(after, S.examples), parameter))
    return tuple(steps)
