import random

import pytest

from treebounds.bounds import BoundCache, PriorConfig, log_growth_func_ub
from treebounds.data import Dataset, Example, FeatureLandscape, split_dataset
from treebounds.induction import GrowthConstraints, grow_greedy
from treebounds.pruning import (
    PruningError,
    cc_prune_with,
    critical_alphas,
    km_prune_with,
    prune_bound,
    prune_cc,
    prune_km,
    prune_oracle,
    prune_re,
    tree_bound,
)
from treebounds.tree import Leaf, Node, ThresholdReal, caterpillar, errors, n_leaves, shape_of

LS = FeatureLandscape(1)


def _sample(rows, n_classes=2, ls=LS):
    return Dataset(ls, tuple(Example((float(x),), (), (), y) for x, y in rows), n_classes)


@pytest.fixture(scope="module")
def iris_split(iris):
    train, test = split_dataset(iris, 0.85, seed=4)
    return train, test, grow_greedy(train, GrowthConstraints(75))


def test_bound_leaf_is_unchanged():
    S = _sample([(0, 1), (1, 1), (2, 2)])
    res = prune_bound(Leaf(1), S)
    assert res.tree == Leaf(1)
    assert res.final_bound == pytest.approx(tree_bound(Leaf(1), S))
    assert len(res.history) == 1


def test_bound_removes_useless_split():
    S = _sample([(0, 1), (1, 2), (2, 1), (3, 1)])
    stump = Node(ThresholdReal(0, 1.5), Leaf(1), Leaf(1))
    res = prune_bound(stump, S)
    assert res.tree == Leaf(1)
    assert res.final_bound < tree_bound(stump, S)


def test_bound_prunes_overgrown_iris(iris_split):
    train, _, og = iris_split
    res = prune_bound(og, train)
    assert n_leaves(res.tree) < n_leaves(og)
    assert res.final_bound < tree_bound(og, train)
    scores = [step.score for step in res.history]
    assert all(b <= a for a, b in zip(scores, scores[1:]))
    leaves = [step.leaves for step in res.history]
    assert all(b < a for a, b in zip(leaves, leaves[1:]))


def test_bound_is_deterministic(iris_split):
    train, _, og = iris_split
    assert prune_bound(og, train, PriorConfig(), BoundCache()) == prune_bound(og, train, PriorConfig(), BoundCache())


def test_landscape_mismatch():
    t = Node(ThresholdReal(3, 0.0), Leaf(1), Leaf(2))
    S = _sample([(0, 1), (1, 2)])
    for prune in (prune_bound, prune_re, prune_oracle):
        with pytest.raises(PruningError):
            prune(t, S)
    with pytest.raises(PruningError):
        prune_cc(t, S, folds=2)


def test_empty_samples_are_rejected():
    empty = _sample([])
    with pytest.raises(PruningError):
        prune_bound(Leaf(1), empty)
    with pytest.raises(PruningError):
        prune_re(Leaf(1), empty)


def test_re_keeps_a_perfect_tree_accurate():
    S = _sample([(0, 1), (1, 1), (2, 2), (3, 2)])
    t = Node(ThresholdReal(0, 1.5), Leaf(1), Node(ThresholdReal(0, 2.5), Leaf(2), Leaf(2)))
    res = prune_re(t, S)
    assert errors(res.tree, S.examples) == 0
    assert res.tree == Node(ThresholdReal(0, 1.5), Leaf(1), Leaf(2))


def test_re_single_leaf():
    assert prune_re(Leaf(2), _sample([(0, 1)])).tree == Leaf(2)


def test_re_never_hurts_validation_error():
    rng = random.Random(0)
    for seed in range(5):
        rows = [(x, 1 if x < 20 else 2) for x in range(40)]
        # flip a few labels so the overgrown tree memorizes noise
        rows = [(x, 3 - y if rng.random() < 0.15 else y) for x, y in rows]
        D = _sample(rows)
        train, val = split_dataset(D, 0.6, seed)
        t = grow_greedy(train)
        res = prune_re(t, val, label_sample=train)
        assert errors(res.tree, val.examples) <= errors(t, val.examples)
        assert n_leaves(res.tree) <= n_leaves(t)


def test_oracle_is_reduced_error_on_the_test_sample(iris_split):
    train, test, og = iris_split
    assert prune_oracle(og, test) == prune_re(og, test)
    assert prune_oracle(og, test, label_sample=train) == prune_re(og, test, label_sample=train)


def test_oracle_beats_other_pruners_on_the_test_sample(iris):
    for seed in range(3):
        train, test = split_dataset(iris, 0.85, seed)
        og = grow_greedy(train)
        oracle = errors(prune_oracle(og, test, label_sample=train).tree, test.examples)
        others = [
            og,
            prune_bound(og, train).tree,
            prune_cc(og, train, seed=seed).tree,
            prune_km(og, train, seed=seed).tree,
        ]
        assert all(oracle <= errors(t, test.examples) for t in others)


def test_cc_alpha_zero_only_drops_useless_subtrees():
    S = _sample([(0, 1), (1, 1), (2, 2), (3, 2)])
    useless = Node(ThresholdReal(0, 0.5), Leaf(1), Leaf(1))
    t = Node(ThresholdReal(0, 1.5), useless, Leaf(2))
    assert cc_prune_with(t, S, 0.0) == Node(ThresholdReal(0, 1.5), Leaf(1), Leaf(2))


def test_cc_large_alpha_gives_a_leaf(iris_split):
    train, _, og = iris_split
    top = max(critical_alphas(og, train))
    assert cc_prune_with(og, train, top) == Leaf(1) or isinstance(cc_prune_with(og, train, top), Leaf)


def test_cc_fold_errors():
    S = _sample([(0, 1), (1, 2), (2, 1)])
    with pytest.raises(PruningError):
        prune_cc(Leaf(1), S, folds=5)
    with pytest.raises(PruningError):
        prune_cc(Leaf(1), S, folds=1)


def test_cc_warns_on_folds_missing_a_class():
    S = _sample([(0, 1), (1, 1), (2, 1), (3, 1), (4, 2)])
    with pytest.warns(RuntimeWarning):
        prune_cc(grow_greedy(S), S, folds=5)


def test_cc_prunes_iris(iris_split):
    train, _, og = iris_split
    res = prune_cc(og, train)
    assert n_leaves(res.tree) <= n_leaves(og)
    assert res.history[0].leaves == n_leaves(og)


def test_km_zero_matches_zero_alpha(iris_split):
    train, _, og = iris_split
    assert km_prune_with(og, train, 0.0) == cc_prune_with(og, train, 0.0)


def test_km_huge_constant_gives_a_leaf(iris_split):
    train, _, og = iris_split
    assert isinstance(km_prune_with(og, train, 1e6), Leaf)


def test_km_grid_validation(iris_split):
    train, _, og = iris_split
    with pytest.raises(PruningError):
        prune_km(og, train, C_grid=())
    with pytest.raises(PruningError):
        prune_km(og, train, C_grid=(0.0, 1.0))


def test_km_penalty_uses_the_path_caterpillar():
    # a depth-1 node pays for a 2-leaf path class
    S = _sample([(0, 1), (1, 1), (2, 2), (3, 1), (4, 2)])
    t = Node(ThresholdReal(0, 1.5), Leaf(1), Node(ThresholdReal(0, 2.5), Leaf(2), Leaf(1)))
    cache = BoundCache()
    km_prune_with(t, S, 1.0, cache=cache)
    expected = log_growth_func_ub(caterpillar(1), 2, 3, LS, BoundCache()).value
    assert log_growth_func_ub(caterpillar(1), 2, 3, LS, cache).value == expected
    assert caterpillar(1).n_leaves == 2
    assert shape_of(t.right).n_leaves == 2


def test_km_prunes_iris(iris_split):
    train, _, og = iris_split
    res = prune_km(og, train)
    assert n_leaves(res.tree) <= n_leaves(og)


def test_pruners_are_deterministic(iris_split):
    train, _, og = iris_split
    assert prune_cc(og, train, seed=2) == prune_cc(og, train, seed=2)
    assert prune_km(og, train, seed=2) == prune_km(og, train, seed=2)


def test_dead_branches_collapse():
    # nothing reaches the right subtree, so it becomes the parent's majority leaf
    S = _sample([(0, 1), (1, 1), (2, 2)])
    t = Node(ThresholdReal(0, 5.0), Node(ThresholdReal(0, 1.5), Leaf(1), Leaf(2)), Node(ThresholdReal(0, 7), Leaf(2), Leaf(2)))
    pruned = cc_prune_with(t, S, 0.0)
    assert pruned.right == Leaf(1)


def test_result_serialization(iris_split):
    train, _, og = iris_split
    res = prune_bound(og, train)
    lines = res.history_csv().splitlines()
    assert lines[0] == "step,leaves,errors,score"
    assert len(lines) == len(res.history) + 1
    from treebounds.tree import tree_from_text

    assert tree_from_text(res.tree_text()) == res.tree
