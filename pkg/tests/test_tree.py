import pytest
from hypothesis import given, strategies as st

from treebounds.data import Dataset, Example, FeatureLandscape
from treebounds.tree import (
    LEAF,
    STUMP,
    Leaf,
    NominalEq,
    Node,
    PruneMode,
    ThresholdOrdinal,
    ThresholdReal,
    TreeError,
    TreeShape,
    balanced,
    caterpillar,
    check_rule,
    errors,
    examples_reaching,
    height,
    internal_paths,
    majority_label,
    n_leaves,
    parse_shape,
    path_shape,
    predict,
    prune_edit,
    shape_of,
    subtree_at,
    tree_from_text,
    tree_to_text,
)

LS = FeatureLandscape(2, (4,), (3,))

rules = st.one_of(
    st.builds(ThresholdReal, st.integers(0, 1), st.floats(-10, 10, allow_nan=False)),
    st.builds(ThresholdOrdinal, st.integers(0, 0), st.integers(1, 3)),
    st.builds(NominalEq, st.integers(0, 0), st.integers(1, 3)),
)
trees = st.recursive(
    st.builds(Leaf, st.integers(1, 3)),
    lambda sub: st.builds(Node, rules, sub, sub),
    max_leaves=12,
)
examples = st.builds(
    Example,
    st.tuples(st.floats(-10, 10, allow_nan=False), st.floats(-10, 10, allow_nan=False)),
    st.tuples(st.integers(1, 4)),
    st.tuples(st.integers(1, 3)),
    st.integers(1, 3),
)
samples = st.lists(examples, max_size=15).map(lambda xs: Dataset(LS, tuple(xs), 3))


def _stump(threshold=0.5):
    return Node(ThresholdReal(0, threshold), Leaf(1), Leaf(2))


def test_rule_semantics():
    x = Example((0.5, 2.0), (3,), (2,), 1)
    assert ThresholdReal(0, 0.5).holds(x)
    assert not ThresholdReal(1, 1.0).holds(x)
    assert ThresholdOrdinal(0, 3).holds(x)
    assert not ThresholdOrdinal(0, 2).holds(x)
    assert NominalEq(0, 2).holds(x)
    assert not NominalEq(0, 1).holds(x)


@pytest.mark.parametrize(
    "rule", [ThresholdReal(2, 0.0), ThresholdOrdinal(0, 4), ThresholdOrdinal(0, 0), NominalEq(0, 4), NominalEq(1, 1)]
)
def test_check_rule_rejects_out_of_range(rule):
    with pytest.raises(TreeError):
        check_rule(rule, LS)


def test_predict_and_counts():
    t = Node(ThresholdReal(0, 0.0), Leaf(1), Node(NominalEq(0, 2), Leaf(2), Leaf(3)))
    assert predict(t, Example((-1.0, 0.0), (1,), (2,))) == 1
    assert predict(t, Example((1.0, 0.0), (1,), (2,))) == 2
    assert predict(t, Example((1.0, 0.0), (1,), (3,))) == 3
    assert n_leaves(t) == 3
    assert height(t) == 2
    assert shape_of(t) == parse_shape("(.,(.,.))")


def test_predict_on_a_mismatched_example():
    with pytest.raises(TreeError):
        predict(_stump(), Example((), (), (), 1))


def test_majority_label_ties_go_to_smallest():
    assert majority_label([2, 3, 3, 2]) == 2
    assert majority_label([3]) == 3
    assert majority_label([]) is None


def test_shape_parsing_and_text():
    s = parse_shape(" ( (.,.) , . ) ")
    assert s.text == "((.,.),.)"
    assert s.n_leaves == 3 and s.height == 2
    assert parse_shape(".") == LEAF
    assert parse_shape("(.,.)") == STUMP


@pytest.mark.parametrize("text", ["", "(.,.", "(.)", "x", "(.,.))", "((.,.),.,.)"])
def test_shape_parse_errors(text):
    with pytest.raises(TreeError):
        parse_shape(text)


def test_shape_needs_both_children():
    with pytest.raises(TreeError):
        TreeShape(LEAF, None)


def test_canonical_form_ignores_mirroring():
    a, b = parse_shape("((.,.),.)"), parse_shape("(.,(.,.))")
    assert a != b
    assert a.canonical == b.canonical
    assert parse_shape("((.,(.,.)),((.,.),.))").children_identical
    assert not parse_shape("((.,.),.)").children_identical


def test_caterpillar_and_balanced():
    assert caterpillar(0) == LEAF
    assert caterpillar(2) == parse_shape("(.,(.,.))")
    assert caterpillar(5).n_leaves == 6 and caterpillar(5).height == 5
    assert balanced(4) == parse_shape("((.,.),(.,.))")
    assert balanced(8).height == 3
    assert balanced(5).n_leaves == 5
    with pytest.raises(TreeError):
        balanced(0)


@given(trees)
def test_text_round_trip(t):
    assert tree_from_text(tree_to_text(t)) == t


@pytest.mark.parametrize("text", ["(r0<=1.0,1)", "(q0<=1,1,2)", "(r0<=1.0,1,2", "(r0<=1.0,1,2) 3"])
def test_tree_text_errors(text):
    with pytest.raises(TreeError):
        tree_from_text(text)


@given(trees)
def test_internal_paths_count_internal_nodes(t):
    paths = list(internal_paths(t))
    assert len(paths) == n_leaves(t) - 1
    assert all(isinstance(subtree_at(t, p), Node) for p in paths)


@given(trees, samples, st.data())
def test_prune_edit_removes_leaves(t, S, data):
    paths = list(internal_paths(t))
    if not paths:
        return
    path = data.draw(st.sampled_from(paths))
    node = subtree_at(t, path)
    for mode in PruneMode:
        edited = prune_edit(t, path, mode, S)
        assert n_leaves(edited) < n_leaves(t)
        kept = {PruneMode.REPLACE_WITH_LEFT: node.left, PruneMode.REPLACE_WITH_RIGHT: node.right}.get(mode)
        if kept is not None:
            assert subtree_at(edited, path) == kept
            assert n_leaves(edited) == n_leaves(t) - n_leaves(node) + n_leaves(kept)
        else:
            assert isinstance(subtree_at(edited, path), Leaf)


@given(trees, samples)
def test_examples_reaching_partition_the_sample(t, S):
    leaf_paths = []

    def walk(u, p):
        if isinstance(u, Leaf):
            leaf_paths.append(p)
        else:
            walk(u.left, p + "0")
            walk(u.right, p + "1")

    walk(t, "")
    assert sum(len(examples_reaching(t, p, S.examples)) for p in leaf_paths) == len(S)


def test_prune_to_leaf_uses_majority_of_reaching_examples():
    t = Node(ThresholdReal(0, 0.0), Leaf(1), Node(ThresholdReal(1, 0.0), Leaf(2), Leaf(3)))
    S = Dataset(LS, (
        Example((-1.0, 0.0), (1,), (1,), 1),
        Example((1.0, -1.0), (1,), (1,), 3),
        Example((1.0, 1.0), (1,), (1,), 3),
        Example((1.0, 1.0), (1,), (1,), 2),
    ), 3)
    assert prune_edit(t, "1", PruneMode.REPLACE_WITH_LEAF, S) == Node(ThresholdReal(0, 0.0), Leaf(1), Leaf(3))
    assert prune_edit(t, "", PruneMode.REPLACE_WITH_LEAF, S) == Leaf(3)


def test_empty_node_inherits_ancestor_majority():
    t = Node(ThresholdReal(0, 0.0), Leaf(1), Node(ThresholdReal(1, 0.0), Leaf(2), Leaf(3)))
    S = Dataset(LS, (Example((-1.0, 0.0), (1,), (1,), 2), Example((-2.0, 0.0), (1,), (1,), 2)), 3)
    assert prune_edit(t, "1", PruneMode.REPLACE_WITH_LEAF, S).right == Leaf(2)


def test_prune_edit_errors():
    t = _stump()
    with pytest.raises(TreeError):
        prune_edit(t, "0", PruneMode.REPLACE_WITH_LEFT)
    with pytest.raises(TreeError):
        prune_edit(t, "", PruneMode.REPLACE_WITH_LEAF)
    with pytest.raises(TreeError):
        prune_edit(t, "2", PruneMode.REPLACE_WITH_LEFT)
    with pytest.raises(TreeError):
        subtree_at(t, "00")


def test_path_shape_is_a_caterpillar():
    t = Node(ThresholdReal(0, 0.0), Leaf(1), Node(ThresholdReal(1, 0.0), Leaf(2), Leaf(3)))
    assert path_shape(t, "") == LEAF
    assert path_shape(t, "1") == caterpillar(1)


def test_errors_counts_mismatches():
    S = [Example((0.0, 0.0), (1,), (1,), 1), Example((1.0, 0.0), (1,), (1,), 1)]
    assert errors(_stump(), S) == 1
