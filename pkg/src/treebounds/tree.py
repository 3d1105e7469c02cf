"""Decision trees, their structural shapes, and pruning edits.

Feature indices are 0-based within their kind (real, ordinal, nominal).
Category values and class labels are 1-based. A rule that holds sends the
example to the left child. Node paths are strings over ``0`` (left) and ``1``
(right), read from the root.
"""

from __future__ import annotations

import enum
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, Union

from .data import Dataset, Example, FeatureLandscape


class TreeError(ValueError):
    """Structural misuse: bad path, bad feature index, unparsable text."""


@dataclass(frozen=True)
class ThresholdReal:
    feature: int
    threshold: float

    def holds(self, x: Example) -> bool:
        return x.reals[self.feature] <= self.threshold

    def __str__(self) -> str:
        return f"r{self.feature}<={self.threshold!r}"


@dataclass(frozen=True)
class ThresholdOrdinal:
    feature: int
    threshold: int

    def holds(self, x: Example) -> bool:
        return x.ordinals[self.feature] <= self.threshold

    def __str__(self) -> str:
        return f"o{self.feature}<={self.threshold}"


@dataclass(frozen=True)
class NominalEq:
    feature: int
    category: int

    def holds(self, x: Example) -> bool:
        return x.nominals[self.feature] == self.category

    def __str__(self) -> str:
        return f"n{self.feature}=={self.category}"


DecisionRule = Union[ThresholdReal, ThresholdOrdinal, NominalEq]


def check_rule(rule: DecisionRule, landscape: FeatureLandscape) -> None:
    """Raise ``TreeError`` if ``rule`` does not fit ``landscape``."""
    if isinstance(rule, ThresholdReal):
        if not 0 <= rule.feature < landscape.ell:
            raise TreeError(f"real feature {rule.feature} out of range")
    elif isinstance(rule, ThresholdOrdinal):
        if not 0 <= rule.feature < landscape.omega:
            raise TreeError(f"ordinal feature {rule.feature} out of range")
        # a threshold at the top category would never send anything right
        if not 1 <= rule.threshold < landscape.omega_counts[rule.feature]:
            raise TreeError(f"ordinal threshold {rule.threshold} out of range")
    elif isinstance(rule, NominalEq):
        if not 0 <= rule.feature < landscape.nu:
            raise TreeError(f"nominal feature {rule.feature} out of range")
        if not 1 <= rule.category <= landscape.nu_counts[rule.feature]:
            raise TreeError(f"nominal category {rule.category} out of range")
    else:
        raise TreeError(f"unknown rule {rule!r}")


@dataclass(frozen=True)
class Leaf:
    label: int


@dataclass(frozen=True)
class Node:
    rule: DecisionRule
    left: "Tree"
    right: "Tree"


Tree = Union[Leaf, Node]


def predict(t: Tree, x: Example) -> int:
    while isinstance(t, Node):
        try:
            t = t.left if t.rule.holds(x) else t.right
        except IndexError:
            raise TreeError(f"rule {t.rule} reads a feature the example lacks") from None
    return t.label


def n_leaves(t: Tree) -> int:
    if isinstance(t, Leaf):
        return 1
    return n_leaves(t.left) + n_leaves(t.right)


def height(t: Tree) -> int:
    if isinstance(t, Leaf):
        return 0
    return 1 + max(height(t.left), height(t.right))


def errors(t: Tree, examples: Iterable[Example]) -> int:
    return sum(1 for x in examples if predict(t, x) != x.label)


def majority_label(labels: Iterable[int]) -> int | None:
    """Most frequent label, smallest label on ties; ``None`` when empty."""
    counts = Counter(labels)
    if not counts:
        return None
    best = max(counts.values())
    return min(label for label, count in counts.items() if count == best)


# ---------------------------------------------------------------- shapes


@dataclass(frozen=True, eq=False)
class TreeShape:
    """Unlabeled binary tree structure; ``left is None`` marks a leaf."""

    left: "TreeShape | None" = None
    right: "TreeShape | None" = None
    n_leaves: int = field(init=False)
    height: int = field(init=False)
    text: str = field(init=False)
    canonical: str = field(init=False)

    def __post_init__(self) -> None:
        if (self.left is None) != (self.right is None):
            raise TreeError("a shape node needs both children")
        if self.left is None:
            values = (1, 0, ".", ".")
        else:
            a, b = self.left.canonical, self.right.canonical
            values = (
                self.left.n_leaves + self.right.n_leaves,
                1 + max(self.left.height, self.right.height),
                f"({self.left.text},{self.right.text})",
                f"({min(a, b)},{max(a, b)})",
            )
        for name, value in zip(("n_leaves", "height", "text", "canonical"), values):
            object.__setattr__(self, name, value)

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    @property
    def children_identical(self) -> bool:
        """Whether both subtrees define the same class (mirror images count as equal)."""
        return not self.is_leaf and self.left.canonical == self.right.canonical

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TreeShape) and self.text == other.text

    def __hash__(self) -> int:
        return hash(self.text)

    def __str__(self) -> str:
        return self.text

    def __repr__(self) -> str:
        return f"TreeShape({self.text!r})"


LEAF = TreeShape()
STUMP = TreeShape(LEAF, LEAF)


def shape_of(t: Tree) -> TreeShape:
    if isinstance(t, Leaf):
        return LEAF
    return TreeShape(shape_of(t.left), shape_of(t.right))


def parse_shape(text: str) -> TreeShape:
    """Parse ``.`` for a leaf and ``(L,R)`` for a node."""
    s = re.sub(r"\s+", "", text)
    pos = 0

    def parse() -> TreeShape:
        nonlocal pos
        if pos >= len(s):
            raise TreeError(f"unexpected end of shape {text!r}")
        if s[pos] == ".":
            pos += 1
            return LEAF
        if s[pos] != "(":
            raise TreeError(f"unexpected {s[pos]!r} at {pos} in shape {text!r}")
        pos += 1
        left = parse()
        expect(",")
        right = parse()
        expect(")")
        return TreeShape(left, right)

    def expect(ch: str) -> None:
        nonlocal pos
        if pos >= len(s) or s[pos] != ch:
            raise TreeError(f"expected {ch!r} at {pos} in shape {text!r}")
        pos += 1

    shape = parse()
    if pos != len(s):
        raise TreeError(f"trailing text in shape {text!r}")
    return shape


def caterpillar(n_internal: int) -> TreeShape:
    """Chain of ``n_internal`` nodes, each with a leaf on its left."""
    shape = LEAF
    for _ in range(n_internal):
        shape = TreeShape(LEAF, shape)
    return shape


def balanced(n_leaves_: int) -> TreeShape:
    """Shape whose subtrees split the leaves as evenly as possible."""
    if n_leaves_ < 1:
        raise TreeError("a shape has at least one leaf")
    if n_leaves_ == 1:
        return LEAF
    half = n_leaves_ // 2
    return TreeShape(balanced(n_leaves_ - half), balanced(half))


# ---------------------------------------------------------------- paths and edits


class PruneMode(enum.Enum):
    REPLACE_WITH_LEFT = "left"
    REPLACE_WITH_RIGHT = "right"
    REPLACE_WITH_LEAF = "leaf"


def _check_path(path: str) -> None:
    if any(ch not in "01" for ch in path):
        raise TreeError(f"invalid path {path!r}: use 0 for left and 1 for right")


def subtree_at(t: Tree, path: str) -> Tree:
    _check_path(path)
    for step in path:
        if isinstance(t, Leaf):
            raise TreeError(f"path {path!r} walks past a leaf")
        t = t.left if step == "0" else t.right
    return t


def internal_paths(t: Tree, prefix: str = "") -> Iterator[str]:
    """Paths of internal nodes in preorder."""
    if isinstance(t, Node):
        yield prefix
        yield from internal_paths(t.left, prefix + "0")
        yield from internal_paths(t.right, prefix + "1")


def examples_reaching(t: Tree, path: str, examples: Iterable[Example]) -> list[Example]:
    _check_path(path)
    reached = list(examples)
    for step in path:
        if isinstance(t, Leaf):
            raise TreeError(f"path {path!r} walks past a leaf")
        go_left = step == "0"
        reached = [x for x in reached if t.rule.holds(x) == go_left]
        t = t.left if go_left else t.right
    return reached


def leaf_label_at(t: Tree, path: str, examples: Sequence[Example]) -> int:
    """Majority label of the examples reaching ``path``.

    An empty node inherits the majority of its nearest nonempty ancestor; with
    no examples at all the smallest label 1 is used.
    """
    for cut in range(len(path), -1, -1):
        label = majority_label(x.label for x in examples_reaching(t, path[:cut], examples))
        if label is not None:
            return label
    return 1


def replace_at(t: Tree, path: str, new: Tree) -> Tree:
    _check_path(path)
    if not path:
        return new
    if isinstance(t, Leaf):
        raise TreeError(f"path {path!r} walks past a leaf")
    if path[0] == "0":
        return Node(t.rule, replace_at(t.left, path[1:], new), t.right)
    return Node(t.rule, t.left, replace_at(t.right, path[1:], new))


def prune_edit(t: Tree, node_path: str, mode: PruneMode, sample: Dataset | None = None) -> Tree:
    """Replace the internal node at ``node_path`` by a child or by a majority leaf."""
    node = subtree_at(t, node_path)
    if isinstance(node, Leaf):
        raise TreeError(f"path {node_path!r} addresses a leaf")
    if mode is PruneMode.REPLACE_WITH_LEFT:
        new: Tree = node.left
    elif mode is PruneMode.REPLACE_WITH_RIGHT:
        new = node.right
    else:
        if sample is None:
            raise TreeError("replacing with a leaf needs a sample")
        new = Leaf(leaf_label_at(t, node_path, sample.examples))
    return replace_at(t, node_path, new)


def path_shape(t: Tree, node_path: str) -> TreeShape:
    """Caterpillar class isolating the node at ``node_path``: one internal node per step."""
    subtree_at(t, node_path)
    return caterpillar(len(node_path))


# ---------------------------------------------------------------- text form

_TOKEN = re.compile(r"\s*(\(|\)|,|[rno]\d+(?:<=|==)[^,()\s]+|\d+)")


def tree_to_text(t: Tree) -> str:
    if isinstance(t, Leaf):
        return str(t.label)
    return f"({t.rule},{tree_to_text(t.left)},{tree_to_text(t.right)})"


def _parse_rule(token: str) -> DecisionRule:
    kind, rest = token[0], token[1:]
    if kind == "n":
        feature, value = rest.split("==")
        return NominalEq(int(feature), int(value))
    feature, value = rest.split("<=")
    if kind == "r":
        return ThresholdReal(int(feature), float(value))
    return ThresholdOrdinal(int(feature), int(value))


def tree_from_text(text: str) -> Tree:
    """Inverse of :func:`tree_to_text`."""
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        match = _TOKEN.match(text, pos)
        if not match:
            raise TreeError(f"cannot parse tree text at {pos}: {text[pos:pos + 20]!r}")
        tokens.append(match.group(1))
        pos = match.end()
    it = iter(tokens)

    def take() -> str:
        try:
            return next(it)
        except StopIteration:
            raise TreeError("unexpected end of tree text") from None

    def parse(tok: str) -> Tree:
        if tok != "(":
            if not tok.isdigit():
                raise TreeError(f"expected a label, got {tok!r}")
            return Leaf(int(tok))
        try:
            rule = _parse_rule(take())
        except ValueError:
            raise TreeError("malformed rule in tree text") from None
        if take() != ",":
            raise TreeError("expected ','")
        left = parse(take())
        if take() != ",":
            raise TreeError("expected ','")
        right = parse(take())
        if take() != ")":
            raise TreeError("expected ')'")
        return Node(rule, left, right)

    tree = parse(take())
    if next(it, None) is not None:
        raise TreeError("trailing tokens in tree text")
    return tree
