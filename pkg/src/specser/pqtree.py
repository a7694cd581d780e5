"""PQ-trees: construction, counting, enumeration and serialization.

A PQ-tree encodes a family of orderings of a set of units.  The children
of a P-node may be permuted freely, the children of a Q-node may only be
read forwards or backwards.  M-nodes mark index sets where the ordering
is not characterized (a multiple Fiedler value); for counting and
enumeration they behave like P-nodes, so any count involving an M-node
is an upper bound.

Trees are immutable and hashable; two trees compare equal iff they have
the same shape, kinds, child order and labels.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import PathError, PermutationLimitError, StructureError, TreeFormatError

Permutation = tuple[int, ...]

DEFAULT_PERM_CAP = 10**6


class Kind(str, Enum):
    P = "p"
    Q = "q"
    M = "m"
    LEAF = "leaf"


_MIN_CHILDREN = {Kind.P: 2, Kind.Q: 3, Kind.M: 2}


@dataclass(frozen=True)
class PQTree:
    """One node of a PQ-tree together with its subtree."""

    kind: Kind
    children: tuple["PQTree", ...] = ()
    label: int | None = None

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "children", tuple(self.children))
        if kind is Kind.LEAF:
            if self.children:
                raise StructureError("a leaf cannot have children")
            if isinstance(self.label, bool) or not isinstance(self.label, int) or self.label < 0:
                raise StructureError(f"leaf label must be a nonnegative integer, got {self.label!r}")
            return
        if self.label is not None:
            raise StructureError(f"{kind.name}-node cannot carry a label")
        need = _MIN_CHILDREN[kind]
        if len(self.children) < need:
            raise StructureError(
                f"{kind.name}-node needs at least {need} children, got {len(self.children)}"
            )
        for child in self.children:
            if not isinstance(child, PQTree):
                raise StructureError(f"child {child!r} is not a PQTree")

    @property
    def is_leaf(self) -> bool:
        return self.kind is Kind.LEAF

    def walk(self) -> Iterator["PQTree"]:
        """Yield every node in pre-order."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def frontier(self) -> Permutation:
        """Leaf labels read left to right."""
        return tuple(node.label for node in self.walk() if node.is_leaf)

    @property
    def size(self) -> int:
        return len(self.frontier())

    def has_mnode(self) -> bool:
        return any(node.kind is Kind.M for node in self.walk())

    def __repr__(self) -> str:
        if self.is_leaf:
            return f"L{self.label}"
        return f"{self.kind.name}({','.join(repr(c) for c in self.children)})"


TreeLike = Union[PQTree, int]


def _as_nodes(children: Iterable[TreeLike]) -> tuple[PQTree, ...]:
    nodes = []
    for child in children:
        if isinstance(child, PQTree):
            nodes.append(child)
        else:
            nodes.append(lnode(child))
    return tuple(nodes)


def lnode(index: int) -> PQTree:
    """Create a leaf for unit ``index``."""
    try:
        index = int(index) if not isinstance(index, bool) else index
    except (TypeError, ValueError):
        raise StructureError(f"leaf label must be an integer, got {index!r}") from None
    return PQTree(Kind.LEAF, (), index)


def pnode(children: Iterable[TreeLike]) -> PQTree:
    """Create a P-node; bare integers are wrapped as leaves."""
    return PQTree(Kind.P, _as_nodes(children))


def qnode(children: Iterable[TreeLike]) -> PQTree:
    """Create a Q-node; bare integers are wrapped as leaves."""
    return PQTree(Kind.Q, _as_nodes(children))


def mnode(children: Iterable[TreeLike]) -> PQTree:
    """Create an M-node; bare integers are wrapped as leaves."""
    return PQTree(Kind.M, _as_nodes(children))


def check_proper(tree: PQTree, units: Iterable[int] | None = None) -> None:
    """Raise StructureError unless every label appears once.

    Arity is already enforced at construction.  If ``units`` is given the
    leaf labels must be exactly that set.
    """
    labels = tree.frontier()
    seen = set()
    for label in labels:
        if label in seen:
            raise StructureError(f"unit {label} appears more than once")
        seen.add(label)
    if units is not None:
        expected = set(units)
        if seen != expected:
            missing = sorted(expected - seen)
            extra = sorted(seen - expected)
            raise StructureError(f"leaf set mismatch: missing {missing}, unexpected {extra}")


def nperm(tree: PQTree) -> int:
    """Number of admissible permutations encoded by ``tree``.

    Leaves count 1, a Q-node doubles the product over its children and a
    P- or M-node multiplies it by k!.  Python integers do not overflow.
    """
    if tree.is_leaf:
        return 1
    count = 1
    for child in tree.children:
        count *= nperm(child)
    if tree.kind is Kind.Q:
        return 2 * count
    return math.factorial(len(tree.children)) * count


def _child_orders(tree: PQTree) -> Iterator[Sequence[int]]:
    k = len(tree.children)
    if tree.kind is Kind.Q:
        yield range(k)
        yield range(k - 1, -1, -1)
    else:
        yield from itertools.permutations(range(k))


def _perms(tree: PQTree) -> Iterator[Permutation]:
    if tree.is_leaf:
        yield (tree.label,)
        return
    sub = [list(_perms(child)) for child in tree.children]
    for order in _child_orders(tree):
        for parts in itertools.product(*(sub[i] for i in order)):
            yield tuple(itertools.chain.from_iterable(parts))


def iter_perms(tree: PQTree) -> Iterator[Permutation]:
    """Lazily enumerate the admissible permutations.

    P-node child orders follow ``itertools.permutations`` (lexicographic
    in child position); a Q-node yields its forward order before the
    reversed one.  Within one child order, the children's own
    permutations vary fastest on the right.
    """
    return _perms(tree)


def all_perms(tree: PQTree, cap: int = DEFAULT_PERM_CAP) -> list[Permutation]:
    count = nperm(tree)
    if count > cap:
        raise PermutationLimitError(count, cap)
    return list(_perms(tree))


def one_perm(tree: PQTree) -> Permutation:
    """The frontier of ``tree`` as stored."""
    return tree.frontier()


def subtree(tree: PQTree, path: Sequence[int]) -> PQTree:
    """Follow ``path`` (0-based child positions) from the root."""
    node = tree
    for depth, step in enumerate(path):
        if isinstance(step, bool) or not isinstance(step, int):
            raise PathError(f"path element {step!r} at depth {depth} is not an integer")
        if not 0 <= step < len(node.children):
            raise PathError(
                f"no child {step} at depth {depth}: node {node.kind.name} has "
                f"{len(node.children)} children"
            )
        node = node.children[step]
    return node


def relabel(tree: PQTree, mapping: Mapping[int, int] | Sequence[int]) -> PQTree:
    """Replace each leaf label ``u`` by ``mapping[u]``."""
    if tree.is_leaf:
        return lnode(mapping[tree.label])
    return PQTree(tree.kind, tuple(relabel(c, mapping) for c in tree.children))


def canonical(tree: PQTree) -> PQTree:
    """Representative of the equivalence class of ``tree``.

    P- and M-node children are sorted by their smallest label; a Q-node
    is oriented so that its first child holds a smaller label than its
    last child.
    """
    if tree.is_leaf:
        return tree
    kids = [canonical(c) for c in tree.children]
    keys = [min(c.frontier()) for c in kids]
    if tree.kind is Kind.Q:
        if keys[0] > keys[-1]:
            kids.reverse()
    else:
        kids = [k for _, k in sorted(zip(keys, kids), key=lambda pair: pair[0])]
    return PQTree(tree.kind, tuple(kids))


def equivalent(a: PQTree, b: PQTree) -> bool:
    """True if one tree can be turned into the other by P-permutations and Q-reversals."""
    return canonical(a) == canonical(b)


# -- serialization ---------------------------------------------------------


def to_dict(tree: PQTree) -> dict:
    if tree.is_leaf:
        return {"kind": "leaf", "label": tree.label}
    return {"kind": tree.kind.value, "children": [to_dict(c) for c in tree.children]}


def from_dict(doc, _where: str = "$") -> PQTree:
    if not isinstance(doc, dict):
        raise TreeFormatError("node must be an object", _where)
    kind = doc.get("kind")
    try:
        kind = Kind(kind)
    except ValueError:
        raise TreeFormatError(f"unknown node kind {kind!r}", _where) from None
    if kind is Kind.LEAF:
        label = doc.get("label")
        if isinstance(label, bool) or not isinstance(label, int):
            raise TreeFormatError("leaf needs an integer 'label'", _where)
        extra = set(doc) - {"kind", "label"}
    else:
        kids = doc.get("children")
        if not isinstance(kids, list):
            raise TreeFormatError("internal node needs a 'children' list", _where)
        extra = set(doc) - {"kind", "children"}
    if extra:
        raise TreeFormatError(f"unexpected keys {sorted(extra)}", _where)
    try:
        if kind is Kind.LEAF:
            return lnode(label)
        nodes = [from_dict(c, f"{_where}.children[{i}]") for i, c in enumerate(kids)]
        return PQTree(kind, tuple(nodes))
    except StructureError as err:
        raise TreeFormatError(str(err), _where) from None


def to_json(tree: PQTree, indent: int | None = None) -> str:
    return json.dumps(to_dict(tree), indent=indent)


def from_json(text: str) -> PQTree:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise TreeFormatError(f"invalid JSON: {err.msg}", err.pos) from None
    return from_dict(doc)


_DOT_SHAPES = {Kind.P: "circle", Kind.Q: "box", Kind.M: "doublecircle", Kind.LEAF: "triangle"}


def _dot_quote(text: str) -> str:
    return '"' + str(text).replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(tree: PQTree, labels: Mapping[int, str] | None = None, name: str = "pqtree") -> str:
    """Render ``tree`` as a Graphviz digraph.

    P-nodes are circles, Q-nodes boxes, M-nodes double circles and leaves
    triangles.  ``labels`` maps unit indices to captions for the leaves.
    """
    lines = [f"digraph {_dot_quote(name)} {{", "  ordering=out;"]
    edges = []
    counter = itertools.count()

    def emit(node: PQTree) -> str:
        ident = f"n{next(counter)}"
        if node.is_leaf:
            caption = labels.get(node.label, node.label) if labels else node.label
        else:
            caption = node.kind.name
        lines.append(f"  {ident} [shape={_DOT_SHAPES[node.kind]}, label={_dot_quote(caption)}];")
        for child in node.children:
            edges.append(f"  {ident} -> {emit(child)};")
        return ident

    emit(tree)
    lines.extend(edges)
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_text(tree: PQTree, labels: Mapping[int, str] | None = None, indent: str = "  ") -> str:
    """Indented one-node-per-line listing: ``P``, ``Q``, ``M`` or ``Leaf(label)``."""
    out = []

    def emit(node: PQTree, depth: int) -> None:
        if node.is_leaf:
            text = f"Leaf({node.label})"
            if labels and node.label in labels:
                text += f" {labels[node.label]}"
        else:
            text = node.kind.name
        out.append(indent * depth + text)
        for child in node.children:
            emit(child, depth + 1)

    emit(tree, 0)
    return "\n".join(out) + "\n"
