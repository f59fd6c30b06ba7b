"""The Markov triple tree, the parallel Farey tree, and per-node data.

Triples (a, b, c) solve a^2 + b^2 + c^2 = 3abc and grow by Vieta
involutions; Farey fractions grow by mediants of the interval
endpoints.  Nodes are keyed by their tree path (a word over L/R) so
that a failure of the unicity conjecture could never corrupt lookups.
The two tips (1,1,1) <-> 0/1 and (1,1,2) <-> 1/2 are level-0 boundary
nodes.

Memory note: Markov numbers grow doubly exponentially with depth (the
largest c at depth 12 has about 60 decimal digits, at depth 24 about
250000); keep ``depth`` modest unless you know what you are doing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .cf import Period, conjunction, TIP_LEFT_DIGITS, TIP_RIGHT_DIGITS, ROOT_DIGITS

__all__ = [
    "MarkovTriple",
    "FareyFraction",
    "TreeNode",
    "TreeError",
    "vieta_children",
    "farey_median",
    "markov_k",
    "markov_form",
    "markov_irrational",
    "markov_constant",
    "build_tree",
    "node_at",
    "walk_path",
    "find_fraction",
    "TIP_LEFT",
    "TIP_RIGHT",
    "ROOT",
]


class TreeError(ValueError):
    """Raised for invalid triples, fractions, or paths."""


@dataclass(frozen=True)
class MarkovTriple:
    a: int
    b: int
    c: int

    def __post_init__(self) -> None:
        a, b, c = self.a, self.b, self.c
        if min(a, b, c) < 1:
            raise TreeError(f"triple must be positive: {(a, b, c)}")
        if a * a + b * b + c * c != 3 * a * b * c:
            raise TreeError(f"not a Markov triple: {(a, b, c)}")

    def __iter__(self):
        return iter((self.a, self.b, self.c))

    def __str__(self) -> str:
        return f"({self.a},{self.b},{self.c})"


@dataclass(frozen=True)
class FareyFraction:
    p: int
    q: int

    def __post_init__(self) -> None:
        if self.q < 1 or self.p < 0:
            raise TreeError(f"bad fraction {self.p}/{self.q}")
        if math.gcd(self.p, self.q) != 1:
            raise TreeError(f"fraction {self.p}/{self.q} not reduced")
        if 2 * self.p > self.q:
            raise TreeError(f"fraction {self.p}/{self.q} outside [0, 1/2]")

    def as_fraction(self) -> Fraction:
        return Fraction(self.p, self.q)

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"


def vieta_children(t: MarkovTriple) -> tuple[MarkovTriple, MarkovTriple]:
    """Left child (c, b, 3bc - a) and right child (a, c, 3ac - b)."""
    a, b, c = t
    return (
        MarkovTriple(c, b, 3 * b * c - a),
        MarkovTriple(a, c, 3 * a * c - b),
    )


def farey_median(x: FareyFraction, y: FareyFraction) -> FareyFraction:
    """Mediant of two Farey neighbours; rejects non-neighbours."""
    p, q = x.p + y.p, x.q + y.q
    if math.gcd(p, q) != 1:
        raise TreeError(f"mediant of {x} and {y} is reducible: not neighbours")
    return FareyFraction(p, q)


def markov_k(t: MarkovTriple) -> int:
    """The unique 0 <= k < c with a*k = b (mod c)."""
    a, b, c = t
    if c == 1:
        return 0
    try:
        k = (b * pow(a, -1, c)) % c
    except ValueError as exc:
        raise TreeError(f"a={a} not invertible mod c={c}") from exc
    if (k * k + 1) % c != 0:
        raise TreeError(f"c={c} does not divide k^2+1 for k={k}")
    return k


def markov_form(c: int, k: int) -> tuple[int, int, int]:
    """The quadratic form [c, 3c-2k, l-3k] with l = (k^2+1)/c."""
    if c < 1:
        raise TreeError("c must be >= 1")
    if (k * k + 1) % c != 0:
        raise TreeError(f"c={c} does not divide k^2+1={k * k + 1}")
    ell = (k * k + 1) // c
    form = (c, 3 * c - 2 * k, ell - 3 * k)
    a, b, cf = form
    assert b * b - 4 * a * cf == 9 * c * c - 4
    return form


def markov_irrational(c: int, k: int) -> float:
    """(3c - 2k + sqrt(9c^2 - 4)) / (2c), good to ~1e-15 relative.

    Works for arbitrarily large c: both summands stay in (0, 3] as
    exact Fractions until the final correctly-rounded float conversion.
    """
    if c < 1 or not 0 <= k < c:
        raise TreeError(f"bad (c, k) = ({c}, {k})")
    rational = float(Fraction(3 * c - 2 * k, 2 * c))
    return rational + math.sqrt(float(Fraction(9 * c * c - 4, 4 * c * c)))


def markov_constant(c: int) -> float:
    """sqrt(9 - 4/c^2), the Lagrange/Markov constant of the node."""
    if c < 1:
        raise TreeError("c must be >= 1")
    return math.sqrt(9.0 - 4.0 / (float(c) * float(c)))


@dataclass(frozen=True)
class TreeNode:
    """One vertex of the tree with all its attached arithmetic data."""

    path: str
    level: int
    triple: MarkovTriple
    farey: FareyFraction
    period: Period
    k: int
    form: tuple[int, int, int]

    @property
    def c(self) -> int:
        return self.triple.c

    @property
    def q(self) -> int:
        return self.farey.q

    def __str__(self) -> str:
        label = self.path or ("root" if self.level == 1 else "tip")
        return f"<node {label} {self.farey}>"


def _make_node(path: str, level: int, triple: MarkovTriple, farey: FareyFraction,
               period: Period) -> TreeNode:
    k = markov_k(triple)
    form = markov_form(triple.c, k)
    if len(period) != farey.q:
        raise TreeError(
            f"period length {len(period)} != Farey denominator {farey.q} at {path!r}"
        )
    return TreeNode(path=path, level=level, triple=triple, farey=farey,
                    period=period, k=k, form=form)


TIP_LEFT = _make_node("0/1", 0, MarkovTriple(1, 1, 1), FareyFraction(0, 1),
                      Period(TIP_LEFT_DIGITS))
TIP_RIGHT = _make_node("1/2", 0, MarkovTriple(1, 1, 2), FareyFraction(1, 2),
                       Period(TIP_RIGHT_DIGITS))
ROOT = _make_node("", 1, MarkovTriple(2, 1, 5), FareyFraction(1, 3),
                  Period(ROOT_DIGITS))


def _child(node: TreeNode, left: TreeNode, right: TreeNode, step: str,
           leftmost: bool) -> tuple[TreeNode, TreeNode, TreeNode]:
    """One step down the tree; returns (child, its left, its right)."""
    tleft, tright = vieta_children(node.triple)
    level = node.level + 1
    if step == "L":
        farey = farey_median(left.farey, node.farey)
        period = (Period((2,) + (3,) * level + (4,)) if leftmost
                  else conjunction(node.period, left.period))
        child = _make_node(node.path + "L", level, tleft, farey, period)
        return child, left, node
    farey = farey_median(node.farey, right.farey)
    period = conjunction(right.period, node.period)
    child = _make_node(node.path + "R", level, tright, farey, period)
    return child, node, right


def walk_path(path: str) -> Iterator[tuple[TreeNode, TreeNode, TreeNode]]:
    """Yield (node, left neighbour, right neighbour) from the root down
    along ``path``.  Neighbours are the Farey-interval endpoints."""
    if any(s not in "LR" for s in path):
        raise TreeError(f"path must be a word over L/R: {path!r}")
    node, left, right = ROOT, TIP_LEFT, TIP_RIGHT
    yield node, left, right
    leftmost = True
    for step in path:
        if step == "R":
            leftmost = False
        node, left, right = _child(node, left, right, step, leftmost)
        yield node, left, right


def node_at(path: str) -> TreeNode:
    """The node at tree path ``path`` ('' is the root (2,1,5) <-> 1/3)."""
    for node, _, _ in walk_path(path):
        pass
    return node


def build_tree(depth: int) -> list[TreeNode]:
    """All nodes with level <= depth plus the two level-0 tips.

    Breadth-first order: tips, then the 2^(n-1) nodes of each level n.
    """
    if depth < 1:
        raise TreeError("depth must be >= 1")
    nodes = [TIP_LEFT, TIP_RIGHT, ROOT]
    frontier = [(ROOT, TIP_LEFT, TIP_RIGHT, True)]
    for _ in range(2, depth + 1):
        nxt = []
        for node, left, right, leftmost in frontier:
            cl = _child(node, left, right, "L", leftmost)
            cr = _child(node, left, right, "R", False)
            nxt.append((*cl, leftmost))
            nxt.append((*cr, False))
        frontier = nxt
        nodes.extend(item[0] for item in frontier)
    return nodes


def find_fraction(p: int, q: int, max_level: int = 200) -> TreeNode:
    """Locate the node with Farey fraction p/q by mediant search.

    Raises TreeError naming the nearest enclosing nodes when p/q is not
    on the tree (not reduced, outside [0, 1/2], or too deep).
    """
    if q < 1:
        raise TreeError("denominator must be positive")
    if math.gcd(p, q) != 1:
        g = math.gcd(p, q)
        raise TreeError(f"{p}/{q} is not reduced (equals {p // g}/{q // g})")
    target = Fraction(p, q)
    if target == 0:
        return TIP_LEFT
    if target == Fraction(1, 2):
        return TIP_RIGHT
    if not 0 < target < Fraction(1, 2):
        raise TreeError(
            f"{p}/{q} lies outside (0, 1/2); nearest valid nodes are 0/1 and 1/2"
        )
    node, left, right = ROOT, TIP_LEFT, TIP_RIGHT
    leftmost = True
    while node.level <= max_level:
        value = node.farey.as_fraction()
        if target == value:
            return node
        if target < value:
            node, left, right = _child(node, left, right, "L", leftmost)
        else:
            leftmost = False
            node, left, right = _child(node, left, right, "R", False)
    raise TreeError(
        f"{p}/{q} not found within {max_level} levels; "
        f"nearest nodes are {left.farey} and {right.farey}"
    )
