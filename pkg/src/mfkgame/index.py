"""AVL tree of keyword triples (index, string, count) plus the running-max tracker."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

from .comparator import MemoryString
from .mfk import BitString

FAITHFUL = "faithful"
STRICT = "strict"


@dataclass(eq=False)
class KeywordNode:
    i: int
    s: BitString
    c: int = 0
    left: Optional["KeywordNode"] = field(default=None, repr=False)
    right: Optional["KeywordNode"] = field(default=None, repr=False)
    height: int = field(default=1, repr=False)

    def __post_init__(self):
        self.accessor = MemoryString(self.s)


def _h(node: Optional[KeywordNode]) -> int:
    return node.height if node is not None else 0


def _update(node: KeywordNode) -> None:
    node.height = 1 + max(_h(node.left), _h(node.right))


def _rotate_right(node: KeywordNode) -> KeywordNode:
    pivot = node.left
    node.left, pivot.right = pivot.right, node
    _update(node)
    _update(pivot)
    return pivot


def _rotate_left(node: KeywordNode) -> KeywordNode:
    pivot = node.right
    node.right, pivot.left = pivot.left, node
    _update(node)
    _update(pivot)
    return pivot


def _rebalance(node: KeywordNode) -> KeywordNode:
    _update(node)
    balance = _h(node.left) - _h(node.right)
    if balance > 1:
        if _h(node.left.left) < _h(node.left.right):
            node.left = _rotate_left(node.left)
        return _rotate_right(node)
    if balance < -1:
        if _h(node.right.right) < _h(node.right.left):
            node.right = _rotate_right(node.right)
        return _rotate_left(node)
    return node


class KeywordTree:
    """Self-balancing BST keyed by lexicographic order of the strings."""

    def __init__(self):
        self.root: Optional[KeywordNode] = None
        self.size = 0
        self.bumps = 0

    def __len__(self) -> int:
        return self.size

    def __iter__(self) -> Iterator[KeywordNode]:
        stack, node = [], self.root
        while stack or node is not None:
            while node is not None:
                stack.append(node)
                node = node.left
            node = stack.pop()
            yield node
            node = node.right

    @property
    def height(self) -> int:
        return _h(self.root)

    def add(self, j: int, s: BitString) -> bool:
        """Insert (j, s, 0) unless s is present; True if a node was created."""
        created = False

        def insert(node):
            nonlocal created
            if node is None:
                created = True
                return KeywordNode(j, s)
            # exact in-memory comparison, bytes order == lexicographic order
            if s.data < node.s.data:
                node.left = insert(node.left)
            elif s.data > node.s.data:
                node.right = insert(node.right)
            else:
                return node
            return _rebalance(node)

        self.root = insert(self.root)
        if created:
            self.size += 1
        return created

    def find(self, w, cmp: Callable) -> Optional[KeywordNode]:
        node = self.root
        while node is not None:
            outcome = cmp(w, node.accessor)
            if outcome == 0:
                return node
            node = node.left if outcome < 0 else node.right
        return None

    def check_invariants(self) -> None:
        """Raise AssertionError unless order, balance, heights and size hold."""
        count = 0

        def walk(node, lo, hi):
            nonlocal count
            if node is None:
                return 0
            count += 1
            assert lo is None or lo < node.s.data, "order violated"
            assert hi is None or node.s.data < hi, "order violated"
            hl = walk(node.left, lo, node.s.data)
            hr = walk(node.right, node.s.data, hi)
            assert abs(hl - hr) <= 1, "unbalanced"
            assert node.height == 1 + max(hl, hr), "stale height"
            return node.height

        walk(self.root, None, None)
        assert count == self.size, "size mismatch"


@dataclass
class MaxTracker:
    """Running (index, count) of the leading keyword.

    Faithful mode starts at count 1 and only moves on a strictly larger
    count.  Strict mode starts at count 0 and also moves to a smaller index
    on equal counts, so it always holds the minimal-index argmax.
    """

    i_max: int = 1
    c_max: Optional[int] = None
    mode: str = FAITHFUL

    def __post_init__(self):
        if self.mode not in (FAITHFUL, STRICT):
            raise ValueError(f"unknown tracker mode {self.mode!r}")
        if self.c_max is None:
            self.c_max = 1 if self.mode == FAITHFUL else 0


def tree_add(tree: KeywordTree, j: int, s: BitString) -> None:
    tree.add(j, s)


def tree_find(tree: KeywordTree, w, cmp: Callable) -> Optional[KeywordNode]:
    return tree.find(w, cmp)


def bump_count(tree: KeywordTree, node: KeywordNode, tracker: MaxTracker, mode: Optional[str] = None) -> None:
    mode = tracker.mode if mode is None else mode
    node.c += 1
    tree.bumps += 1
    if node.c > tracker.c_max:
        tracker.c_max = node.c
        tracker.i_max = node.i
    elif mode == STRICT and node.c == tracker.c_max and node.i < tracker.i_max:
        tracker.i_max = node.i
