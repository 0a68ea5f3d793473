"""Weighted sample set backed by a subtree-sum AVL tree.

Stores up to ``capacity`` pairs (x, c_x) with k-bit keys and positive
integer weights.  Insert, delete, membership and prefix sampling walk one
root-to-leaf path (plus O(1) nodes per rotation), and every visited node is
counted so the logarithmic cost can be checked.  State preparation descends
the same tree, splitting amplitude by the square roots of the subtree sums.
"""
from __future__ import annotations

import math

import numpy as np

from ..graph import WSET_OP, QueryLedger
from ..qsim.state import Basis, StateVector


class _Node:
    __slots__ = ("key", "weight", "left", "right", "height", "total")

    def __init__(self, key, weight):
        self.key = key
        self.weight = weight
        self.left = None
        self.right = None
        self.height = 1
        self.total = weight


def _h(node):
    return node.height if node else 0


def _t(node):
    return node.total if node else 0


class WeightedSampleSet:
    def __init__(self, capacity: int, bits: int, weight_bound: int | None = None,
                 ledger: QueryLedger | None = None):
        if capacity < 1 or bits < 1:
            raise ValueError("capacity and bit width must be positive")
        self.capacity = capacity
        self.bits = bits
        self.weight_bound = weight_bound if weight_bound is not None else max(capacity, 2) ** 4
        self.ledger = ledger
        self._root = None
        self._size = 0
        self.last_touches = 0
        self.total_touches = 0

    # ---------------------------------------------------------- bookkeeping
    def _visit(self, node):
        self._touch += 1
        return node

    def _begin(self):
        self._touch = 0

    def _end(self):
        self.last_touches = self._touch
        self.total_touches += self._touch
        if self.ledger is not None:
            self.ledger.add(WSET_OP)

    def _fix(self, node):
        node.height = 1 + max(_h(node.left), _h(node.right))
        node.total = node.weight + _t(node.left) + _t(node.right)

    def _rotate_right(self, y):
        x = self._visit(y.left)
        y.left = x.right
        x.right = y
        self._fix(y)
        self._fix(x)
        return x

    def _rotate_left(self, x):
        y = self._visit(x.right)
        x.right = y.left
        y.left = x
        self._fix(x)
        self._fix(y)
        return y

    def _balance(self, node):
        self._fix(node)
        bal = _h(node.left) - _h(node.right)
        if bal > 1:
            if _h(node.left.left) < _h(node.left.right):
                node.left = self._rotate_left(node.left)
            return self._rotate_right(node)
        if bal < -1:
            if _h(node.right.right) < _h(node.right.left):
                node.right = self._rotate_right(node.right)
            return self._rotate_left(node)
        return node

    def _check_key(self, x):
        if not isinstance(x, (int, np.integer)) or not 0 <= x < (1 << self.bits):
            raise ValueError(f"element {x!r} is not a {self.bits}-bit integer")

    # ---------------------------------------------------------- operations
    def insert(self, x: int, c: int) -> None:
        self._check_key(x)
        if not isinstance(c, (int, np.integer)) or c < 1 or c > self.weight_bound:
            raise ValueError(f"weight {c!r} outside 1..{self.weight_bound}")
        if self._size >= self.capacity:
            raise OverflowError(f"capacity {self.capacity} exceeded")
        self._begin()
        self._root = self._insert(self._root, int(x), int(c))
        self._size += 1
        self._end()

    def _insert(self, node, x, c):
        if node is None:
            self._touch += 1
            return _Node(x, c)
        self._visit(node)
        if x == node.key:
            raise KeyError(f"element {x} already present")
        if x < node.key:
            node.left = self._insert(node.left, x, c)
        else:
            node.right = self._insert(node.right, x, c)
        return self._balance(node)

    def delete(self, x: int) -> None:
        self._check_key(x)
        self._begin()
        try:
            self._root = self._delete(self._root, int(x))
        finally:
            self._end()
        self._size -= 1

    def _delete(self, node, x):
        if node is None:
            raise KeyError(f"element {x} not present")
        self._visit(node)
        if x < node.key:
            node.left = self._delete(node.left, x)
        elif x > node.key:
            node.right = self._delete(node.right, x)
        else:
            if node.left is None:
                return node.right
            if node.right is None:
                return node.left
            succ = node.right
            self._visit(succ)
            while succ.left is not None:
                succ = self._visit(succ.left)
            node.key, node.weight = succ.key, succ.weight
            node.right = self._delete_min(node.right)
        return self._balance(node)

    def _delete_min(self, node):
        if node.left is None:
            return node.right
        node.left = self._delete_min(node.left)
        return self._balance(node)

    def contains(self, x: int) -> bool:
        self._begin()
        node = self._root
        found = False
        while node is not None:
            self._visit(node)
            if x == node.key:
                found = True
                break
            node = node.left if x < node.key else node.right
        self._end()
        return found

    def weight(self, x: int) -> int:
        node = self._root
        while node is not None:
            if x == node.key:
                return node.weight
            node = node.left if x < node.key else node.right
        raise KeyError(x)

    @property
    def total(self) -> int:
        return _t(self._root)

    def __len__(self):
        return self._size

    def items(self) -> list:
        out = []

        def walk(node):
            if node:
                walk(node.left)
                out.append((node.key, node.weight))
                walk(node.right)

        walk(self._root)
        return out

    def find_prefix(self, r: int) -> int:
        """Element x holding position r of the weight line, 0 <= r < total."""
        if not 0 <= r < self.total:
            raise ValueError("prefix position out of range")
        self._begin()
        node = self._root
        while True:
            self._visit(node)
            lt = _t(node.left)
            if r < lt:
                node = node.left
            elif r < lt + node.weight:
                self._end()
                return node.key
            else:
                r -= lt + node.weight
                node = node.right

    def sample(self, rng: np.random.Generator) -> int:
        if self._size == 0:
            raise ValueError("cannot sample from an empty set")
        return self.find_prefix(int(rng.integers(self.total)))

    def prepare_state(self) -> StateVector:
        """sum_x sqrt(c_x / total)|x>, built by descending the tree."""
        if self._size == 0:
            raise ValueError("cannot prepare a state from an empty set")
        self._begin()
        amps = {}

        def descend(node, amp):
            if node is None:
                return
            self._visit(node)
            T = node.total
            amps[node.key] = amp * math.sqrt(node.weight / T)
            descend(node.left, amp * math.sqrt(_t(node.left) / T))
            descend(node.right, amp * math.sqrt(_t(node.right) / T))

        descend(self._root, 1.0)
        self._end()
        keys = sorted(amps)
        return StateVector(Basis(keys), np.array([amps[k] for k in keys]))

    def audit(self) -> None:
        """Check heights, balance, ordering and subtree sums."""

        def check(node, lo, hi):
            if node is None:
                return 0, 0
            if not (lo < node.key < hi):
                raise AssertionError("search-tree order violated")
            hl, tl = check(node.left, lo, node.key)
            hr, tr = check(node.right, node.key, hi)
            if node.height != 1 + max(hl, hr) or abs(hl - hr) > 1:
                raise AssertionError("AVL height invariant violated")
            if node.total != node.weight + tl + tr:
                raise AssertionError("subtree sum invariant violated")
            return node.height, node.total

        check(self._root, -1, 1 << self.bits)

    @property
    def memory_bits(self) -> int:
        """Reported QCRAM budget k * capacity * log2(capacity); accounting only."""
        return self.bits * self.capacity * max(1, math.ceil(math.log2(self.capacity)))


def wset_update(ws: WeightedSampleSet, op) -> WeightedSampleSet:
    """Apply ``("insert", x, c)`` or ``("delete", x)``."""
    kind = op[0]
    if kind == "insert":
        ws.insert(op[1], op[2])
    elif kind == "delete":
        ws.delete(op[1])
    else:
        raise ValueError(f"unknown operation {kind!r}")
    return ws


def wset_contains(ws: WeightedSampleSet, x: int) -> bool:
    return ws.contains(x)


def wset_prepare_state(ws: WeightedSampleSet) -> StateVector:
    return ws.prepare_state()
