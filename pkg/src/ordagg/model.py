"""Domain types shared by the whole package.

Items are dense integers 0..n-1. Constraints are small frozen dataclasses;
unordered pairs inside them are stored smaller-index-first so equal constraints
compare equal. Trees live in flat index arenas (parallel tuples) so traversal
is deterministic, child order is explicit, and rebuilding with swapped children
is cheap.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np

KINDS = ("mas", "btw", "nonbtw", "cc", "triplets", "quartets")


def _swap_if_needed(obj, x_field: str, y_field: str) -> None:
    x = getattr(obj, x_field)
    y = getattr(obj, y_field)
    if y < x:
        object.__setattr__(obj, x_field, y)
        object.__setattr__(obj, y_field, x)


@dataclass(frozen=True)
class Precedes:
    """a must come before b; the only constraint where field order is semantic."""

    a: int
    b: int

    def items(self):
        return (self.a, self.b)


@dataclass(frozen=True)
class Between:
    """b must lie between a and c in the ranking (a and c interchangeable)."""

    a: int
    b: int
    c: int

    def __post_init__(self):
        _swap_if_needed(self, "a", "c")

    def items(self):
        return (self.a, self.b, self.c)


@dataclass(frozen=True)
class NotBetween:
    """out must not lie between a and b (a and b interchangeable)."""

    a: int
    b: int
    out: int

    def __post_init__(self):
        _swap_if_needed(self, "a", "b")

    def items(self):
        return (self.a, self.b, self.out)


@dataclass(frozen=True)
class MustLink:
    a: int
    b: int

    def __post_init__(self):
        _swap_if_needed(self, "a", "b")

    def items(self):
        return (self.a, self.b)


@dataclass(frozen=True)
class CannotLink:
    a: int
    b: int

    def __post_init__(self):
        _swap_if_needed(self, "a", "b")

    def items(self):
        return (self.a, self.b)


@dataclass(frozen=True)
class DesiredTriplet:
    """Resolution ab|out must hold: the a,b ancestor sits strictly below the full LCA."""

    a: int
    b: int
    out: int

    def __post_init__(self):
        _swap_if_needed(self, "a", "b")

    def items(self):
        return (self.a, self.b, self.out)


@dataclass(frozen=True)
class ForbiddenTriplet:
    """Resolution ab|out must not hold."""

    a: int
    b: int
    out: int

    def __post_init__(self):
        _swap_if_needed(self, "a", "b")

    def items(self):
        return (self.a, self.b, self.out)


@dataclass(frozen=True)
class DesiredQuartet:
    """Split ab|cd must hold: the a-b and c-d paths must be vertex disjoint."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        _swap_if_needed(self, "a", "b")
        _swap_if_needed(self, "c", "d")

    def items(self):
        return (self.a, self.b, self.c, self.d)


@dataclass(frozen=True)
class ForbiddenQuartet:
    """Split ab|cd must not hold."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        _swap_if_needed(self, "a", "b")
        _swap_if_needed(self, "c", "d")

    def items(self):
        return (self.a, self.b, self.c, self.d)


@dataclass(frozen=True)
class FourSeparated:
    """Both of a,b must precede both of c,d in the ranking, or vice versa."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        _swap_if_needed(self, "a", "b")
        _swap_if_needed(self, "c", "d")

    def items(self):
        return (self.a, self.b, self.c, self.d)


@dataclass(frozen=True)
class FourNonSeparated:
    """The blocks {a,b} and {c,d} must not be fully separated in the ranking."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        _swap_if_needed(self, "a", "b")
        _swap_if_needed(self, "c", "d")

    def items(self):
        return (self.a, self.b, self.c, self.d)


Constraint = Union[
    Precedes,
    Between,
    NotBetween,
    MustLink,
    CannotLink,
    DesiredTriplet,
    ForbiddenTriplet,
    DesiredQuartet,
    ForbiddenQuartet,
    FourSeparated,
    FourNonSeparated,
]

# FourSeparated / FourNonSeparated are reduction-side ranking constraints and
# belong to no instance kind.
KIND_CONSTRAINTS: dict[str, tuple[type, ...]] = {
    "mas": (Precedes,),
    "btw": (Between,),
    "nonbtw": (NotBetween,),
    "cc": (MustLink, CannotLink),
    "triplets": (DesiredTriplet, ForbiddenTriplet),
    "quartets": (DesiredQuartet, ForbiddenQuartet),
}


@dataclass(frozen=True)
class Ranking:
    """A permutation of 0..n-1; order[0] is the first (earliest) item."""

    order: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.order)

    @cached_property
    def position(self) -> np.ndarray:
        pos = np.empty(len(self.order), dtype=np.int64)
        pos[np.asarray(self.order, dtype=np.int64)] = np.arange(len(self.order))
        return pos


@dataclass(frozen=True)
class Partition:
    """labels[i] is the cluster of item i; labels need not be consecutive."""

    labels: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class RootedBinaryTree:
    """Flat arena: node i has parent[i] (-1 at the root), children left[i] and
    right[i] (-1 at leaves), and leaf_item[i] (-1 at internal nodes).

    There are 2n-1 nodes for n leaves and every internal node has exactly two
    ordered children; left/right order matters only to the projection maps.
    """

    parent: tuple[int, ...]
    left: tuple[int, ...]
    right: tuple[int, ...]
    leaf_item: tuple[int, ...]
    root: int

    @property
    def node_count(self) -> int:
        return len(self.parent)

    @cached_property
    def n_leaves(self) -> int:
        return sum(1 for x in self.leaf_item if x >= 0)

    @cached_property
    def leaf_of_item(self) -> tuple[int, ...]:
        out = [-1] * self.n_leaves
        for node, item in enumerate(self.leaf_item):
            if item >= 0:
                out[item] = node
        return tuple(out)

    @cached_property
    def depth(self) -> tuple[int, ...]:
        d = [0] * self.node_count
        stack = [self.root]
        while stack:
            v = stack.pop()
            l, r = self.left[v], self.right[v]
            if l >= 0:
                d[l] = d[v] + 1
                d[r] = d[v] + 1
                stack.append(l)
                stack.append(r)
        return tuple(d)

    def lca(self, u: int, v: int) -> int:
        """Lowest common ancestor of two arena node indices."""
        d = self.depth
        while d[u] > d[v]:
            u = self.parent[u]
        while d[v] > d[u]:
            v = self.parent[v]
        while u != v:
            u = self.parent[u]
            v = self.parent[v]
        return u

    def leaves_in_order(self) -> tuple[int, ...]:
        """Leaf items read left to right."""
        out = []
        stack = [self.root]
        while stack:
            v = stack.pop()
            if self.leaf_item[v] >= 0:
                out.append(self.leaf_item[v])
            else:
                stack.append(self.right[v])
                stack.append(self.left[v])
        return tuple(out)


@dataclass(frozen=True)
class UnrootedTree:
    """Adjacency-list tree; leaves carry items, internal nodes have degree 3."""

    adjacency: tuple[tuple[int, ...], ...]
    leaf_item: tuple[int, ...]

    @property
    def node_count(self) -> int:
        return len(self.adjacency)

    @cached_property
    def n_leaves(self) -> int:
        return sum(1 for x in self.leaf_item if x >= 0)

    @cached_property
    def leaf_of_item(self) -> tuple[int, ...]:
        out = [-1] * self.n_leaves
        for node, item in enumerate(self.leaf_item):
            if item >= 0:
                out[item] = node
        return tuple(out)

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if u < v:
                    out.append((u, v))
        return out

    @cached_property
    def leaf_distances(self) -> np.ndarray:
        """Pairwise path lengths between leaves, indexed by item id."""
        n = self.n_leaves
        dist = np.zeros((n, n), dtype=np.int64)
        for item in range(n):
            start = self.leaf_of_item[item]
            d = [-1] * self.node_count
            d[start] = 0
            q = deque([start])
            while q:
                u = q.popleft()
                for v in self.adjacency[u]:
                    if d[v] < 0:
                        d[v] = d[u] + 1
                        q.append(v)
            for other in range(n):
                dist[item, other] = d[self.leaf_of_item[other]]
        return dist


Solution = Union[Ranking, Partition, RootedBinaryTree, UnrootedTree]
GroundTruth = Solution

SOLUTION_TYPE: dict[str, type] = {
    "mas": Ranking,
    "btw": Ranking,
    "nonbtw": Ranking,
    "cc": Partition,
    "triplets": RootedBinaryTree,
    "quartets": UnrootedTree,
}


@dataclass(frozen=True)
class Instance:
    kind: str
    n: int
    constraints: tuple[Constraint, ...]
    ground_truth: Solution | None = None

    @cached_property
    def grouped(self) -> dict[type, np.ndarray]:
        """Constraint item tuples stacked per class, for vectorized scoring."""
        buckets: dict[type, list[tuple[int, ...]]] = {}
        for c in self.constraints:
            buckets.setdefault(type(c), []).append(c.items())
        return {
            cls: np.asarray(rows, dtype=np.int64) for cls, rows in buckets.items()
        }


def forbidden_desired_counts(instance: Instance) -> tuple[int, int]:
    """(m1, m2) = (# forbidden, # desired) constraints of a tree-kind instance."""
    m1 = sum(
        1 for c in instance.constraints if isinstance(c, (ForbiddenTriplet, ForbiddenQuartet))
    )
    m2 = sum(
        1 for c in instance.constraints if isinstance(c, (DesiredTriplet, DesiredQuartet))
    )
    return m1, m2


# ---------------------------------------------------------------------------
# construction helpers


def rooted_from_nested(nested) -> RootedBinaryTree:
    """Build an arena tree from nested pairs; a leaf is an int item, an
    internal node is a 2-sequence (left, right)."""
    parent: list[int] = []
    left: list[int] = []
    right: list[int] = []
    leaf_item: list[int] = []

    def add(spec, par: int) -> int:
        idx = len(parent)
        parent.append(par)
        left.append(-1)
        right.append(-1)
        leaf_item.append(-1)
        if isinstance(spec, (int, np.integer)):
            leaf_item[idx] = int(spec)
        else:
            l, r = spec
            left[idx] = add(l, idx)
            right[idx] = add(r, idx)
        return idx

    root = add(nested, -1)
    return RootedBinaryTree(
        parent=tuple(parent),
        left=tuple(left),
        right=tuple(right),
        leaf_item=tuple(leaf_item),
        root=root,
    )


def nested_from_rooted(t: RootedBinaryTree):
    """Inverse of rooted_from_nested (lists for internal nodes)."""

    def build(v: int):
        if t.leaf_item[v] >= 0:
            return t.leaf_item[v]
        return [build(t.left[v]), build(t.right[v])]

    return build(t.root)


def join_rooted(left_tree: RootedBinaryTree, right_tree: RootedBinaryTree) -> RootedBinaryTree:
    """New root whose left subtree is left_tree and right subtree is right_tree."""
    off = left_tree.node_count
    root = off + right_tree.node_count
    parent = list(left_tree.parent) + [p + off if p >= 0 else -1 for p in right_tree.parent]
    left = list(left_tree.left) + [x + off if x >= 0 else -1 for x in right_tree.left]
    right = list(left_tree.right) + [x + off if x >= 0 else -1 for x in right_tree.right]
    leaf_item = list(left_tree.leaf_item) + list(right_tree.leaf_item)
    parent[left_tree.root] = root
    parent[right_tree.root + off] = root
    parent.append(-1)
    left.append(left_tree.root)
    right.append(right_tree.root + off)
    leaf_item.append(-1)
    return RootedBinaryTree(
        parent=tuple(parent),
        left=tuple(left),
        right=tuple(right),
        leaf_item=tuple(leaf_item),
        root=root,
    )


# ---------------------------------------------------------------------------
# validation


def validate_ranking(r: Ranking, n: int) -> list[str]:
    if len(r.order) != n or sorted(r.order) != list(range(n)):
        return ["ranking is not a permutation of 0..n-1"]
    return []


def validate_partition(p: Partition, n: int) -> list[str]:
    out = []
    if len(p.labels) != n:
        out.append("partition has wrong item count")
    if p.labels and set(p.labels) != set(range(max(p.labels) + 1)):
        out.append("partition labels are not dense from 0")
    return out


def validate_rooted_tree(t: RootedBinaryTree, n: int) -> list[str]:
    out = []
    if n < 1:
        return ["rooted tree needs at least one item"]
    if t.node_count != 2 * n - 1:
        out.append("rooted tree node count is not 2n-1")
    nodes = range(t.node_count)
    if not (0 <= t.root < t.node_count) or t.parent[t.root] != -1:
        return out + ["rooted tree root is malformed"]
    leaves = [v for v in nodes if t.leaf_item[v] >= 0]
    internal = [v for v in nodes if t.leaf_item[v] < 0]
    if sorted(t.leaf_item[v] for v in leaves) != list(range(n)):
        out.append("rooted tree leaf items are not a bijection onto 0..n-1")
    for v in leaves:
        if t.left[v] != -1 or t.right[v] != -1:
            out.append("rooted tree leaf has children")
            break
    for v in internal:
        l, r = t.left[v], t.right[v]
        if not (0 <= l < t.node_count and 0 <= r < t.node_count) or l == r:
            out.append("rooted tree internal node lacks two children")
            break
        if t.parent[l] != v or t.parent[r] != v:
            out.append("rooted tree child/parent pointers disagree")
            break
    seen = set()
    stack = [t.root]
    while stack:
        v = stack.pop()
        if v in seen:
            return out + ["rooted tree contains a cycle"]
        seen.add(v)
        if t.leaf_item[v] < 0 and 0 <= t.left[v] < t.node_count and 0 <= t.right[v] < t.node_count:
            stack.append(t.left[v])
            stack.append(t.right[v])
    if len(seen) != t.node_count:
        out.append("rooted tree is not connected")
    return out


def validate_unrooted_tree(t: UnrootedTree, n: int) -> list[str]:
    out = []
    if n < 1:
        return ["unrooted tree needs at least one item"]
    expected_nodes = 1 if n == 1 else 2 * n - 2
    if t.node_count != expected_nodes:
        out.append("unrooted tree node count is wrong for n leaves")
    leaves = [v for v in range(t.node_count) if t.leaf_item[v] >= 0]
    if sorted(t.leaf_item[v] for v in leaves) != list(range(n)):
        out.append("unrooted tree leaf items are not a bijection onto 0..n-1")
    for u, nbrs in enumerate(t.adjacency):
        for v in nbrs:
            if not (0 <= v < t.node_count) or u not in t.adjacency[v]:
                return out + ["unrooted tree adjacency is not symmetric"]
        if len(set(nbrs)) != len(nbrs):
            return out + ["unrooted tree has a repeated edge"]
    if n >= 2:
        for v in range(t.node_count):
            deg = len(t.adjacency[v])
            if t.leaf_item[v] >= 0 and deg != 1:
                out.append("unrooted tree leaf degree is not 1")
                break
            if t.leaf_item[v] < 0 and deg != 3:
                out.append("unrooted tree internal degree is not 3")
                break
    edge_count = sum(len(nbrs) for nbrs in t.adjacency) // 2
    if edge_count != t.node_count - 1:
        out.append("unrooted tree edge count is not nodes-1")
    else:
        seen = {0} if t.node_count else set()
        q = deque([0]) if t.node_count else deque()
        while q:
            u = q.popleft()
            for v in t.adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    q.append(v)
        if len(seen) != t.node_count:
            out.append("unrooted tree is not connected")
    return out


_GT_VALIDATORS = {
    Ranking: validate_ranking,
    Partition: validate_partition,
    RootedBinaryTree: validate_rooted_tree,
    UnrootedTree: validate_unrooted_tree,
}


def validate(instance: Instance) -> list[str]:
    """Every invariant violation as a human-readable string; empty when valid."""
    out = []
    if instance.kind not in KINDS:
        out.append(f"unknown kind {instance.kind}")
        return out
    legal = KIND_CONSTRAINTS[instance.kind]
    for i, c in enumerate(instance.constraints):
        if not isinstance(c, legal):
            out.append(f"constraint {i} illegal for kind {instance.kind}")
            continue
        items = c.items()
        if len(set(items)) != len(items):
            out.append(f"duplicate item in constraint {i}")
        if any(not (0 <= x < instance.n) for x in items):
            out.append(f"item out of range in constraint {i}")
    gt = instance.ground_truth
    if gt is not None:
        expected = SOLUTION_TYPE[instance.kind]
        if not isinstance(gt, expected):
            out.append(f"ground truth does not match kind {instance.kind}")
        else:
            out.extend(_GT_VALIDATORS[expected](gt, instance.n))
    return out
