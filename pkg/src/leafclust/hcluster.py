"""Agglomerative hierarchical clustering over a precomputed distance matrix.

Complete linkage is the default throughout the package because it keeps the
maximum within-cluster dissimilarity small; single and average linkage are
available as options.  Cluster distances are recomputed directly from the
original matrix at every step, which is plenty fast at the matrix sizes
this package deals with and keeps the code obviously correct.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .distances import DistanceMatrix


class Linkage(str, Enum):
    COMPLETE = "complete"
    SINGLE = "single"
    AVERAGE = "average"


@dataclass(frozen=True)
class Merge:
    """One agglomeration step: children node ids, linkage height, merged size."""

    left: int
    right: int
    height: float
    size: int


@dataclass(frozen=True)
class Dendrogram:
    """Binary merge tree from agglomerative clustering.

    Node ids 0..m-1 are the leaves (in label order); id m+i is the cluster
    created by ``merges[i]``.  Heights are non-decreasing because all three
    supported linkages are monotone.
    """

    labels: tuple[str, ...]
    merges: tuple[Merge, ...]

    def __post_init__(self):
        labels = tuple(self.labels)
        merges = tuple(self.merges)
        m = len(labels)
        if len(merges) != m - 1:
            raise ValueError(f"expected {m - 1} merges for {m} leaves")
        seen_children = set()
        for i, mg in enumerate(merges):
            limit = m + i
            for child in (mg.left, mg.right):
                if not 0 <= child < limit:
                    raise ValueError(f"merge {i}: child id {child} out of range")
                if child in seen_children:
                    raise ValueError(f"merge {i}: child id {child} reused")
                seen_children.add(child)
            if mg.height < 0:
                raise ValueError(f"merge {i}: negative height")
            if i > 0 and mg.height < merges[i - 1].height:
                raise ValueError(f"merge {i}: heights must be non-decreasing")
        if merges and merges[-1].size != m:
            raise ValueError("final merge must contain every leaf")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "merges", merges)

    @property
    def n_leaves(self) -> int:
        return len(self.labels)

    def leaf_sets(self) -> list[frozenset[int]]:
        """Leaf index set of every node, indexed by node id."""
        m = self.n_leaves
        sets = [frozenset([i]) for i in range(m)]
        for mg in self.merges:
            sets.append(sets[mg.left] | sets[mg.right])
        return sets


def _linkage_value(block: np.ndarray, linkage: Linkage) -> float:
    if linkage is Linkage.COMPLETE:
        return float(block.max())
    if linkage is Linkage.SINGLE:
        return float(block.min())
    return float(block.mean())


def agglomerate(dm: DistanceMatrix, linkage: Linkage = Linkage.COMPLETE) -> Dendrogram:
    """Cluster a distance matrix bottom-up into a dendrogram.

    At every step the pair of active clusters with minimal linkage
    distance is merged; ties are broken toward the lexicographically
    smallest (smaller id, larger id) pair so runs are reproducible.
    """
    linkage = Linkage(linkage)
    entries = dm.entries
    m = dm.size
    # Active cluster id -> array of member leaf indices.
    active: dict[int, np.ndarray] = {i: np.array([i]) for i in range(m)}
    merges: list[Merge] = []
    for step in range(m - 1):
        ids = sorted(active)
        best = None
        for a_pos, a in enumerate(ids):
            for b in ids[a_pos + 1 :]:
                block = entries[np.ix_(active[a], active[b])]
                cand = (_linkage_value(block, linkage), a, b)
                if best is None or cand < best:
                    best = cand
        height, a, b = best
        members = np.concatenate((active[a], active[b]))
        del active[a], active[b]
        active[m + step] = members
        merges.append(Merge(a, b, height, members.size))
    return Dendrogram(dm.labels, tuple(merges))


def cut(dend: Dendrogram, k: int) -> list[int]:
    """Assign each leaf to one of k flat clusters.

    Undoes the last k-1 merges and numbers the resulting components by
    their smallest leaf index.  Returns one cluster id per label, in label
    order.
    """
    m = dend.n_leaves
    if not 1 <= k <= m:
        raise ValueError(f"k must be in [1, {m}], got {k}")
    parent = list(range(2 * m - 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, mg in enumerate(dend.merges[: m - k]):
        node = m + i
        parent[find(mg.left)] = node
        parent[find(mg.right)] = node

    roots: dict[int, list[int]] = {}
    for leaf in range(m):
        roots.setdefault(find(leaf), []).append(leaf)
    components = sorted(roots.values(), key=min)
    assignment = [0] * m
    for cluster_id, leaves in enumerate(components):
        for leaf in leaves:
            assignment[leaf] = cluster_id
    return assignment


def _ordered_children(dend: Dendrogram) -> dict[int, tuple[int, int]]:
    """Children of each internal node, smaller subtree-minimum leaf first."""
    m = dend.n_leaves
    min_leaf = list(range(m)) + [0] * (m - 1)
    children: dict[int, tuple[int, int]] = {}
    for i, mg in enumerate(dend.merges):
        node = m + i
        left, right = sorted((mg.left, mg.right), key=lambda c: min_leaf[c])
        children[node] = (left, right)
        min_leaf[node] = min_leaf[left]
    return children


def leaf_order(dend: Dendrogram) -> list[int]:
    """Left-to-right leaf indices of the deterministic tree layout."""
    m = dend.n_leaves
    children = _ordered_children(dend)
    order: list[int] = []
    stack = [2 * m - 2]
    while stack:
        node = stack.pop()
        if node < m:
            order.append(node)
        else:
            left, right = children[node]
            stack.append(right)
            stack.append(left)
    return order


def _format_length(x: float) -> str:
    out = repr(float(x))
    return out[:-2] if out.endswith(".0") else out


def to_newick(dend: Dendrogram) -> str:
    """Serialize a dendrogram as a Newick string with branch lengths.

    A child's branch length is its parent's merge height minus its own
    height (leaves sit at height 0).  Children are ordered by their
    smallest contained leaf index, so output is deterministic.
    """
    m = dend.n_leaves
    if m < 2:
        raise ValueError("need at least 2 leaves for a Newick tree")
    heights = [0.0] * m + [mg.height for mg in dend.merges]
    children = _ordered_children(dend)

    def render(node: int, parent_height: float) -> str:
        length = _format_length(parent_height - heights[node])
        if node < m:
            return f"{_escape_label(dend.labels[node])}:{length}"
        left, right = children[node]
        inner = f"({render(left, heights[node])},{render(right, heights[node])})"
        return f"{inner}:{length}"

    root = 2 * m - 2
    left, right = children[root]
    body = f"({render(left, heights[root])},{render(right, heights[root])})"
    return body + ";"


_NEWICK_UNSAFE = set("():;,[]' \t\n")


def _escape_label(label: str) -> str:
    if not label or set(label) & _NEWICK_UNSAFE:
        return "'" + label.replace("'", "''") + "'"
    return label
