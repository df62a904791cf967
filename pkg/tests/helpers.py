"""Shared test utilities: random generators and independent oracles.

The oracles here deliberately avoid the library's own code paths: moments
and integral distances are re-derived by midpoint quadrature on a fine
grid, clustering by a plain-Python agglomerative loop over member lists,
and Newick strings by a tiny recursive-descent parser.
"""

from __future__ import annotations

import math
from collections import Counter

import numpy as np

from leafclust import CcdSequence, StepDensity, TWO_PI

PANELS = 10**6


# ---------------------------------------------------------------------------
# random inputs

def random_ccd(rng, n_range=(2, 2000), high=100.0, seq_id="seq") -> CcdSequence:
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    values = rng.uniform(0.0, high, n)
    if not np.any(values > 0):
        values[0] = high / 2
    return CcdSequence(seq_id, values)


def directional_ccd(rng, n_range=(50, 2000), seq_id="seq") -> CcdSequence:
    """A trace with real shape signal, so the mean direction is well defined."""
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    theta = TWO_PI * np.arange(1, n + 1) / n
    phase = rng.uniform(0.0, TWO_PI)
    amp1 = rng.uniform(0.1, 0.45)
    amp2 = rng.uniform(0.0, 0.3)
    k2 = int(rng.integers(2, 6))
    values = 1.0 + amp1 * np.cos(theta - phase) + amp2 * np.cos(k2 * theta - 3 * phase)
    values = values * rng.uniform(0.2, 40.0)
    values = values * (1.0 + 0.05 * rng.standard_normal(n))
    return CcdSequence(seq_id, np.maximum(values, 0.0))


def random_density(rng, max_intervals=12, spread=0.3, min_gap=1e-4) -> StepDensity:
    """Random step density with moderate total variation.

    Keeping the height spread moderate bounds the total variation, which
    in turn bounds the breakpoint-straddling error of midpoint quadrature
    oracles well below the 1e-6 tolerances used in tests.
    """
    k = int(rng.integers(2, max_intervals + 1))
    while True:
        inner = np.sort(rng.uniform(min_gap, TWO_PI - min_gap, k - 1))
        breaks = np.concatenate(([0.0], inner, [TWO_PI]))
        if np.all(np.diff(breaks) >= min_gap):
            break
    heights = rng.uniform(1.0 - spread, 1.0 + spread, k)
    heights = heights / np.sum(heights * np.diff(breaks))
    return StepDensity(breaks, heights)


# ---------------------------------------------------------------------------
# quadrature oracles

def quadrature_midpoints(panels=PANELS) -> np.ndarray:
    return (np.arange(panels) + 0.5) * (TWO_PI / panels)


_TRIG_TABLES: dict = {}


def _trig_tables(p_max: int, panels: int):
    """cos(p*mid) and sin(p*mid) rows for p = 1..p_max, built once."""
    key = (p_max, panels)
    if key not in _TRIG_TABLES:
        mids = quadrature_midpoints(panels)
        cos_rows = [np.cos(mids)]
        sin_rows = [np.sin(mids)]
        for _ in range(p_max - 1):
            cp = cos_rows[-1] * cos_rows[0] - sin_rows[-1] * sin_rows[0]
            sp = sin_rows[-1] * cos_rows[0] + cos_rows[-1] * sin_rows[0]
            cos_rows.append(cp)
            sin_rows.append(sp)
        _TRIG_TABLES.clear()  # keep at most one table set in memory
        _TRIG_TABLES[key] = (cos_rows, sin_rows)
    return _TRIG_TABLES[key]


def moment_quadrature(d: StepDensity, p_max: int, panels=PANELS) -> np.ndarray:
    """Midpoint-rule trigonometric moments, orders 1..p_max; shape (p_max, 2)."""
    cos_rows, sin_rows = _trig_tables(p_max, panels)
    f = d.evaluate(quadrature_midpoints(panels))
    dt = TWO_PI / panels
    out = np.empty((p_max, 2))
    for p in range(1, p_max + 1):
        out[p - 1] = (np.dot(f, cos_rows[p - 1]) * dt, np.dot(f, sin_rows[p - 1]) * dt)
    return out


def grid_l1(f: StepDensity, g: StepDensity, panels=PANELS) -> float:
    mids = quadrature_midpoints(panels)
    return float(np.sum(np.abs(f.evaluate(mids) - g.evaluate(mids))) * (TWO_PI / panels))


def grid_hellinger_sq(f: StepDensity, g: StepDensity, panels=PANELS) -> float:
    mids = quadrature_midpoints(panels)
    diff = np.sqrt(f.evaluate(mids)) - np.sqrt(g.evaluate(mids))
    return float(np.sum(diff * diff) * (TWO_PI / panels))


def grid_sup(f: StepDensity, g: StepDensity, panels=PANELS) -> float:
    mids = quadrature_midpoints(panels)
    return float(np.max(np.abs(f.evaluate(mids) - g.evaluate(mids))))


# ---------------------------------------------------------------------------
# clustering reference

def brute_force_agglomerate(matrix, linkage: str):
    """O(m^3)-ish reference clustering over a plain nested-list matrix.

    Returns merge tuples (left, right, height, size) with the same node-id
    and tie-break conventions as the library: leaves 0..m-1, new cluster
    ids increase from m, ties go to the smallest (a, b) pair.
    """
    m = len(matrix)
    clusters = {i: [i] for i in range(m)}
    merges = []
    next_id = m
    while len(clusters) > 1:
        best = None
        ids = sorted(clusters)
        for ai, a in enumerate(ids):
            for b in ids[ai + 1:]:
                vals = [matrix[x][y] for x in clusters[a] for y in clusters[b]]
                if linkage == "complete":
                    dist = max(vals)
                elif linkage == "single":
                    dist = min(vals)
                elif linkage == "average":
                    dist = sum(vals) / len(vals)
                else:
                    raise ValueError(linkage)
                if best is None or (dist, a, b) < best:
                    best = (dist, a, b)
        dist, a, b = best
        merged = clusters.pop(a) + clusters.pop(b)
        merges.append((a, b, dist, len(merged)))
        clusters[next_id] = merged
        next_id += 1
    return merges


def merge_leaf_sets(m: int, merges) -> list[frozenset]:
    """Leaf set of every internal node, in merge order."""
    sets = [frozenset([i]) for i in range(m)]
    for left, right, _height, _size in merges:
        sets.append(sets[left] | sets[right])
    return sets[m:]


# ---------------------------------------------------------------------------
# Newick parsing (round-trip oracle)

def parse_newick(text: str):
    """Parse a Newick string into (tree, trailing_index).

    A tree is either ('leaf', label, branch_length) or
    ('node', [children], branch_length); the root's branch length is None.
    """
    pos = 0

    def parse_node():
        nonlocal pos
        if text[pos] == "(":
            pos += 1
            children = [parse_node()]
            while text[pos] == ",":
                pos += 1
                children.append(parse_node())
            if text[pos] != ")":
                raise ValueError(f"expected ')' at {pos}")
            pos += 1
            label, length = parse_suffix()
            return ("node", children, length)
        label, length = parse_suffix()
        return ("leaf", label, length)

    def parse_suffix():
        nonlocal pos
        label = ""
        if text[pos] == "'":
            pos += 1
            while True:
                end = text.index("'", pos)
                if text[end: end + 2] == "''":
                    label += text[pos:end] + "'"
                    pos = end + 2
                else:
                    label += text[pos:end]
                    pos = end + 1
                    break
        else:
            while text[pos] not in "(),:;":
                label += text[pos]
                pos += 1
        length = None
        if text[pos] == ":":
            pos += 1
            start = pos
            while text[pos] not in "(),;":
                pos += 1
            length = float(text[start:pos])
        return label, length

    tree = parse_node()
    if text[pos] != ";":
        raise ValueError("missing trailing semicolon")
    return tree


def newick_node_heights(tree) -> dict[frozenset, float]:
    """Heights of internal nodes of an ultrametric Newick tree.

    Computes each node's depth from the root, takes any leaf's depth as
    the total tree height, and maps every internal node's leaf-label set
    to (total - depth).
    """
    depths = {}
    leaf_depth = [None]

    def walk(node, depth):
        kind = node[0]
        if kind == "leaf":
            leaf_depth[0] = depth
            return frozenset([node[1]])
        leaves = frozenset()
        for child in node[1]:
            length = child[2] if child[2] is not None else 0.0
            leaves |= walk(child, depth + length)
        depths[leaves] = depth
        return leaves

    root_leaves = walk(tree, 0.0)
    total = leaf_depth[0]
    return {leaves: total - depth for leaves, depth in depths.items()}, root_leaves


# ---------------------------------------------------------------------------
# partition agreement

def adjusted_rand_index(a, b) -> float:
    if len(a) != len(b):
        raise ValueError("partitions must cover the same items")
    pairs = lambda x: x * (x - 1) // 2
    joint = Counter(zip(a, b))
    sum_joint = sum(pairs(c) for c in joint.values())
    sum_a = sum(pairs(c) for c in Counter(a).values())
    sum_b = sum(pairs(c) for c in Counter(b).values())
    total = pairs(len(a))
    expected = sum_a * sum_b / total
    max_index = (sum_a + sum_b) / 2
    if max_index == expected:
        return 1.0
    return (sum_joint - expected) / (max_index - expected)
