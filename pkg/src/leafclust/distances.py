"""Dissimilarities between circular step densities.

All integral distances are evaluated exactly: two step densities are
refined onto the union of their breakpoints, where both are constant on
every interval, so the integrals reduce to finite sums.  A grid-based
approximation exists only as a cross-check in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .density import TWO_PI, StepDensity, trig_moments


class DistanceTag(str, Enum):
    L1 = "l1"
    SUP = "sup"
    HELLINGER_SQ = "hellinger"
    MOMENT_EUCLIDEAN = "moments"


@dataclass(frozen=True)
class DistanceKind:
    """A distance selector: the tag plus the moment order used by D4."""

    tag: DistanceTag
    moment_order: int = 5

    def __post_init__(self):
        object.__setattr__(self, "tag", DistanceTag(self.tag))
        if self.tag is DistanceTag.MOMENT_EUCLIDEAN and self.moment_order < 1:
            raise ValueError("moment order must be >= 1")

    @property
    def name(self) -> str:
        return self.tag.value


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric pairwise dissimilarity matrix with row labels."""

    labels: tuple[str, ...]
    entries: np.ndarray
    kind: DistanceKind

    def __post_init__(self):
        labels = tuple(self.labels)
        entries = np.asarray(self.entries, dtype=float)
        m = len(labels)
        if m < 2:
            raise ValueError("a distance matrix needs at least 2 items")
        if len(set(labels)) != m:
            raise ValueError("duplicate labels in distance matrix")
        if entries.shape != (m, m):
            raise ValueError(f"entries must be {m}x{m}")
        if np.any(entries < 0) or not np.all(np.isfinite(entries)):
            raise ValueError("entries must be finite and nonnegative")
        if np.any(entries != entries.T):
            raise ValueError("entries must be exactly symmetric")
        if np.any(np.diag(entries) != 0.0):
            raise ValueError("diagonal must be exactly zero")
        if entries.flags.writeable:
            entries = entries.copy()
        entries.flags.writeable = False
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "entries", entries)

    @property
    def size(self) -> int:
        return len(self.labels)


def merge_breakpoints(f: StepDensity, g: StepDensity):
    """Common refinement of two step densities.

    Returns ``(breaks, fh, gh)`` where ``breaks`` is the sorted union of
    both breakpoint sets and ``fh[k]``/``gh[k]`` are the (constant) values
    of f and g on (``breaks[k]``, ``breaks[k+1]``].
    """
    breaks = np.union1d(f.breakpoints, g.breakpoints)
    right = breaks[1:]
    fh = f.heights[np.searchsorted(f.breakpoints, right, side="left") - 1]
    gh = g.heights[np.searchsorted(g.breakpoints, right, side="left") - 1]
    return breaks, fh, gh


def dist_l1(f: StepDensity, g: StepDensity) -> float:
    """D1: integral of |f - g| over the circle.  Lies in [0, 2]."""
    breaks, fh, gh = merge_breakpoints(f, g)
    return float(np.sum(np.abs(fh - gh) * np.diff(breaks)))


def dist_sup(f: StepDensity, g: StepDensity) -> float:
    """D2: sup of |f - g|; step functions attain it on interval interiors."""
    _, fh, gh = merge_breakpoints(f, g)
    return float(np.max(np.abs(fh - gh)))


def dist_hellinger_sq(f: StepDensity, g: StepDensity) -> float:
    """D3: integral of (sqrt(f) - sqrt(g))^2, i.e. 2 - 2*int(sqrt(fg)).

    This is the squared Hellinger-style integral without a 1/2 factor, so
    it ranges over [0, 2] and is not guaranteed to satisfy the triangle
    inequality.
    """
    breaks, fh, gh = merge_breakpoints(f, g)
    return float(np.sum((np.sqrt(fh) - np.sqrt(gh)) ** 2 * np.diff(breaks)))


def dist_moment_euclidean(f: StepDensity, g: StepDensity, r: int = 5) -> float:
    """D4: Euclidean distance between the first 2r trigonometric moments."""
    if r < 1:
        raise ValueError("moment order r must be >= 1")
    mf = trig_moments(f, r).as_vector()
    mg = trig_moments(g, r).as_vector()
    return float(np.linalg.norm(mf - mg))


def pair_distance(f: StepDensity, g: StepDensity, kind: DistanceKind) -> float:
    """Distance between two densities under the selected kind."""
    if kind.tag is DistanceTag.L1:
        return dist_l1(f, g)
    if kind.tag is DistanceTag.SUP:
        return dist_sup(f, g)
    if kind.tag is DistanceTag.HELLINGER_SQ:
        return dist_hellinger_sq(f, g)
    return dist_moment_euclidean(f, g, kind.moment_order)


def distance_matrix(densities, labels, kind: DistanceKind) -> DistanceMatrix:
    """All-pairs distance matrix over a list of densities.

    Each unordered pair is computed once and mirrored, which makes the
    matrix exactly symmetric.  Labels must be unique and match the number
    of densities.
    """
    densities = list(densities)
    labels = tuple(labels)
    m = len(densities)
    if len(labels) != m:
        raise ValueError("labels must match the number of densities")
    if len(set(labels)) != m:
        raise ValueError("duplicate labels")
    if m < 2:
        raise ValueError("need at least 2 densities")
    entries = np.zeros((m, m))
    for i in range(m):
        for k in range(i + 1, m):
            dist = pair_distance(densities[i], densities[k], kind)
            entries[i, k] = dist
            entries[k, i] = dist
    return DistanceMatrix(labels, entries, kind)
