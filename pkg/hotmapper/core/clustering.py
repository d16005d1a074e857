"""Agglomerative clustering with single and Ward linkage.

Merges follow the Lance-Williams recurrence on a dense distance matrix with a
cached nearest neighbour per row. Ties on the minimum distance resolve to the
pair whose (smaller id, larger id) is lexicographically smallest, using the
current cluster ids, so the output is a deterministic function of the input.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.spatial.distance import pdist, squareform

from hotmapper.core.types import ComponentPartition, DomainError, MergeTree, PointCloud

log = logging.getLogger(__name__)

LinkageKind = Literal["single", "ward"]
Metric = Literal["euclidean", "correlation"]

LINKAGES: tuple[str, ...] = ("single", "ward")
METRICS: tuple[str, ...] = ("euclidean", "correlation")

_SYMMETRY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise DomainError(f"distance matrix must be square, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise DomainError("distance matrix entries must be finite")
        if np.any(values < 0):
            raise DomainError("distance matrix entries must be non-negative")
        if np.any(np.diag(values) != 0):
            raise DomainError("distance matrix diagonal must be zero")
        if np.max(np.abs(values - values.T), initial=0.0) > _SYMMETRY_TOL:
            raise DomainError("distance matrix must be symmetric")
        object.__setattr__(self, "values", values)

    @property
    def size(self) -> int:
        return int(self.values.shape[0])


def pairwise_distances(points: PointCloud | np.ndarray, metric: Metric = "euclidean") -> DistanceMatrix:
    """Distances between all rows of `points`.

    The correlation metric is 1 - Pearson correlation and is undefined for a
    point whose coordinates are all equal.
    """
    x = points.points if isinstance(points, PointCloud) else np.asarray(points, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise DomainError("need at least two points to compute distances")
    if metric not in METRICS:
        raise DomainError(f"unknown metric {metric!r}; expected one of {METRICS}")
    if metric == "correlation":
        flat = np.flatnonzero(np.ptp(x, axis=1) == 0)
        if flat.size:
            raise DomainError(
                f"point {int(flat[0])} has zero variance; correlation distance is undefined"
            )
    values = squareform(pdist(x, metric=metric), checks=False)
    # 1 - r can round to a tiny negative when r is 1.
    np.clip(values, 0.0, None, out=values)
    np.fill_diagonal(values, 0.0)
    return DistanceMatrix(values)


# ---------------------------------------------------------------------------
# Agglomeration
# ---------------------------------------------------------------------------


def _closest_pair(
    work: np.ndarray, nearest_dist: np.ndarray, ids: np.ndarray
) -> tuple[int, int]:
    best = nearest_dist.min()
    choice: tuple[int, int, int, int] | None = None
    for row in np.flatnonzero(nearest_dist == best):
        for col in np.flatnonzero(work[row] == best):
            a, b = int(ids[row]), int(ids[col])
            key = (min(a, b), max(a, b), int(row), int(col))
            if choice is None or key[:2] < choice[:2]:
                choice = key
    assert choice is not None
    return choice[2], choice[3]


def agglomerate(dist: DistanceMatrix, linkage: LinkageKind = "single") -> MergeTree:
    if linkage not in LINKAGES:
        raise DomainError(f"unknown linkage {linkage!r}; expected one of {LINKAGES}")
    m = dist.size
    if m == 1:
        return MergeTree(leaf_count=1)

    ward = linkage == "ward"
    # Ward runs the recurrence on squared distances.
    work = dist.values**2 if ward else dist.values.copy()
    np.fill_diagonal(work, np.inf)

    active = np.ones(m, dtype=bool)
    sizes = np.ones(m, dtype=float)
    ids = np.arange(m)
    nearest = np.argmin(work, axis=1)
    nearest_dist = work[np.arange(m), nearest]

    merges: list[tuple[int, int, float]] = []
    last = 0.0
    for step in range(m - 1):
        i, j = _closest_pair(work, nearest_dist, ids)
        if i > j:
            i, j = j, i
        d_ij = work[i, j]
        height = max(math.sqrt(d_ij) if ward else float(d_ij), last)
        left, right = sorted((int(ids[i]), int(ids[j])))
        merges.append((left, right, height))
        last = height

        if ward:
            n_i, n_j = sizes[i], sizes[j]
            with np.errstate(invalid="ignore"):
                updated = ((n_i + sizes) * work[i] + (n_j + sizes) * work[j] - sizes * d_ij) / (
                    n_i + n_j + sizes
                )
            np.maximum(updated, 0.0, out=updated)
        else:
            updated = np.minimum(work[i], work[j])
        updated[~active] = np.inf
        updated[i] = np.inf
        updated[j] = np.inf

        # Merged cluster lives in slot i; slot j is retired.
        work[i, :] = updated
        work[:, i] = updated
        work[j, :] = np.inf
        work[:, j] = np.inf
        active[j] = False
        sizes[i] += sizes[j]
        ids[i] = m + step
        nearest_dist[j] = np.inf

        stale = active & ((nearest == i) | (nearest == j))
        stale[i] = True
        for row in np.flatnonzero(stale):
            nearest[row] = np.argmin(work[row])
            nearest_dist[row] = work[row, nearest[row]]
        closer = active & (updated < nearest_dist)
        nearest[closer] = i
        nearest_dist[closer] = updated[closer]

    log.debug("agglomerated %d points with %s linkage", m, linkage)
    return MergeTree(leaf_count=m, merges=tuple(merges))


def cut(tree: MergeTree, count: int | None = None, height: float | None = None) -> ComponentPartition:
    """Flat clusters of the tree's leaves.

    Exactly one of `count` or `height` is given. A count cut applies merges in
    order until `count` clusters remain (or merges run out). A height cut
    applies exactly the merges with height strictly below `height`.
    """
    if (count is None) == (height is None):
        raise DomainError("cut needs exactly one of count or height")
    if count is not None:
        if count < 1:
            raise DomainError(f"cluster count must be at least 1, got {count}")
        applied = min(max(tree.leaf_count - count, 0), len(tree.merges))
    else:
        if not height > 0:
            raise DomainError(f"cut height must be positive, got {height}")
        applied = sum(1 for _, _, h in tree.merges if h < height)

    clusters: dict[int, list[int]] = {leaf: [leaf] for leaf in range(tree.leaf_count)}
    for step, (left, right, _) in enumerate(tree.merges[:applied]):
        clusters[tree.leaf_count + step] = clusters.pop(left) + clusters.pop(right)
    return ComponentPartition(tuple(frozenset(c) for c in clusters.values()))
