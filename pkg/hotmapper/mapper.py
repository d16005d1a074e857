"""Mapper graph construction.

The lens range is covered by overlapping closed intervals. Points whose lens
value falls in an interval (its pullback) are clustered; each cluster becomes
a vertex, and vertices from different intervals that share a point are joined
by an edge.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from hotmapper.core.clustering import (
    LINKAGES,
    METRICS,
    LinkageKind,
    Metric,
    agglomerate,
    cut,
    pairwise_distances,
)
from hotmapper.core.types import AnnotatedGraph, DomainError, PointCloud

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoverInterval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError(f"cover interval needs lo < hi, got [{self.lo}, {self.hi}]")

    def contains(self, values: np.ndarray) -> np.ndarray:
        return (values >= self.lo) & (values <= self.hi)


@dataclass
class MapperConfig:
    n_intervals: int = 7
    overlap_pct: float = 20.0  # percent of interval length shared with the next one
    linkage: LinkageKind = "ward"
    clusters_per_interval: int = 6
    metric: Metric = "euclidean"

    def __post_init__(self):
        if self.n_intervals < 1:
            raise DomainError(f"n_intervals must be at least 1, got {self.n_intervals}")
        if not 0.0 <= self.overlap_pct < 100.0:
            raise DomainError(f"overlap_pct must be in [0, 100), got {self.overlap_pct}")
        if self.clusters_per_interval < 1:
            raise DomainError("clusters_per_interval must be at least 1")
        if self.linkage not in LINKAGES:
            raise DomainError(f"unknown linkage {self.linkage!r}; expected one of {LINKAGES}")
        if self.metric not in METRICS:
            raise DomainError(f"unknown metric {self.metric!r}; expected one of {METRICS}")

    def to_dict(self):
        return {
            "n_intervals": self.n_intervals,
            "overlap_pct": self.overlap_pct,
            "linkage": self.linkage,
            "clusters_per_interval": self.clusters_per_interval,
            "metric": self.metric,
        }

    @classmethod
    def from_dict(cls, data: dict) -> MapperConfig:
        return cls(**{k: data[k] for k in cls().to_dict() if k in data})


def build_cover(lo: float, hi: float, n: int, overlap_pct: float) -> list[CoverInterval]:
    """n equal-length intervals covering [lo, hi], each overlapping the next
    by overlap_pct percent of its length."""
    if not lo < hi:
        raise DomainError(f"cover range needs lo < hi, got [{lo}, {hi}]")
    if n < 1:
        raise DomainError(f"number of intervals must be at least 1, got {n}")
    if not 0.0 <= overlap_pct < 100.0:
        raise DomainError(f"overlap_pct must be in [0, 100), got {overlap_pct}")

    k = overlap_pct / 100.0
    length = (hi - lo) / (n - (n - 1) * k)
    step = (1.0 - k) * length
    starts = [lo + i * step for i in range(n)]
    ends = [s + length for s in starts]
    starts[0] = lo
    ends[-1] = hi
    # Rounding must never open a gap between neighbours.
    for i in range(n - 1):
        ends[i] = max(ends[i], starts[i + 1])
    return [CoverInterval(s, e) for s, e in zip(starts, ends, strict=True)]


def _cluster_pullback(points: np.ndarray, config: MapperConfig) -> list[np.ndarray]:
    m = points.shape[0]
    target = min(config.clusters_per_interval, m)
    if target == 1:
        return [np.arange(m)]
    tree = agglomerate(pairwise_distances(points, config.metric), config.linkage)
    partition = cut(tree, count=target)
    return [np.array(sorted(part)) for part in partition]


def build_mapper(
    cloud: PointCloud,
    lens_values: np.ndarray,
    config: MapperConfig,
    on_interval: Callable[[int, int, int], None] | None = None,
) -> AnnotatedGraph:
    """Build the Mapper graph of `cloud` under the given lens values.

    `on_interval(index, pullback_size, n_clusters)` is called once per
    non-empty interval.
    """
    values = np.asarray(lens_values, dtype=float)
    if values.shape != (cloud.n_points,):
        raise DomainError(f"lens values have shape {values.shape} for {cloud.n_points} points")
    if not np.all(np.isfinite(values)):
        raise DomainError("lens values must be finite")

    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        if config.n_intervals > 1:
            raise DomainError(f"lens is constant ({lo}); cannot cover it with several intervals")
        pullbacks = [np.arange(cloud.n_points)]
    else:
        cover = build_cover(lo, hi, config.n_intervals, config.overlap_pct)
        pullbacks = [np.flatnonzero(interval.contains(values)) for interval in cover]

    members: list[frozenset[int]] = []
    levels: list[int] = []
    for index, pullback in enumerate(pullbacks):
        if pullback.size == 0:
            continue
        clusters = _cluster_pullback(cloud.points[pullback], config)
        for local in clusters:
            members.append(frozenset(int(p) for p in pullback[local]))
            levels.append(index)
        if on_interval is not None:
            on_interval(index, int(pullback.size), len(clusters))

    # Nerve: vertices from different intervals sharing a point.
    by_point: dict[int, list[int]] = defaultdict(list)
    for vertex_id, group in enumerate(members):
        for point in group:
            by_point[point].append(vertex_id)
    edges: set[tuple[int, int]] = set()
    for holders in by_point.values():
        for a_pos, a in enumerate(holders):
            for b in holders[a_pos + 1 :]:
                if levels[a] != levels[b]:
                    edges.add((a, b) if a < b else (b, a))

    graph = AnnotatedGraph.from_members(members, edges, levels)
    log.info(
        "mapper graph: %d vertices, %d edges from %d intervals",
        graph.n_vertices,
        graph.n_edges,
        len(pullbacks),
    )
    return graph
