"""Hotspot detection on annotated graphs.

Edges are weighted by the attribute gradient between their endpoints. The
single-linkage dendrogram over those weights is cut at a threshold tau; the
resulting candidate components are then screened by size, by size contrast
with their neighbours and by attribute heterogeneity.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.stats import median_abs_deviation

from hotmapper.core.clustering import cut
from hotmapper.core.graph import DisjointSet
from hotmapper.core.types import (
    AnnotatedGraph,
    ComponentPartition,
    DomainError,
    EdgeGradientMap,
    MergeTree,
    VertexAttributeMap,
)

log = logging.getLogger(__name__)

SizeMode = Literal["nodes", "points", "both"]
SizeMeasure = Literal["nodes", "points"]
SizeContrast = Literal["absolute", "signed"]
Verdict = Literal["hotspot", "too_small", "insufficient_size_contrast", "insufficient_heterogeneity"]

SIZE_MODES: tuple[str, ...] = ("nodes", "points", "both")
SIZE_CONTRASTS: tuple[str, ...] = ("absolute", "signed")
VERDICTS: tuple[str, ...] = (
    "hotspot",
    "too_small",
    "insufficient_size_contrast",
    "insufficient_heterogeneity",
)


class EmptyNeighbourhoodError(DomainError):
    """A candidate has no adjacent candidates, so its neighbourhood size is undefined."""


########################################################
########    Configuration and results          #########
########################################################


@dataclass
class HotspotConfig:
    epsilon: float = 0.1  # minimum |A(C) - A(N_C)| for a hotspot
    tau: float | None = None  # None -> suggest_tau on the dendrogram
    sigma1_nodes: int | None = 2
    sigma1_points: int | None = None
    sigma2: float | None = None  # None -> MAD of candidate sizes, per measure
    size_mode: SizeMode = "nodes"
    # absolute: |S(N_C) - S(C)| >= sigma2; signed: S(N_C) - S(C) > sigma2
    size_contrast: SizeContrast = "absolute"

    def __post_init__(self):
        if self.epsilon < 0:
            raise DomainError(f"epsilon must be non-negative, got {self.epsilon}")
        if self.tau is not None and not self.tau > 0:
            raise DomainError(f"tau must be positive, got {self.tau}")
        for name in ("sigma1_nodes", "sigma1_points"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise DomainError(f"{name} must be non-negative, got {value}")
        if self.sigma2 is not None and self.sigma2 < 0:
            raise DomainError(f"sigma2 must be non-negative, got {self.sigma2}")
        if self.size_mode not in SIZE_MODES:
            raise DomainError(f"unknown size_mode {self.size_mode!r}; expected one of {SIZE_MODES}")
        if self.size_contrast not in SIZE_CONTRASTS:
            raise DomainError(
                f"unknown size_contrast {self.size_contrast!r}; expected one of {SIZE_CONTRASTS}"
            )
        # Every measure the size test runs on needs its own minimum.
        for measure in self.measures:
            if self.sigma1_for(measure) is None:
                raise DomainError(f"size_mode {self.size_mode!r} requires sigma1_{measure}")

    @property
    def measures(self) -> tuple[SizeMeasure, ...]:
        if self.size_mode == "both":
            return ("nodes", "points")
        return (self.size_mode,)

    def sigma1_for(self, measure: SizeMeasure) -> int | None:
        return self.sigma1_nodes if measure == "nodes" else self.sigma1_points

    def to_dict(self):
        return {
            "epsilon": self.epsilon,
            "tau": self.tau,
            "sigma1_nodes": self.sigma1_nodes,
            "sigma1_points": self.sigma1_points,
            "sigma2": self.sigma2,
            "size_mode": self.size_mode,
            "size_contrast": self.size_contrast,
        }

    @classmethod
    def from_dict(cls, data: dict) -> HotspotConfig:
        defaults = cls().to_dict()
        return cls(**{k: data.get(k, v) for k, v in defaults.items()})


@dataclass(frozen=True)
class CandidateComponent:
    vertex_ids: frozenset[int]
    a_hat: float
    size_nodes: int
    size_points: int
    # max - min of the member vertices' attribute values
    a_hat_spread: float = 0.0

    def size(self, measure: SizeMeasure) -> int:
        return self.size_nodes if measure == "nodes" else self.size_points

    def to_dict(self):
        return {
            "vertices": sorted(self.vertex_ids),
            "a_hat": self.a_hat,
            "size_nodes": self.size_nodes,
            "size_points": self.size_points,
            "a_hat_spread": self.a_hat_spread,
        }

    @classmethod
    def from_dict(cls, data: dict) -> CandidateComponent:
        return cls(
            vertex_ids=frozenset(data["vertices"]),
            a_hat=data["a_hat"],
            size_nodes=data["size_nodes"],
            size_points=data["size_points"],
            a_hat_spread=data.get("a_hat_spread", 0.0),
        )


@dataclass
class CandidateAssessment:
    candidate: CandidateComponent
    neighbour_ids: list[int]  # indices of adjacent candidates in the report
    s_neighbourhood: float | None  # mean neighbour size on the first active measure
    a_hat_neighbourhood: float | None
    heterogeneity: float | None
    verdict: Verdict
    # S(N_C) - S(C) on the first active measure, whichever contrast form is used
    signed_size_contrast: float | None = None

    def to_dict(self):
        """Flat record: the candidate's fields followed by its assessment."""
        return {
            **self.candidate.to_dict(),
            "neighbour_ids": list(self.neighbour_ids),
            "s_neighbourhood": self.s_neighbourhood,
            "signed_size_contrast": self.signed_size_contrast,
            "a_hat_neighbourhood": self.a_hat_neighbourhood,
            "heterogeneity": self.heterogeneity,
            "verdict": self.verdict,
        }

    @classmethod
    def from_dict(cls, data: dict) -> CandidateAssessment:
        return cls(
            candidate=CandidateComponent.from_dict(data),
            neighbour_ids=list(data.get("neighbour_ids", [])),
            s_neighbourhood=data.get("s_neighbourhood"),
            a_hat_neighbourhood=data.get("a_hat_neighbourhood"),
            heterogeneity=data.get("heterogeneity"),
            verdict=data["verdict"],
            signed_size_contrast=data.get("signed_size_contrast"),
        )


@dataclass
class HotspotReport:
    tau: float
    assessments: list[CandidateAssessment]
    sigma2: dict[str, float] = field(default_factory=dict)

    @property
    def candidates(self) -> list[CandidateComponent]:
        return [a.candidate for a in self.assessments]

    @property
    def hotspots(self) -> list[CandidateAssessment]:
        """Hotspot assessments, most heterogeneous first."""
        found = [a for a in self.assessments if a.verdict == "hotspot"]
        return sorted(found, key=lambda a: -(a.heterogeneity or 0.0))

    @property
    def verdict_counts(self) -> dict[str, int]:
        counts = Counter(a.verdict for a in self.assessments)
        return {verdict: counts.get(verdict, 0) for verdict in VERDICTS}

    def homogeneity_violations(self, threshold: float | None = None) -> list[CandidateComponent]:
        """Candidates whose attribute spread exceeds `threshold` (default tau).

        A candidate is joined by edges below tau, yet a chain of such edges can
        still span a wider attribute range.
        """
        limit = self.tau if threshold is None else threshold
        return [c for c in self.candidates if c.a_hat_spread > limit]

    def to_dict(self):
        return {
            "tau": self.tau if math.isfinite(self.tau) else None,
            "sigma2": dict(self.sigma2),
            "candidates": [a.to_dict() for a in self.assessments],
            "verdict_counts": self.verdict_counts,
            "homogeneity_violations": len(self.homogeneity_violations()),
        }

    @classmethod
    def from_dict(cls, data: dict) -> HotspotReport:
        return cls(
            tau=float("nan") if data["tau"] is None else data["tau"],
            assessments=[CandidateAssessment.from_dict(a) for a in data.get("candidates", [])],
            sigma2=dict(data.get("sigma2", {})),
        )


########################################################
########    Gradient and dendrogram            #########
########################################################


def edge_gradient(graph: AnnotatedGraph, a_hat: VertexAttributeMap) -> EdgeGradientMap:
    missing = [v.id for v in graph.vertices if v.id not in a_hat]
    if missing:
        raise DomainError(f"vertex {missing[0]} has no attribute value")
    return {(u, v): abs(a_hat[u] - a_hat[v]) for u, v in graph.edges}


def graph_dendrogram(graph: AnnotatedGraph, gradient: EdgeGradientMap) -> MergeTree:
    """Single-linkage merge tree over the graph's edges (Kruskal order).

    Ties are taken in (weight, u, v) order. A disconnected graph yields a
    forest with n - components merges.
    """
    for key in graph.edges:
        if key not in gradient:
            raise DomainError(f"edge {key} has no gradient value")
    n = graph.n_vertices
    ordered = sorted(graph.edges, key=lambda e: (gradient[e], e[0], e[1]))
    forest = DisjointSet(n)
    cluster_of_root = list(range(n))
    merges: list[tuple[int, int, float]] = []
    for u, v in ordered:
        ru, rv = forest.find(u), forest.find(v)
        if ru == rv:
            continue
        left, right = sorted((cluster_of_root[ru], cluster_of_root[rv]))
        root = forest.union(ru, rv)
        cluster_of_root[root] = n + len(merges)
        merges.append((left, right, float(gradient[(u, v)])))
    return MergeTree(leaf_count=max(n, 1), merges=tuple(merges))


def suggest_tau(tree: MergeTree) -> float:
    """Midpoint of the widest gap between consecutive merge levels.

    The levels are zero, every distinct merge height and a virtual top at 1.5
    times the largest height. Among equally wide gaps the lowest wins. When
    the gap up to the virtual top is strictly the widest, no gap stands out
    and tau falls in the gap just below the highest merge, undoing only it.
    """
    heights = sorted(set(tree.heights))
    if not heights or heights[-1] <= 0:
        raise DomainError("dendrogram has no positive merge height; supply tau explicitly")
    levels = np.array(sorted({0.0, *heights, 1.5 * heights[-1]}))
    gaps = np.diff(levels)
    widest = int(np.argmax(gaps))
    if widest == len(gaps) - 1:
        widest -= 1
    return float((levels[widest] + levels[widest + 1]) / 2.0)


########################################################
########    Candidates and classification      #########
########################################################


def _make_candidate(
    vertex_ids: Iterable[int], graph: AnnotatedGraph, a_hat: VertexAttributeMap
) -> CandidateComponent:
    ids = frozenset(vertex_ids)
    values = [a_hat[v] for v in ids]
    points: set[int] = set()
    for v in ids:
        points |= graph.vertices[v].members
    return CandidateComponent(
        vertex_ids=ids,
        a_hat=float(np.mean(values)),
        size_nodes=len(ids),
        size_points=len(points),
        a_hat_spread=float(max(values) - min(values)),
    )


def candidates_at(
    tree: MergeTree, graph: AnnotatedGraph, tau: float, a_hat: VertexAttributeMap
) -> list[CandidateComponent]:
    if tree.leaf_count != max(graph.n_vertices, 1):
        raise DomainError(
            f"dendrogram has {tree.leaf_count} leaves but the graph has {graph.n_vertices} vertices"
        )
    if graph.n_vertices == 0:
        return []
    partition = cut(tree, height=tau)
    return [_make_candidate(part, graph, a_hat) for part in partition]


def _neighbour_indices(
    index: int, candidates: list[CandidateComponent], labels: dict[int, int], graph: AnnotatedGraph
) -> list[int]:
    adjacency = graph.adjacency
    found: set[int] = set()
    for v in candidates[index].vertex_ids:
        for w in adjacency[v]:
            other = labels[w]
            if other != index:
                found.add(other)
    return sorted(found)


def neighbourhood_of(
    partition: ComponentPartition | list[CandidateComponent],
    graph: AnnotatedGraph,
    candidate: CandidateComponent | frozenset[int],
) -> list[frozenset[int]]:
    """Vertex sets of the parts of `partition` adjacent to `candidate`."""
    parts = [p.vertex_ids if isinstance(p, CandidateComponent) else frozenset(p) for p in partition]
    target = candidate.vertex_ids if isinstance(candidate, CandidateComponent) else candidate
    labels = {v: i for i, part in enumerate(parts) for v in part}
    adjacency = graph.adjacency
    found: set[int] = set()
    for v in target:
        for w in adjacency[v]:
            if w not in target:
                found.add(labels[w])
    return [parts[i] for i in sorted(found)]


def neighbourhood_size(neighbours: list[CandidateComponent], measure: SizeMeasure) -> float:
    if not neighbours:
        raise EmptyNeighbourhoodError("neighbourhood is empty")
    if measure not in ("nodes", "points"):
        raise DomainError(f"unknown size measure {measure!r}")
    return float(np.mean([c.size(measure) for c in neighbours]))


def size_threshold(candidates: list[CandidateComponent], measure: SizeMeasure) -> float:
    """Median absolute deviation of candidate sizes."""
    if not candidates:
        return 0.0
    return float(median_abs_deviation([c.size(measure) for c in candidates]))


def _fails_contrast(diff: float, sigma2: float, mode: SizeContrast) -> bool:
    if mode == "signed":
        return not diff > sigma2
    return abs(diff) < sigma2


def classify_candidates(
    candidates: list[CandidateComponent],
    graph: AnnotatedGraph,
    config: HotspotConfig,
    tau: float | None = None,
) -> HotspotReport:
    """Assign a verdict to every candidate.

    Checks run in order: minimum size on every active measure, then a non-empty
    neighbourhood, then size contrast with the neighbourhood, then attribute
    heterogeneity. The first failing check names the verdict.

    `tau` is only recorded in the report. Without it, or config.tau, the report
    carries NaN, which serializes as null.
    """
    labels = {v: i for i, c in enumerate(candidates) for v in c.vertex_ids}
    missing = [v.id for v in graph.vertices if v.id not in labels]
    if missing:
        raise DomainError(f"vertex {missing[0]} belongs to no candidate")

    sigma2 = {
        m: config.sigma2 if config.sigma2 is not None else size_threshold(candidates, m)
        for m in config.measures
    }

    assessments: list[CandidateAssessment] = []
    for index, candidate in enumerate(candidates):
        neighbour_ids = _neighbour_indices(index, candidates, labels, graph)
        neighbours = [candidates[i] for i in neighbour_ids]

        s_neighbourhood = a_hat_neighbourhood = heterogeneity = contrast = None
        if neighbours:
            s_neighbourhood = neighbourhood_size(neighbours, config.measures[0])
            contrast = s_neighbourhood - candidate.size(config.measures[0])
            total_nodes = sum(c.size_nodes for c in neighbours)
            a_hat_neighbourhood = sum(c.a_hat * c.size_nodes for c in neighbours) / total_nodes
            heterogeneity = abs(candidate.a_hat - a_hat_neighbourhood)

        too_small = any(
            (s1 := config.sigma1_for(m)) is not None and candidate.size(m) < s1
            for m in config.measures
        )
        if too_small:
            verdict: Verdict = "too_small"
        elif not neighbours:
            verdict = "insufficient_heterogeneity"
        elif any(
            _fails_contrast(
                neighbourhood_size(neighbours, m) - candidate.size(m),
                sigma2[m],
                config.size_contrast,
            )
            for m in config.measures
        ):
            verdict = "insufficient_size_contrast"
        elif heterogeneity > config.epsilon:
            verdict = "hotspot"
        else:
            verdict = "insufficient_heterogeneity"

        assessments.append(
            CandidateAssessment(
                candidate=candidate,
                neighbour_ids=neighbour_ids,
                s_neighbourhood=s_neighbourhood,
                a_hat_neighbourhood=a_hat_neighbourhood,
                heterogeneity=heterogeneity,
                verdict=verdict,
                signed_size_contrast=contrast,
            )
        )

    used_tau = tau if tau is not None else (config.tau if config.tau is not None else float("nan"))
    report = HotspotReport(tau=used_tau, assessments=assessments, sigma2=sigma2)
    log.debug("classified %d candidates: %s", len(candidates), report.verdict_counts)
    return report


def detect_hotspots(
    graph: AnnotatedGraph,
    a_hat: VertexAttributeMap,
    config: HotspotConfig,
    tree: MergeTree | None = None,
) -> HotspotReport:
    """Gradient, dendrogram, cut and classification in one call.

    Pass `tree` to reuse a dendrogram already built for this graph.
    """
    if tree is None:
        tree = graph_dendrogram(graph, edge_gradient(graph, a_hat))
    tau = config.tau
    if tau is None:
        # Without a positive merge every positive tau gives the same cut.
        tau = suggest_tau(tree) if any(h > 0 for h in tree.heights) else math.inf
    candidates = candidates_at(tree, graph, tau, a_hat)
    report = classify_candidates(candidates, graph, config, tau=tau)
    log.info(
        "tau=%.6g: %d candidates, %d hotspots",
        tau,
        len(candidates),
        report.verdict_counts["hotspot"],
    )
    return report
