from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

import networkx as nx
import numpy as np

Edge = tuple[int, int]
VertexAttributeMap = dict[int, float]
EdgeGradientMap = dict[Edge, float]


class DomainError(ValueError):
    """An input lies outside the domain an operation is defined on."""


def edge_key(u: int, v: int) -> Edge:
    """Canonical (min, max) key for an undirected edge."""
    if u == v:
        raise DomainError(f"self-loop on vertex {u} is not an edge")
    return (u, v) if u < v else (v, u)


########################################################
########    Point clouds                       #########
########################################################


@dataclass(frozen=True, eq=False)
class PointCloud:
    """k points in R^n, each carrying one real attribute value."""

    points: np.ndarray
    attribute: np.ndarray
    feature_names: tuple[str, ...] | None = None

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        attribute = np.asarray(self.attribute, dtype=float)
        if points.ndim != 2:
            raise DomainError(f"points must be a 2-D array, got shape {points.shape}")
        if points.shape[0] < 1 or points.shape[1] < 1:
            raise DomainError("point cloud needs at least one point and one coordinate")
        if attribute.shape != (points.shape[0],):
            raise DomainError(
                f"attribute has shape {attribute.shape}, expected ({points.shape[0]},)"
            )
        if not np.all(np.isfinite(points)):
            raise DomainError("point coordinates must be finite")
        if not np.all(np.isfinite(attribute)):
            raise DomainError("attribute values must be finite")
        if self.feature_names is not None and len(self.feature_names) != points.shape[1]:
            raise DomainError(
                f"{len(self.feature_names)} feature names for {points.shape[1]} coordinates"
            )
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "attribute", attribute)
        if self.feature_names is not None:
            object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def n_points(self) -> int:
        return int(self.points.shape[0])

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])


########################################################
########    Annotated graphs                   #########
########################################################


@dataclass(frozen=True)
class Vertex:
    id: int
    members: frozenset[int]
    # Cover interval the vertex came from; None for graphs not built by Mapper.
    level: int | None = None

    def to_dict(self):
        data: dict[str, Any] = {"id": self.id, "members": sorted(self.members)}
        if self.level is not None:
            data["level"] = self.level
        return data

    @classmethod
    def from_dict(cls, data: dict) -> Vertex:
        return cls(
            id=int(data["id"]),
            members=frozenset(int(m) for m in data["members"]),
            level=data.get("level"),
        )


@dataclass(frozen=True)
class AnnotatedGraph:
    """Undirected simple graph whose vertices are subsets of a point cloud.

    Vertex ids are contiguous 0..n-1 and match the vertex's position in
    `vertices`. Edges are stored as (min, max) pairs.
    """

    vertices: tuple[Vertex, ...]
    edges: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self):
        vertices = tuple(self.vertices)
        for position, vertex in enumerate(vertices):
            if vertex.id != position:
                raise DomainError(f"vertex ids must be contiguous: found {vertex.id} at {position}")
        n = len(vertices)
        edges = set()
        for u, v in self.edges:
            key = edge_key(int(u), int(v))
            if key[1] >= n or key[0] < 0:
                raise DomainError(f"edge {key} references a vertex outside 0..{n - 1}")
            edges.add(key)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", frozenset(edges))

    @classmethod
    def from_members(
        cls,
        members: Sequence[Iterable[int]],
        edges: Iterable[Edge] = (),
        levels: Sequence[int | None] | None = None,
    ) -> AnnotatedGraph:
        vertices = tuple(
            Vertex(
                id=i,
                members=frozenset(int(m) for m in group),
                level=None if levels is None else levels[i],
            )
            for i, group in enumerate(members)
        )
        return cls(vertices=vertices, edges=frozenset(edges))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    @cached_property
    def adjacency(self) -> dict[int, frozenset[int]]:
        neighbours: dict[int, set[int]] = {v.id: set() for v in self.vertices}
        for u, v in self.edges:
            neighbours[u].add(v)
            neighbours[v].add(u)
        return {v: frozenset(nbrs) for v, nbrs in neighbours.items()}

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n_vertices))
        g.add_edges_from(self.edges)
        return g

    def to_dict(self):
        return {
            "vertices": [v.to_dict() for v in self.vertices],
            "edges": [list(e) for e in self.sorted_edges()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> AnnotatedGraph:
        return cls(
            vertices=tuple(Vertex.from_dict(v) for v in data["vertices"]),
            edges=frozenset((int(u), int(v)) for u, v in data.get("edges", [])),
        )


########################################################
########    Partitions and merge trees         #########
########################################################


@dataclass(frozen=True)
class ComponentPartition:
    """Disjoint vertex sets, ordered by their smallest element."""

    components: tuple[frozenset[int], ...]

    def __post_init__(self):
        parts = [frozenset(c) for c in self.components]
        if any(not c for c in parts):
            raise DomainError("partition components must be non-empty")
        seen: set[int] = set()
        for part in parts:
            if seen & part:
                raise DomainError("partition components must be disjoint")
            seen |= part
        object.__setattr__(self, "components", tuple(sorted(parts, key=min)))

    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self) -> Iterator[frozenset[int]]:
        return iter(self.components)

    def __getitem__(self, index: int) -> frozenset[int]:
        return self.components[index]

    def as_sets(self) -> set[frozenset[int]]:
        return set(self.components)

    def labels(self) -> dict[int, int]:
        """Map each element to the index of the component holding it."""
        return {v: i for i, part in enumerate(self.components) for v in part}


@dataclass(frozen=True)
class MergeTree:
    """Binary merge tree over leaves 0..leaf_count-1.

    The i-th merge creates cluster id leaf_count + i. A forest has fewer than
    leaf_count - 1 merges.
    """

    leaf_count: int
    merges: tuple[tuple[int, int, float], ...] = ()

    def __post_init__(self):
        if self.leaf_count < 1:
            raise DomainError("merge tree needs at least one leaf")
        merges = tuple((int(a), int(b), float(h)) for a, b, h in self.merges)
        if len(merges) > self.leaf_count - 1:
            raise DomainError(f"{len(merges)} merges for {self.leaf_count} leaves")
        alive = set(range(self.leaf_count))
        last = 0.0
        for step, (left, right, height) in enumerate(merges):
            if left == right or left not in alive or right not in alive:
                raise DomainError(f"merge {step} joins unavailable clusters ({left}, {right})")
            if height < last or height < 0:
                raise DomainError(f"merge heights must be non-negative and non-decreasing at {step}")
            alive -= {left, right}
            alive.add(self.leaf_count + step)
            last = height
        object.__setattr__(self, "merges", merges)

    @property
    def heights(self) -> list[float]:
        return [h for _, _, h in self.merges]

    def to_dict(self):
        return {
            "leaf_count": self.leaf_count,
            "merges": [[left, right, height] for left, right, height in self.merges],
        }

    @classmethod
    def from_dict(cls, data: dict) -> MergeTree:
        return cls(
            leaf_count=int(data["leaf_count"]),
            merges=tuple((int(a), int(b), float(h)) for a, b, h in data.get("merges", [])),
        )
