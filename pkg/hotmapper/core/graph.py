"""Attribute averaging and component queries on annotated graphs."""

from __future__ import annotations

import networkx as nx
import numpy as np

from hotmapper.core.types import (
    AnnotatedGraph,
    ComponentPartition,
    DomainError,
    EdgeGradientMap,
    PointCloud,
    VertexAttributeMap,
    edge_key,
)


class DisjointSet:
    """Union-find over 0..n-1 with union by size and path halving."""

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.size = [1] * size

    def find(self, item: int) -> int:
        parent = self.parent
        while parent[item] != item:
            parent[item] = parent[parent[item]]
            item = parent[item]
        return item

    def union(self, a: int, b: int) -> int:
        """Join the sets holding a and b and return the surviving root."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return ra

    def connected(self, a: int, b: int) -> bool:
        return self.find(a) == self.find(b)


def induced_attribute(cloud: PointCloud, graph: AnnotatedGraph) -> VertexAttributeMap:
    """Mean point attribute over each vertex's members."""
    a_hat: VertexAttributeMap = {}
    for vertex in graph.vertices:
        if not vertex.members:
            raise DomainError(f"vertex {vertex.id} has an empty member set")
        members = np.fromiter(vertex.members, dtype=int, count=len(vertex.members))
        if members.min() < 0 or members.max() >= cloud.n_points:
            raise DomainError(
                f"vertex {vertex.id} references a point outside 0..{cloud.n_points - 1}"
            )
        a_hat[vertex.id] = float(cloud.attribute[members].mean())
    return a_hat


def connected_components(graph: AnnotatedGraph) -> ComponentPartition:
    return ComponentPartition(tuple(nx.connected_components(graph.to_networkx())))


def threshold_components(
    graph: AnnotatedGraph, weights: EdgeGradientMap, tau: float
) -> ComponentPartition:
    """Components of the spanning subgraph keeping edges with weight < tau."""
    if not tau > 0:
        raise DomainError(f"threshold must be positive, got {tau}")
    kept = nx.Graph()
    kept.add_nodes_from(range(graph.n_vertices))
    for u, v in graph.edges:
        key = edge_key(u, v)
        if key not in weights:
            raise DomainError(f"edge {key} has no weight")
        if weights[key] < tau:
            kept.add_edge(u, v)
    return ComponentPartition(tuple(nx.connected_components(kept)))
