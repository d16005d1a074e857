from hotmapper.core.types import (
    AnnotatedGraph,
    ComponentPartition,
    DomainError,
    MergeTree,
    PointCloud,
    Vertex,
)

__all__ = [
    "AnnotatedGraph",
    "ComponentPartition",
    "DomainError",
    "MergeTree",
    "PointCloud",
    "Vertex",
]
