"""Synthetic datasets with planted ground truth.

- two concentric noisy circles, attribute = minimum coordinate
- 2-D and 3-D lattice graphs with a corrected attribute region
- a Gaussian sample matrix with a small attribute-shifted subgroup
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from hotmapper.core.types import AnnotatedGraph, DomainError, PointCloud, Vertex
from hotmapper.lenses import LensSpec, eval_lens

log = logging.getLogger(__name__)

Extent = tuple[float, float, float]  # (lo, hi, step)


########################################################
########    Two circles                        #########
########################################################


def gen_two_circles(
    n_points: int = 3000, noise: float = 0.16, seed: int = 0, factor: float = 0.5
) -> PointCloud:
    """Outer circle of radius 1 and inner circle of radius `factor`.

    Angles are uniform and every radius is jittered by U[-noise, noise]. At the
    defaults, a seven-interval, 20% overlap cover of the norm lens puts each
    circle in three intervals and leaves the middle interval empty.
    """
    if n_points < 8:
        raise DomainError(f"two circles need at least 8 points, got {n_points}")
    if noise < 0:
        raise DomainError(f"noise must be non-negative, got {noise}")
    if not 0 < factor < 1:
        raise DomainError(f"inner radius factor must be in (0, 1), got {factor}")
    if factor + 2 * noise >= 1:
        raise DomainError(f"noise {noise} lets the circles of radius {factor} and 1 overlap")

    rng = np.random.default_rng(seed)
    n_outer = n_points // 2
    radii = np.concatenate([np.ones(n_outer), np.full(n_points - n_outer, factor)])
    angles = rng.uniform(0.0, 2.0 * math.pi, size=n_points)
    radii = radii + rng.uniform(-noise, noise, size=n_points)
    points = np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])
    attribute = eval_lens(LensSpec(kind="min_value"), points)
    return PointCloud(points=points, attribute=attribute, feature_names=("x", "y"))


########################################################
########    Lattice graphs                     #########
########################################################


@dataclass
class GridGraphSpec:
    dim: int = 2
    extent: tuple[Extent, ...] = ((0.0, 6 * math.pi, 0.25), (0.0, 6 * math.pi, 0.25))
    extra_edges: int = 0
    noise_scale: float = 0.1  # attribute noise is U[0, noise_scale]
    correction: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise DomainError(f"grid dimension must be 2 or 3, got {self.dim}")
        self.extent = tuple(tuple(float(x) for x in axis) for axis in self.extent)
        if len(self.extent) != self.dim:
            raise DomainError(f"{len(self.extent)} extent triples for a {self.dim}-D grid")
        for lo, hi, step in self.extent:
            if not step > 0:
                raise DomainError(f"grid step must be positive, got {step}")
            if hi < lo:
                raise DomainError(f"grid extent [{lo}, {hi}] is inverted")
        if self.noise_scale < 0:
            raise DomainError(f"noise_scale must be non-negative, got {self.noise_scale}")
        if self.extra_edges < 0:
            raise DomainError("extra_edges must be non-negative")

    @classmethod
    def default_2d(cls, **overrides) -> GridGraphSpec:
        """[0, 6pi]^2 at step 0.25; corrected where sin x + sin y >= 1."""
        axis = (0.0, 6 * math.pi, 0.25)
        return cls(dim=2, extent=(axis, axis), **overrides)

    @classmethod
    def default_3d(cls, **overrides) -> GridGraphSpec:
        """[-2, 2]^3 at step 0.2; corrected inside the unit ball."""
        axis = (-2.0, 2.0, 0.2)
        return cls(dim=3, extent=(axis, axis, axis), **overrides)

    @property
    def axes(self) -> list[np.ndarray]:
        return [
            lo + step * np.arange(math.floor((hi - lo) / step + 1e-9) + 1)
            for lo, hi, step in self.extent
        ]

    def to_dict(self):
        return {
            "dim": self.dim,
            "extent": [list(axis) for axis in self.extent],
            "extra_edges": self.extra_edges,
            "noise_scale": self.noise_scale,
            "correction": self.correction,
            "seed": self.seed,
        }


@dataclass
class GroundTruth:
    hotspot_vertex_mask: dict[int, bool]
    region_count: int
    regions: list[frozenset[int]] = field(default_factory=list)

    def to_dict(self):
        return {
            "region_count": self.region_count,
            "regions": [sorted(r) for r in self.regions],
        }


def _correction_mask(spec: GridGraphSpec, coords: np.ndarray) -> np.ndarray:
    if spec.dim == 2:
        return np.sin(coords[:, 0]) + np.sin(coords[:, 1]) >= 1.0
    return np.sum(coords**2, axis=1) <= 1.0


def _lattice_edges(shape: tuple[int, ...]) -> np.ndarray:
    flat = np.arange(int(np.prod(shape))).reshape(shape)
    blocks = []
    for axis in range(len(shape)):
        lower = [slice(None)] * len(shape)
        upper = [slice(None)] * len(shape)
        lower[axis] = slice(0, -1)
        upper[axis] = slice(1, None)
        blocks.append(np.column_stack([flat[tuple(lower)].ravel(), flat[tuple(upper)].ravel()]))
    return np.concatenate(blocks, axis=0)


def _random_edges(
    rng: np.random.Generator, n: int, existing: set[tuple[int, int]], count: int
) -> set[tuple[int, int]]:
    available = n * (n - 1) // 2 - len(existing)
    if count > available:
        raise DomainError(f"cannot add {count} extra edges; only {available} vertex pairs are free")
    chosen: set[tuple[int, int]] = set()
    while len(chosen) < count:
        u, v = (int(x) for x in rng.integers(0, n, size=2))
        if u == v:
            continue
        key = (u, v) if u < v else (v, u)
        if key in existing or key in chosen:
            continue
        chosen.add(key)
    return chosen


def gen_grid_graph(spec: GridGraphSpec) -> tuple[AnnotatedGraph, PointCloud, GroundTruth]:
    """Lattice graph with one singleton vertex per grid point.

    The returned point cloud holds the grid coordinates and the attribute, so
    `induced_attribute` on the graph reproduces the attribute exactly.
    """
    axes = spec.axes
    shape = tuple(len(a) for a in axes)
    n = int(np.prod(shape))
    if n < 2:
        raise DomainError(f"grid extent yields {n} point(s); need at least 2")

    mesh = np.meshgrid(*axes, indexing="ij")
    coords = np.column_stack([m.ravel() for m in mesh])
    mask = _correction_mask(spec, coords)

    rng = np.random.default_rng(spec.seed)
    attribute = rng.uniform(0.0, spec.noise_scale, size=n) + spec.correction * mask

    lattice = {(int(u), int(v)) for u, v in _lattice_edges(shape)}
    extra = _random_edges(rng, n, lattice, spec.extra_edges)

    # Flood fill over lattice adjacency only; extra edges never join regions.
    labels, region_count = ndimage.label(mask.reshape(shape))
    flat_labels = labels.ravel()
    regions = [frozenset(np.flatnonzero(flat_labels == k).tolist()) for k in range(1, region_count + 1)]

    vertices = tuple(Vertex(id=i, members=frozenset((i,))) for i in range(n))
    graph = AnnotatedGraph(vertices=vertices, edges=frozenset(lattice | extra))
    names = ("x", "y", "z")[: spec.dim]
    cloud = PointCloud(points=coords, attribute=attribute, feature_names=names)
    truth = GroundTruth(
        hotspot_vertex_mask={i: bool(mask[i]) for i in range(n)},
        region_count=int(region_count),
        regions=sorted(regions, key=min),
    )
    log.info(
        "%d-D grid: %d vertices, %d edges, %d corrected regions",
        spec.dim,
        n,
        graph.n_edges,
        truth.region_count,
    )
    return graph, cloud, truth


########################################################
########    Planted subgroup                   #########
########################################################


def gen_planted_blob(
    n_samples: int = 200,
    n_features: int = 50,
    blob_size: int = 15,
    support: int = 5,
    shift: float = 4.0,
    noise_scale: float = 0.1,
    seed: int = 0,
) -> tuple[PointCloud, frozenset[int]]:
    """Standard normal samples with `blob_size` of them shifted by `shift` on
    `support` features and given an attribute one unit above the rest.

    Returns the cloud and the planted sample indices.
    """
    if not 0 < blob_size < n_samples:
        raise DomainError(f"blob_size must be in (0, {n_samples}), got {blob_size}")
    if not 0 < support <= n_features:
        raise DomainError(f"support must be in (0, {n_features}], got {support}")

    rng = np.random.default_rng(seed)
    points = rng.standard_normal((n_samples, n_features))
    planted = rng.choice(n_samples, size=blob_size, replace=False)
    features = rng.choice(n_features, size=support, replace=False)
    points[np.ix_(planted, features)] += shift

    attribute = rng.uniform(0.0, noise_scale, size=n_samples)
    attribute[planted] += 1.0
    names = tuple(f"f{j}" for j in range(n_features))
    return PointCloud(points, attribute, feature_names=names), frozenset(int(i) for i in planted)
