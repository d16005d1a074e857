"""Lens functions: maps from a point cloud to one real value per point.

Fixed lenses (l2_norm, std_dev, min_value, coordinate) take no parameters
beyond a coordinate index. Linear and quadratic lenses are drawn at random by
`sample_lens` for the lens search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from hotmapper.core.types import DomainError, PointCloud

LensKind = Literal["l2_norm", "std_dev", "min_value", "coordinate", "linear", "quadratic"]
LensFamily = Literal["linear", "quadratic"]

LENS_KINDS: tuple[str, ...] = ("l2_norm", "std_dev", "min_value", "coordinate", "linear", "quadratic")
FIXED_LENSES: tuple[str, ...] = ("l2_norm", "std_dev", "min_value", "coordinate")
LENS_FAMILIES: tuple[str, ...] = ("linear", "quadratic")

# Sparsity used by the "subset" lens families.
SUBSET_SPARSITY = 0.9


@dataclass(frozen=True)
class LensSpec:
    kind: LensKind
    coeffs: tuple[float, ...] = ()
    terms: tuple[tuple[int, int, float], ...] = ()
    index: int | None = None

    def __post_init__(self):
        if self.kind not in LENS_KINDS:
            raise DomainError(f"unknown lens kind {self.kind!r}; expected one of {LENS_KINDS}")
        if self.kind == "coordinate" and (self.index is None or self.index < 0):
            raise DomainError("coordinate lens needs a non-negative index")
        if self.kind in ("linear", "quadratic") and not self.coeffs:
            raise DomainError(f"{self.kind} lens needs coefficients")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        terms = tuple((int(i), int(j), float(a)) for i, j, a in self.terms)
        if any(i < 0 or j < 0 for i, j, _ in terms):
            raise DomainError("quadratic term indices must be non-negative")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def parse(cls, text: str) -> LensSpec:
        """Parse a fixed lens name such as `l2_norm` or `coordinate:3`."""
        name, _, arg = text.partition(":")
        if name not in FIXED_LENSES:
            raise DomainError(f"unknown lens {text!r}; expected one of {FIXED_LENSES}")
        if name == "coordinate":
            if not arg.isdigit():
                raise DomainError(f"coordinate lens needs an index, e.g. coordinate:0 (got {text!r})")
            return cls(kind="coordinate", index=int(arg))
        if arg:
            raise DomainError(f"lens {name!r} takes no argument")
        return cls(kind=name)  # type: ignore[arg-type]

    @property
    def label(self) -> str:
        if self.kind == "coordinate":
            return f"coordinate:{self.index}"
        if self.kind in ("linear", "quadratic"):
            nonzero = sum(1 for c in self.coeffs if c != 0.0)
            suffix = f", {len(self.terms)} terms" if self.kind == "quadratic" else ""
            return f"{self.kind}[{nonzero}/{len(self.coeffs)} nonzero{suffix}]"
        return self.kind

    def to_dict(self):
        data = {
            "kind": self.kind,
            "coeffs": list(self.coeffs),
            "terms": [[i, j, a] for i, j, a in self.terms],
        }
        if self.index is not None:
            data["index"] = self.index
        return data

    @classmethod
    def from_dict(cls, data: dict) -> LensSpec:
        return cls(
            kind=data["kind"],
            coeffs=tuple(data.get("coeffs", ())),
            terms=tuple(tuple(t) for t in data.get("terms", ())),
            index=data.get("index"),
        )


@dataclass
class SamplerConfig:
    family: LensFamily = "linear"
    sparsity: float = 0.0  # fraction of linear coefficients forced to zero
    quad_terms: int | None = None  # None -> ceil(dim / 10)
    seed: int = 0  # used only when no generator is passed to sample_lens

    def __post_init__(self):
        if self.family not in LENS_FAMILIES:
            raise DomainError(f"unknown lens family {self.family!r}; expected one of {LENS_FAMILIES}")
        if not 0.0 <= self.sparsity <= 1.0:
            raise DomainError(f"sparsity must be in [0, 1], got {self.sparsity}")
        if self.quad_terms is not None and self.quad_terms < 0:
            raise DomainError("quad_terms must be non-negative")

    @classmethod
    def from_name(cls, name: str, seed: int = 0) -> SamplerConfig:
        """Build from `linear`, `quadratic`, `linear-subset` or `quadratic-subset`."""
        family, _, variant = name.partition("-")
        if variant not in ("", "subset"):
            raise DomainError(f"unknown lens family {name!r}")
        sparsity = SUBSET_SPARSITY if variant == "subset" else 0.0
        return cls(family=family, sparsity=sparsity, seed=seed)  # type: ignore[arg-type]

    def to_dict(self):
        return {
            "family": self.family,
            "sparsity": self.sparsity,
            "quad_terms": self.quad_terms,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> SamplerConfig:
        return cls(
            family=data.get("family", "linear"),
            sparsity=data.get("sparsity", 0.0),
            quad_terms=data.get("quad_terms"),
            seed=data.get("seed", 0),
        )


def sample_lens(
    config: SamplerConfig, dim: int, rng: np.random.Generator | None = None
) -> LensSpec:
    """Draw a random linear or quadratic lens for `dim`-dimensional points.

    Linear coefficients are uniform on [-1, 1], with floor(sparsity * dim) of
    them, chosen without replacement, set to zero. Quadratic lenses add
    quad_terms products x_i * x_j with index pairs drawn with replacement and
    their own uniform weights.
    """
    if dim < 1:
        raise DomainError(f"dimension must be at least 1, got {dim}")
    if rng is None:
        rng = np.random.default_rng(config.seed)

    coeffs = rng.uniform(-1.0, 1.0, size=dim)
    n_zero = math.floor(config.sparsity * dim)
    if n_zero:
        coeffs[rng.choice(dim, size=n_zero, replace=False)] = 0.0
    if config.family == "linear":
        return LensSpec(kind="linear", coeffs=tuple(coeffs))

    n_terms = config.quad_terms if config.quad_terms is not None else math.ceil(dim / 10)
    pairs = rng.integers(0, dim, size=(n_terms, 2))
    weights = rng.uniform(-1.0, 1.0, size=n_terms)
    terms = tuple((int(i), int(j), float(a)) for (i, j), a in zip(pairs, weights, strict=True))
    return LensSpec(kind="quadratic", coeffs=tuple(coeffs), terms=terms)


def eval_lens(spec: LensSpec, cloud: PointCloud | np.ndarray) -> np.ndarray:
    x = cloud.points if isinstance(cloud, PointCloud) else np.asarray(cloud, dtype=float)
    dim = x.shape[1]

    if spec.kind == "l2_norm":
        return np.linalg.norm(x, axis=1)
    if spec.kind == "std_dev":
        return x.std(axis=1, ddof=0)
    if spec.kind == "min_value":
        return x.min(axis=1)
    if spec.kind == "coordinate":
        if spec.index >= dim:
            raise DomainError(f"coordinate {spec.index} out of range for {dim}-dimensional points")
        return x[:, spec.index].copy()

    if len(spec.coeffs) != dim:
        raise DomainError(f"lens has {len(spec.coeffs)} coefficients for {dim}-dimensional points")
    values = x @ np.asarray(spec.coeffs)
    for i, j, alpha in spec.terms:
        if i >= dim or j >= dim:
            raise DomainError(f"quadratic term ({i}, {j}) out of range for dimension {dim}")
        values += alpha * x[:, i] * x[:, j]
    return values
