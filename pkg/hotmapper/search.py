"""Random lens search.

Each trial samples a lens, builds the Mapper graph, detects hotspots and
scores the result. Trial i draws from its own generator seeded by
`trial_seed(master_seed, i)`, so results do not depend on how many workers
run the trials or in which order they finish.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Literal

import numpy as np

from hotmapper.core.graph import connected_components, induced_attribute
from hotmapper.core.types import AnnotatedGraph, DomainError, PointCloud
from hotmapper.hotspot import HotspotConfig, HotspotReport, detect_hotspots
from hotmapper.lenses import LensSpec, SamplerConfig, eval_lens, sample_lens
from hotmapper.mapper import MapperConfig, build_mapper

if TYPE_CHECKING:
    from hotmapper.logger import SearchLogger, VerbosePrinter

log = logging.getLogger(__name__)

ScoreCriterion = Literal["max_heterogeneity", "hotspot_point_count"]
SCORE_CRITERIA: tuple[str, ...] = ("max_heterogeneity", "hotspot_point_count")

_MASK64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(state: int) -> int:
    z = (state + _GOLDEN_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def trial_seed(master_seed: int, trial_index: int) -> int:
    """64-bit seed for one trial: splitmix64 of the master seed advanced
    trial_index steps along the golden-ratio sequence."""
    return splitmix64((master_seed + trial_index * _GOLDEN_GAMMA) & _MASK64)


########################################################
########    Configuration and results          #########
########################################################


@dataclass
class SearchConfig:
    trials: int = 1000
    lens_family: SamplerConfig = field(default_factory=SamplerConfig)
    mapper: MapperConfig = field(default_factory=MapperConfig)
    hotspot: HotspotConfig = field(default_factory=HotspotConfig)
    master_seed: int = 0
    score: ScoreCriterion = "max_heterogeneity"

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError(f"trials must be at least 1, got {self.trials}")
        if self.master_seed < 0:
            raise DomainError("master_seed must be unsigned")
        if self.score not in SCORE_CRITERIA:
            raise DomainError(f"unknown score {self.score!r}; expected one of {SCORE_CRITERIA}")

    def to_dict(self):
        return {
            "trials": self.trials,
            "lens_family": self.lens_family.to_dict(),
            "mapper": self.mapper.to_dict(),
            "hotspot": self.hotspot.to_dict(),
            "master_seed": self.master_seed,
            "score": self.score,
        }

    @classmethod
    def from_dict(cls, data: dict) -> SearchConfig:
        return cls(
            trials=data.get("trials", 1000),
            lens_family=SamplerConfig.from_dict(data.get("lens_family", {})),
            mapper=MapperConfig.from_dict(data.get("mapper", {})),
            hotspot=HotspotConfig.from_dict(data.get("hotspot", {})),
            master_seed=data.get("master_seed", 0),
            score=data.get("score", "max_heterogeneity"),
        )


@dataclass
class GraphSummary:
    n_vertices: int
    n_edges: int
    n_components: int

    @classmethod
    def of(cls, graph: AnnotatedGraph) -> GraphSummary:
        return cls(graph.n_vertices, graph.n_edges, len(connected_components(graph)))

    def to_dict(self):
        return {
            "n_vertices": self.n_vertices,
            "n_edges": self.n_edges,
            "n_components": self.n_components,
        }


@dataclass
class TrialResult:
    trial_index: int
    lens: LensSpec | None
    report: HotspotReport | None
    score: float  # -inf for a failed trial
    scores: dict[str, float] = field(default_factory=dict)
    graph_summary: GraphSummary | None = None
    # Point indices of each hotspot, most heterogeneous first.
    hotspot_members: list[list[int]] = field(default_factory=list)
    error: str | None = None
    elapsed: float = 0.0

    @property
    def failed(self) -> bool:
        return self.error is not None

    def to_dict(self):
        """JSON-ready record; a -inf score is written as null."""
        return {
            "trial_index": self.trial_index,
            "lens": self.lens.to_dict() if self.lens is not None else None,
            "score": self.score if math.isfinite(self.score) else None,
            "scores": dict(self.scores),
            "graph_summary": self.graph_summary.to_dict() if self.graph_summary else None,
            "hotspot_members": [list(m) for m in self.hotspot_members],
            "report": self.report.to_dict() if self.report is not None else None,
            "error": self.error,
        }


def score_trial(report: HotspotReport, criterion: ScoreCriterion) -> float:
    hotspots = report.hotspots
    if criterion == "max_heterogeneity":
        return max((h.heterogeneity for h in hotspots), default=0.0)
    if criterion == "hotspot_point_count":
        return float(sum(h.candidate.size_points for h in hotspots))
    raise DomainError(f"unknown score {criterion!r}; expected one of {SCORE_CRITERIA}")


########################################################
########    Trials                             #########
########################################################


def _hotspot_members(report: HotspotReport, graph: AnnotatedGraph) -> list[list[int]]:
    members = []
    for assessment in report.hotspots:
        points: set[int] = set()
        for v in assessment.candidate.vertex_ids:
            points |= graph.vertices[v].members
        members.append(sorted(points))
    return members


def run_trial(cloud: PointCloud, config: SearchConfig, trial_index: int) -> TrialResult:
    """Run one trial; domain failures are captured in the result."""
    start = time.perf_counter()
    rng = np.random.default_rng(trial_seed(config.master_seed, trial_index))
    lens: LensSpec | None = None
    try:
        lens = sample_lens(config.lens_family, cloud.dim, rng)
        graph = build_mapper(cloud, eval_lens(lens, cloud), config.mapper)
        report = detect_hotspots(graph, induced_attribute(cloud, graph), config.hotspot)
    except DomainError as e:
        log.warning("trial %d failed: %s", trial_index, e)
        return TrialResult(
            trial_index=trial_index,
            lens=lens,
            report=None,
            score=-math.inf,
            error=str(e),
            elapsed=time.perf_counter() - start,
        )

    scores = {criterion: score_trial(report, criterion) for criterion in SCORE_CRITERIA}
    return TrialResult(
        trial_index=trial_index,
        lens=lens,
        report=report,
        score=scores[config.score],
        scores=scores,
        graph_summary=GraphSummary.of(graph),
        hotspot_members=_hotspot_members(report, graph),
        elapsed=time.perf_counter() - start,
    )


def run_lens_search(
    cloud: PointCloud,
    config: SearchConfig,
    workers: int = 1,
    logger: SearchLogger | None = None,
    printer: VerbosePrinter | None = None,
) -> list[TrialResult]:
    """Run every trial and return results best-first (ties by trial index)."""
    if workers < 1:
        raise DomainError(f"workers must be at least 1, got {workers}")
    if logger is not None:
        logger.log_metadata(config, cloud)
    if printer is not None:
        printer.print_search_header(config, cloud, workers)

    indices = range(config.trials)
    if workers == 1:
        results = [run_trial(cloud, config, i) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda i: run_trial(cloud, config, i), indices))

    # results are in trial order here, so the log is too
    for result in results:
        if logger is not None:
            logger.log(result)
        if printer is not None:
            printer.print_trial(result)

    failed = sum(1 for r in results if r.failed)
    log.info("search finished: %d trials, %d failed", len(results), failed)
    return sorted(results, key=lambda r: (-r.score, r.trial_index))


def results_to_dict(results: list[TrialResult], config: SearchConfig) -> dict:
    return {"config": config.to_dict(), "results": [r.to_dict() for r in results]}
