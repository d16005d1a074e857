from hotmapper.core.types import AnnotatedGraph, DomainError, PointCloud
from hotmapper.hotspot import HotspotConfig, HotspotReport, detect_hotspots
from hotmapper.mapper import MapperConfig, build_mapper
from hotmapper.search import SearchConfig, run_lens_search

__all__ = [
    "AnnotatedGraph",
    "DomainError",
    "HotspotConfig",
    "HotspotReport",
    "MapperConfig",
    "PointCloud",
    "SearchConfig",
    "build_mapper",
    "detect_hotspots",
    "run_lens_search",
]
