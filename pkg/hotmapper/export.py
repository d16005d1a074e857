"""Serialization of graphs, dendrograms and hotspot reports.

JSON output is byte-deterministic: keys are sorted, vertices ascend by id and
edges by (u, v). Floats are written with Python's shortest round-trip repr, so
every importer reproduces its input exactly.

DOT vertex colours interpolate linearly in RGB between RAMP_LOW (smallest
attribute) and RAMP_HIGH (largest attribute).
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Literal

from hotmapper.core.types import (
    AnnotatedGraph,
    DomainError,
    EdgeGradientMap,
    MergeTree,
    Vertex,
    VertexAttributeMap,
    edge_key,
)
from hotmapper.hotspot import HotspotReport

ExportFormat = Literal["json", "dot"]

RAMP_LOW = (49, 54, 149)
RAMP_HIGH = (215, 48, 39)
HOTSPOT_OUTLINE = "#000000"


def _write_text(path: str | os.PathLike, text: str) -> None:
    target = Path(path)
    if target.parent and not target.parent.exists():
        target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")


def _dumps(data: dict) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def _read_json(path: str | os.PathLike) -> dict:
    if not os.path.exists(path):
        raise FileNotFoundError(f"File not found: {path}")
    with open(path, encoding="utf-8") as f:
        return json.load(f)


# ---------------------------------------------------------------------------
# Graphs
# ---------------------------------------------------------------------------


def graph_to_dict(
    graph: AnnotatedGraph, a_hat: VertexAttributeMap, grad: EdgeGradientMap | None = None
) -> dict:
    nodes = []
    for vertex in graph.vertices:
        if vertex.id not in a_hat:
            raise DomainError(f"vertex {vertex.id} has no attribute value")
        node = {
            "id": vertex.id,
            "members": sorted(vertex.members),
            "size": len(vertex.members),
            "a_hat": a_hat[vertex.id],
        }
        if vertex.level is not None:
            node["level"] = vertex.level
        nodes.append(node)
    edges = []
    for u, v in graph.sorted_edges():
        f_prime = grad[(u, v)] if grad is not None else abs(a_hat[u] - a_hat[v])
        edges.append({"u": u, "v": v, "f_prime": f_prime})
    return {"nodes": nodes, "edges": edges}


def graph_from_dict(data: dict) -> tuple[AnnotatedGraph, VertexAttributeMap, EdgeGradientMap]:
    nodes = sorted(data.get("nodes", []), key=lambda n: n["id"])
    vertices = tuple(
        Vertex(id=int(n["id"]), members=frozenset(n["members"]), level=n.get("level"))
        for n in nodes
    )
    a_hat = {int(n["id"]): float(n["a_hat"]) for n in nodes}
    grad = {edge_key(int(e["u"]), int(e["v"])): float(e["f_prime"]) for e in data.get("edges", [])}
    return AnnotatedGraph(vertices=vertices, edges=frozenset(grad)), a_hat, grad


def _hex(rgb: tuple[float, float, float]) -> str:
    return "#{:02x}{:02x}{:02x}".format(*(int(round(c)) for c in rgb))


def ramp_color(value: float, lo: float, hi: float) -> str:
    t = 0.5 if hi <= lo else min(max((value - lo) / (hi - lo), 0.0), 1.0)
    return _hex(tuple(a + t * (b - a) for a, b in zip(RAMP_LOW, RAMP_HIGH, strict=True)))


def render_dot(
    graph: AnnotatedGraph,
    a_hat: VertexAttributeMap,
    report: HotspotReport | None = None,
    name: str = "mapper",
) -> str:
    """Undirected DOT graph; hotspot vertices from `report` get a thick outline."""
    hot: set[int] = set()
    if report is not None:
        for assessment in report.hotspots:
            hot |= assessment.candidate.vertex_ids

    values = [a_hat[v.id] for v in graph.vertices]
    lo, hi = (min(values), max(values)) if values else (0.0, 0.0)
    lines = [f"graph {name} {{", "  node [shape=circle, style=filled];"]
    for vertex in graph.vertices:
        attrs = [
            f'label="{vertex.id}"',
            f'fillcolor="{ramp_color(a_hat[vertex.id], lo, hi)}"',
            f'tooltip="size={len(vertex.members)} a_hat={a_hat[vertex.id]:.4g}"',
        ]
        if vertex.id in hot:
            attrs += [f'color="{HOTSPOT_OUTLINE}"', "penwidth=3"]
        lines.append(f"  {vertex.id} [{', '.join(attrs)}];")
    for u, v in graph.sorted_edges():
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_graph(
    graph: AnnotatedGraph,
    a_hat: VertexAttributeMap,
    grad: EdgeGradientMap | None,
    path: str | os.PathLike,
    format: ExportFormat = "json",
    report: HotspotReport | None = None,
) -> None:
    if format == "json":
        _write_text(path, _dumps(graph_to_dict(graph, a_hat, grad)))
    elif format == "dot":
        _write_text(path, render_dot(graph, a_hat, report))
    else:
        raise DomainError(f"unknown export format {format!r}; expected json or dot")


def import_graph(path: str | os.PathLike) -> tuple[AnnotatedGraph, VertexAttributeMap, EdgeGradientMap]:
    return graph_from_dict(_read_json(path))


# ---------------------------------------------------------------------------
# Dendrograms and reports
# ---------------------------------------------------------------------------


def export_dendrogram(tree: MergeTree, path: str | os.PathLike) -> None:
    _write_text(path, _dumps(tree.to_dict()))


def import_dendrogram(path: str | os.PathLike) -> MergeTree:
    return MergeTree.from_dict(_read_json(path))


def export_report(report: HotspotReport, path: str | os.PathLike) -> None:
    _write_text(path, _dumps(report.to_dict()))


def import_report(path: str | os.PathLike) -> HotspotReport:
    return HotspotReport.from_dict(_read_json(path))
