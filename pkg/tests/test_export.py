"""Tests for graph, dendrogram and report export."""

import json
import re

import pytest

from hotmapper.core.graph import induced_attribute
from hotmapper.core.types import AnnotatedGraph, DomainError, MergeTree
from hotmapper.export import (
    RAMP_HIGH,
    RAMP_LOW,
    export_dendrogram,
    export_graph,
    export_report,
    import_dendrogram,
    import_graph,
    import_report,
    ramp_color,
    render_dot,
)
from hotmapper.hotspot import HotspotConfig, detect_hotspots, edge_gradient, graph_dendrogram
from hotmapper.lenses import LensSpec, eval_lens
from hotmapper.mapper import MapperConfig, build_mapper
from hotmapper.synthetic import gen_two_circles


@pytest.fixture(scope="module")
def circles():
    cloud = gen_two_circles(n_points=400, seed=0)
    config = MapperConfig(n_intervals=7, overlap_pct=20.0, linkage="ward", clusters_per_interval=6)
    graph = build_mapper(cloud, eval_lens(LensSpec("l2_norm"), cloud), config)
    a_hat = induced_attribute(cloud, graph)
    return graph, a_hat, edge_gradient(graph, a_hat)


class TestGraphJson:
    """Tests for graph JSON export and import."""

    def test_two_vertex_graph(self, tmp_path):
        graph = AnnotatedGraph.from_members([{0, 1}, {1, 2}], edges=[(0, 1)])
        a_hat = {0: 0.25, 1: 0.75}
        path = tmp_path / "g.json"
        export_graph(graph, a_hat, edge_gradient(graph, a_hat), path)
        data = json.loads(path.read_text())
        assert len(data["nodes"]) == 2
        assert data["nodes"][0] == {"id": 0, "members": [0, 1], "size": 2, "a_hat": 0.25}
        assert data["edges"] == [{"u": 0, "v": 1, "f_prime": 0.5}]

    def test_round_trip(self, tmp_path, circles):
        graph, a_hat, grad = circles
        path = tmp_path / "g.json"
        export_graph(graph, a_hat, grad, path)
        restored, restored_a_hat, restored_grad = import_graph(path)
        assert restored == graph
        assert restored_a_hat == a_hat
        assert restored_grad == grad

    def test_byte_deterministic(self, tmp_path, circles):
        graph, a_hat, grad = circles
        export_graph(graph, a_hat, grad, tmp_path / "a.json")
        export_graph(graph, a_hat, grad, tmp_path / "b.json")
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    def test_missing_attribute(self, tmp_path):
        graph = AnnotatedGraph.from_members([{0}])
        with pytest.raises(DomainError):
            export_graph(graph, {}, None, tmp_path / "g.json")

    def test_unknown_format(self, tmp_path):
        graph = AnnotatedGraph.from_members([{0}])
        with pytest.raises(DomainError):
            export_graph(graph, {0: 0.0}, None, tmp_path / "g.svg", format="svg")

    def test_import_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            import_graph(tmp_path / "missing.json")


class TestDot:
    """Tests for DOT rendering."""

    NODE = re.compile(
        r'^  \d+ \[label="\d+", fillcolor="#[0-9a-f]{6}", tooltip="[^"]*"'
        r'(, color="#[0-9a-f]{6}", penwidth=3)?\];$'
    )
    EDGE = re.compile(r"^  \d+ -- \d+;$")

    def test_structure(self, circles):
        graph, a_hat, _ = circles
        lines = render_dot(graph, a_hat).splitlines()
        assert lines[0] == "graph mapper {"
        assert lines[-1] == "}"
        body = lines[2:-1]
        assert sum(bool(self.NODE.match(line)) for line in body) == graph.n_vertices
        assert sum(bool(self.EDGE.match(line)) for line in body) == graph.n_edges
        assert all(self.NODE.match(line) or self.EDGE.match(line) for line in body)

    def test_hotspots_outlined(self):
        edges = [(i, i + 1) for i in range(9)] + [(5, 10), (10, 11)]
        graph = AnnotatedGraph.from_members([{i} for i in range(12)], edges)
        a_hat = {i: (1.0 if i >= 10 else 0.0) for i in range(12)}
        report = detect_hotspots(graph, a_hat, HotspotConfig(size_contrast="signed"))
        dot = render_dot(graph, a_hat, report)
        outlined = [line for line in dot.splitlines() if "penwidth=3" in line]
        assert [line.split()[0] for line in outlined] == ["10", "11"]

    def test_color_ramp_ends(self):
        assert ramp_color(0.0, 0.0, 1.0) == "#{:02x}{:02x}{:02x}".format(*RAMP_LOW)
        assert ramp_color(1.0, 0.0, 1.0) == "#{:02x}{:02x}{:02x}".format(*RAMP_HIGH)

    def test_export_dot_file(self, tmp_path, circles):
        graph, a_hat, grad = circles
        path = tmp_path / "g.dot"
        export_graph(graph, a_hat, grad, path, format="dot")
        assert path.read_text().startswith("graph mapper {")


class TestDendrogramAndReport:
    """Tests for dendrogram and report round trips."""

    def test_empty_forest(self, tmp_path):
        path = tmp_path / "t.json"
        export_dendrogram(MergeTree(leaf_count=3), path)
        assert json.loads(path.read_text()) == {"leaf_count": 3, "merges": []}

    def test_dendrogram_round_trip(self, tmp_path, circles):
        graph, _, grad = circles
        tree = graph_dendrogram(graph, grad)
        path = tmp_path / "t.json"
        export_dendrogram(tree, path)
        assert import_dendrogram(path) == tree

    def test_report_round_trip(self, tmp_path, circles):
        graph, a_hat, _ = circles
        report = detect_hotspots(graph, a_hat, HotspotConfig(epsilon=0.05))
        path = tmp_path / "r.json"
        export_report(report, path)
        assert import_report(path) == report
