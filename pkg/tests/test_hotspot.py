"""Tests for hotspot detection."""

import json
import math

import networkx as nx
import numpy as np
import pytest

from hotmapper.core.clustering import cut
from hotmapper.core.graph import connected_components, threshold_components
from hotmapper.core.types import AnnotatedGraph, DomainError, MergeTree
from hotmapper.export import export_report
from hotmapper.hotspot import (
    CandidateComponent,
    EmptyNeighbourhoodError,
    HotspotConfig,
    HotspotReport,
    candidates_at,
    classify_candidates,
    detect_hotspots,
    edge_gradient,
    graph_dendrogram,
    neighbourhood_of,
    neighbourhood_size,
    suggest_tau,
)
from tests.graph_fixtures import random_attributed_graph


def lollipop():
    """Path 0..9 with attribute 0 and a two-vertex branch 10-11 with attribute 1
    hanging off vertex 5."""
    edges = [(i, i + 1) for i in range(9)] + [(5, 10), (10, 11)]
    graph = AnnotatedGraph.from_members([{i} for i in range(12)], edges)
    a_hat = {i: (1.0 if i >= 10 else 0.0) for i in range(12)}
    return graph, a_hat


def candidate(ids, a_hat=0.0, points=None):
    ids = frozenset(ids)
    return CandidateComponent(ids, a_hat, len(ids), points if points is not None else len(ids))


class TestEdgeGradient:
    """Tests for edge_gradient."""

    def test_absolute_difference(self):
        graph = AnnotatedGraph.from_members([{0}, {1}, {2}], edges=[(0, 1), (1, 2)])
        grad = edge_gradient(graph, {0: 0.2, 1: 0.9, 2: 0.4})
        assert grad == pytest.approx({(0, 1): 0.7, (1, 2): 0.5})

    def test_missing_attribute(self):
        graph = AnnotatedGraph.from_members([{0}, {1}], edges=[(0, 1)])
        with pytest.raises(DomainError):
            edge_gradient(graph, {0: 1.0})


class TestGraphDendrogram:
    """Tests for graph_dendrogram."""

    def test_path(self):
        graph = AnnotatedGraph.from_members([{0}, {1}, {2}], edges=[(0, 1), (1, 2)])
        a_hat = {0: 0.0, 1: 0.1, 2: 1.0}
        tree = graph_dendrogram(graph, edge_gradient(graph, a_hat))
        assert tree.leaf_count == 3
        assert tree.merges[0] == (0, 1, pytest.approx(0.1))
        assert tree.merges[1] == (2, 3, pytest.approx(0.9))

    def test_forest_for_disconnected_graph(self):
        graph = AnnotatedGraph.from_members([{i} for i in range(5)], edges=[(0, 1), (2, 3)])
        tree = graph_dendrogram(graph, {(0, 1): 0.5, (2, 3): 0.2})
        assert len(tree.merges) == 5 - 3
        assert tree.heights == [0.2, 0.5]

    def test_heights_equal_spanning_forest_weights(self):
        """Merge heights are the sorted weights of a minimum spanning forest."""
        rng = np.random.default_rng(12)
        for _ in range(50):
            graph, a_hat = random_attributed_graph(rng)
            grad = edge_gradient(graph, a_hat)
            g = nx.Graph()
            g.add_nodes_from(range(graph.n_vertices))
            g.add_weighted_edges_from((u, v, w) for (u, v), w in grad.items())
            forest = sorted(w for _, _, w in nx.minimum_spanning_tree(g).edges(data="weight"))
            heights = graph_dendrogram(graph, grad).heights
            assert heights == pytest.approx(forest)
            assert len(heights) == graph.n_vertices - len(connected_components(graph))

    def test_missing_gradient(self):
        graph = AnnotatedGraph.from_members([{0}, {1}], edges=[(0, 1)])
        with pytest.raises(DomainError):
            graph_dendrogram(graph, {})


class TestSuggestTau:
    """Tests for suggest_tau."""

    def test_widest_gap_midpoint(self):
        tree = MergeTree(5, ((0, 1, 0.0), (2, 3, 0.0), (4, 5, 0.05), (6, 7, 0.9)))
        assert suggest_tau(tree) == pytest.approx(0.475)

    def test_single_merge(self):
        assert suggest_tau(MergeTree(2, ((0, 1, 0.8),))) == pytest.approx(0.4)

    def test_ties_take_lowest_gap(self):
        """Levels 0, 1, 2, 3 (top = 1.5 * 2) have three equal gaps."""
        tree = MergeTree(3, ((0, 1, 1.0), (2, 3, 2.0)))
        assert suggest_tau(tree) == pytest.approx(0.5)

    def test_no_dominant_gap_undoes_top_merge(self):
        """Evenly spaced heights leave the virtual top as the widest gap."""
        heights = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6]
        merges = [(0, 1, heights[0])] + [(i + 1, 6 + i, h) for i, h in enumerate(heights[1:], start=1)]
        tree = MergeTree(7, tuple(merges))
        tau = suggest_tau(tree)
        assert tau == pytest.approx(0.55)
        assert len(cut(tree, height=tau)) == 2

    def test_all_zero_heights(self):
        with pytest.raises(DomainError, match="tau"):
            suggest_tau(MergeTree(3, ((0, 1, 0.0), (2, 3, 0.0))))

    def test_no_merges(self):
        with pytest.raises(DomainError):
            suggest_tau(MergeTree(3))


class TestCandidatesAt:
    """Tests for candidates_at."""

    def test_lollipop_candidates(self):
        graph, a_hat = lollipop()
        tree = graph_dendrogram(graph, edge_gradient(graph, a_hat))
        found = candidates_at(tree, graph, 0.5, a_hat)
        assert [sorted(c.vertex_ids) for c in found] == [list(range(10)), [10, 11]]
        assert [c.a_hat for c in found] == [0.0, 1.0]

    def test_size_points_counts_distinct_members(self):
        graph = AnnotatedGraph.from_members([{0, 1, 2}, {2, 3}], edges=[(0, 1)])
        a_hat = {0: 0.5, 1: 0.5}
        tree = graph_dendrogram(graph, edge_gradient(graph, a_hat))
        (only,) = candidates_at(tree, graph, 0.1, a_hat)
        assert (only.size_nodes, only.size_points) == (2, 4)

    def test_matches_threshold_components(self):
        """Cutting the dendrogram at tau equals the components of edges below tau."""
        rng = np.random.default_rng(2025)
        for _ in range(100):
            graph, a_hat = random_attributed_graph(rng)
            grad = edge_gradient(graph, a_hat)
            tree = graph_dendrogram(graph, grad)
            for tau in rng.uniform(0.001, 1.0, size=10):
                found = {c.vertex_ids for c in candidates_at(tree, graph, tau, a_hat)}
                assert found == threshold_components(graph, grad, tau).as_sets()

    def test_spread_and_internal_edges_below_tau(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            graph, a_hat = random_attributed_graph(rng)
            grad = edge_gradient(graph, a_hat)
            tree = graph_dendrogram(graph, grad)
            tau = float(rng.uniform(0.05, 0.5))
            for c in candidates_at(tree, graph, tau, a_hat):
                values = [a_hat[v] for v in c.vertex_ids]
                assert c.a_hat_spread == pytest.approx(max(values) - min(values))
                sub = graph.to_networkx().subgraph(c.vertex_ids)
                assert nx.is_connected(sub)


class TestNeighbourhood:
    """Tests for neighbourhood_of and neighbourhood_size."""

    def test_neighbourhood_of(self):
        graph, _ = lollipop()
        parts = [frozenset(range(5)), frozenset(range(5, 10)), frozenset({10, 11})]
        assert neighbourhood_of(parts, graph, parts[2]) == [parts[1]]
        assert neighbourhood_of(parts, graph, parts[1]) == [parts[0], parts[2]]

    def test_path_segments(self):
        """Three consecutive segments of a path: the middle one touches both ends."""
        graph = AnnotatedGraph.from_members([{i} for i in range(9)], [(i, i + 1) for i in range(8)])
        parts = [frozenset(range(0, 3)), frozenset(range(3, 6)), frozenset(range(6, 9))]
        assert neighbourhood_of(parts, graph, parts[1]) == [parts[0], parts[2]]
        assert neighbourhood_of(parts, graph, parts[0]) == [parts[1]]
        assert neighbourhood_of(parts, graph, parts[2]) == [parts[1]]

    def test_neighbourhood_size(self):
        neighbours = [candidate(range(3), points=5), candidate(range(3, 8), points=9)]
        assert neighbourhood_size(neighbours, "nodes") == 4.0
        assert neighbourhood_size(neighbours, "points") == 7.0

    def test_empty_neighbourhood(self):
        with pytest.raises(EmptyNeighbourhoodError):
            neighbourhood_size([], "nodes")


class TestClassifyCandidates:
    """Tests for classify_candidates."""

    def test_mad_threshold(self):
        """Candidate sizes {2, 3, 3, 4, 10} give sigma2 = 1."""
        sizes = [2, 3, 3, 4, 10]
        members, start = [], 0
        for size in sizes:
            members.append(range(start, start + size))
            start += size
        graph = AnnotatedGraph.from_members([{i} for i in range(start)])
        found = [candidate(ids) for ids in members]
        report = classify_candidates(found, graph, HotspotConfig())
        assert report.sigma2 == {"nodes": 1.0}

    def test_signed_contrast_keeps_only_smaller_component(self):
        graph, a_hat = lollipop()
        report = detect_hotspots(
            graph, a_hat, HotspotConfig(epsilon=0.1, size_contrast="signed")
        )
        assert report.tau == pytest.approx(0.5)
        assert [a.verdict for a in report.assessments] == [
            "insufficient_size_contrast",
            "hotspot",
        ]
        assert report.assessments[1].signed_size_contrast == 8.0

    def test_absolute_contrast_accepts_both_sides(self):
        graph, a_hat = lollipop()
        report = detect_hotspots(graph, a_hat, HotspotConfig(epsilon=0.1))
        assert report.verdict_counts["hotspot"] == 2
        assert report.sigma2 == {"nodes": 4.0}

    def test_too_small_takes_precedence(self):
        graph, a_hat = lollipop()
        report = detect_hotspots(graph, a_hat, HotspotConfig(sigma1_nodes=3, size_contrast="signed"))
        assert report.assessments[1].verdict == "too_small"
        # neighbourhoods are unaffected by the removal
        assert report.assessments[0].neighbour_ids == [1]

    def test_isolated_candidate_is_not_a_hotspot(self):
        graph = AnnotatedGraph.from_members([{0}, {1}, {2}], edges=[(0, 1)])
        a_hat = {0: 0.0, 1: 0.0, 2: 5.0}
        report = detect_hotspots(graph, a_hat, HotspotConfig(tau=0.5, sigma1_nodes=1))
        isolated = report.assessments[1]
        assert isolated.candidate.vertex_ids == frozenset({2})
        assert isolated.verdict == "insufficient_heterogeneity"
        assert isolated.heterogeneity is None

    def test_heterogeneity_below_epsilon(self):
        graph, a_hat = lollipop()
        report = detect_hotspots(graph, a_hat, HotspotConfig(epsilon=2.0, size_contrast="signed"))
        assert report.assessments[1].verdict == "insufficient_heterogeneity"
        assert report.assessments[1].heterogeneity == pytest.approx(1.0)

    def test_points_mode_uses_member_counts(self):
        graph, a_hat = lollipop()
        config = HotspotConfig(
            sigma1_nodes=None, sigma1_points=3, size_mode="points", size_contrast="signed"
        )
        report = detect_hotspots(graph, a_hat, config)
        assert report.assessments[1].verdict == "too_small"

    def test_both_modes_use_own_mad(self):
        graph, a_hat = lollipop()
        config = HotspotConfig(sigma1_points=1, size_mode="both", size_contrast="signed")
        report = detect_hotspots(graph, a_hat, config)
        assert set(report.sigma2) == {"nodes", "points"}
        assert report.verdict_counts["hotspot"] == 1

    def test_user_sigma2_overrides(self):
        graph, a_hat = lollipop()
        report = detect_hotspots(graph, a_hat, HotspotConfig(sigma2=9.0, size_contrast="signed"))
        assert report.sigma2 == {"nodes": 9.0}
        assert report.verdict_counts["hotspot"] == 0

    def test_constant_attribute_has_no_hotspots(self):
        rng = np.random.default_rng(17)
        for _ in range(30):
            graph, _ = random_attributed_graph(rng)
            a_hat = {v: 0.3 for v in range(graph.n_vertices)}
            report = detect_hotspots(graph, a_hat, HotspotConfig(tau=0.1, epsilon=0.01, sigma1_nodes=1))
            assert report.verdict_counts["hotspot"] == 0

    def test_edgeless_graph(self):
        """No merges at all: every vertex is its own candidate under the default config."""
        graph = AnnotatedGraph.from_members([{0}, {1}, {2}])
        report = detect_hotspots(graph, {0: 0.0, 1: 1.0, 2: 2.0}, HotspotConfig())
        assert len(report.candidates) == 3
        assert report.verdict_counts["hotspot"] == 0
        assert report.verdict_counts["too_small"] == 3
        singles = detect_hotspots(graph, {0: 0.0, 1: 1.0, 2: 2.0}, HotspotConfig(sigma1_nodes=1))
        assert singles.verdict_counts["insufficient_heterogeneity"] == 3
        assert report.tau == math.inf
        assert report.to_dict()["tau"] is None

    def test_constant_attribute_without_tau(self):
        graph, _ = lollipop()
        report = detect_hotspots(graph, {v: 1.0 for v in range(12)}, HotspotConfig(sigma1_nodes=1))
        assert [sorted(c.vertex_ids) for c in report.candidates] == [list(range(12))]
        assert report.verdict_counts["hotspot"] == 0

    def test_verdict_counts_partition_candidates(self):
        rng = np.random.default_rng(404)
        for _ in range(50):
            graph, a_hat = random_attributed_graph(rng)
            config = HotspotConfig(epsilon=float(rng.uniform(0.0, 0.3)), sigma1_nodes=2)
            report = detect_hotspots(graph, a_hat, config)
            counts = report.verdict_counts
            assert sum(counts.values()) == len(report.candidates)
            for verdict, count in counts.items():
                assert count == sum(a.verdict == verdict for a in report.assessments)

    def test_scale_equivariance(self):
        """a * A + b with tau and epsilon scaled by a yields the same hotspots."""
        rng = np.random.default_rng(99)
        for a, b in [(2.0, 0.0), (0.5, 0.25), (3.0, -1.0)]:
            for _ in range(20):
                graph, a_hat = random_attributed_graph(rng)
                tau = float(rng.uniform(0.05, 0.5))
                eps = float(rng.uniform(0.0, 0.3))
                base = detect_hotspots(graph, a_hat, HotspotConfig(tau=tau, epsilon=eps, sigma1_nodes=1))
                shifted = {v: a * x + b for v, x in a_hat.items()}
                scaled = detect_hotspots(
                    graph, shifted, HotspotConfig(tau=a * tau, epsilon=a * eps, sigma1_nodes=1)
                )
                assert {h.candidate.vertex_ids for h in base.hotspots} == {
                    h.candidate.vertex_ids for h in scaled.hotspots
                }

    def test_hotspots_satisfy_every_condition(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            graph, a_hat = random_attributed_graph(rng)
            config = HotspotConfig(tau=0.2, epsilon=0.2, sigma1_nodes=2, size_contrast="signed")
            report = detect_hotspots(graph, a_hat, config)
            g = graph.to_networkx()
            for h in report.hotspots:
                ids = h.candidate.vertex_ids
                assert nx.is_connected(g.subgraph(ids))
                assert all(
                    abs(a_hat[u] - a_hat[v]) >= config.tau
                    for u in ids
                    for v in g[u]
                    if v not in ids
                )
                assert h.candidate.size_nodes >= 2
                assert h.signed_size_contrast > report.sigma2["nodes"]
                assert h.heterogeneity > config.epsilon

    def test_uncovered_vertex_rejected(self):
        graph = AnnotatedGraph.from_members([{0}, {1}])
        with pytest.raises(DomainError):
            classify_candidates([candidate({0})], graph, HotspotConfig())


class TestHotspotConfig:
    """Tests for HotspotConfig validation and serialization."""

    def test_needs_a_sigma1(self):
        with pytest.raises(DomainError):
            HotspotConfig(sigma1_nodes=None, sigma1_points=None)

    def test_active_measure_needs_its_sigma1(self):
        with pytest.raises(DomainError, match="sigma1_nodes"):
            HotspotConfig(sigma1_nodes=None, sigma1_points=5)
        with pytest.raises(DomainError, match="sigma1_points"):
            HotspotConfig(sigma1_nodes=2, size_mode="both")
        config = HotspotConfig(sigma1_nodes=None, sigma1_points=5, size_mode="points")
        assert config.measures == ("points",)

    def test_rejects_bad_values(self):
        with pytest.raises(DomainError):
            HotspotConfig(tau=0.0)
        with pytest.raises(DomainError):
            HotspotConfig(epsilon=-0.1)
        with pytest.raises(DomainError):
            HotspotConfig(size_mode="edges")

    def test_dict_round_trip(self):
        config = HotspotConfig(tau=0.3, sigma1_points=4, size_mode="both", size_contrast="signed")
        assert HotspotConfig.from_dict(config.to_dict()) == config


class TestHotspotReport:
    """Tests for HotspotReport serialization."""

    def test_dict_round_trip(self):
        graph, a_hat = lollipop()
        report = detect_hotspots(graph, a_hat, HotspotConfig(size_contrast="signed"))
        restored = HotspotReport.from_dict(report.to_dict())
        assert restored == report

    def test_flat_candidate_records(self):
        graph, a_hat = lollipop()
        record = detect_hotspots(graph, a_hat, HotspotConfig()).to_dict()["candidates"][1]
        assert record["vertices"] == [10, 11]
        assert record["verdict"] == "hotspot"
        assert {"a_hat", "size_nodes", "size_points", "neighbour_ids", "heterogeneity"} <= set(record)

    def test_unknown_tau_written_as_null(self, tmp_path):
        graph, a_hat = lollipop()
        tree = graph_dendrogram(graph, edge_gradient(graph, a_hat))
        found = candidates_at(tree, graph, 0.5, a_hat)
        report = classify_candidates(found, graph, HotspotConfig(size_contrast="signed"))
        assert math.isnan(report.tau)
        path = tmp_path / "report.json"
        export_report(report, path)
        text = path.read_text()
        assert "NaN" not in text
        assert json.loads(text)["tau"] is None
