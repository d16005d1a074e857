"""
Command-line interface for hotmapper.

Example usage:

    # Two noisy concentric circles as a point-cloud CSV
    python run_hotmapper.py gen two-circles --out data/circles.csv --seed 3

    # Mapper graph under the L2-norm lens
    python run_hotmapper.py mapper \\
        --input data/circles.csv --lens l2_norm \\
        --intervals 7 --overlap 20 --linkage ward --clusters-per-interval 6 \\
        --out output/circles_graph.json

    # Hotspots with the suggested tau, keeping the dendrogram
    python run_hotmapper.py detect \\
        --graph output/circles_graph.json --epsilon 0.1 --sigma1-nodes 2 \\
        --size-contrast signed --out output/circles_report.json \\
        --dendrogram output/circles_tree.json --verbose

    # Lattice benchmark: graph JSON plus ground truth
    python run_hotmapper.py gen grid2d --out data/grid2d.json

    # 200-trial sparse linear lens search on 4 threads
    python run_hotmapper.py search \\
        --input data/planted.csv --trials 200 --family linear-subset \\
        --intervals 10 --overlap 50 --clusters-per-interval 1 \\
        --workers 4 --top 5 --out output/search.json --log-dir output/logs

    # DOT rendering with hotspot outlines
    python run_hotmapper.py export \\
        --graph output/circles_graph.json --report output/circles_report.json \\
        --format dot --out output/circles.dot

Environment (a .env file is read first): HOTMAPPER_SEED, HOTMAPPER_WORKERS,
HOTMAPPER_LOG_LEVEL, HOTMAPPER_LOG_DIR.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from dotenv import load_dotenv

from hotmapper.core.graph import induced_attribute
from hotmapper.core.types import DomainError
from hotmapper.export import (
    export_dendrogram,
    export_graph,
    export_report,
    import_graph,
    import_report,
)
from hotmapper.hotspot import (
    SIZE_CONTRASTS,
    SIZE_MODES,
    HotspotConfig,
    detect_hotspots,
    edge_gradient,
    graph_dendrogram,
)
from hotmapper.ingest import PointCloudLoadError, export_point_cloud_csv, load_point_cloud_csv
from hotmapper.lenses import LensSpec, SamplerConfig, eval_lens
from hotmapper.logger import SearchLogger, VerbosePrinter
from hotmapper.mapper import MapperConfig, build_mapper
from hotmapper.search import SCORE_CRITERIA, SearchConfig, results_to_dict, run_lens_search
from hotmapper.synthetic import GridGraphSpec, gen_grid_graph, gen_planted_blob, gen_two_circles

log = logging.getLogger(__name__)

EXIT_DOMAIN = 1
EXIT_IO = 2

LENS_FAMILY_NAMES = ("linear", "quadratic", "linear-subset", "quadratic-subset")


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    return int(raw) if raw not in (None, "") else default


def _write_json(path: str, data: dict) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(json.dumps(data, sort_keys=True, indent=2) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Shared flag groups
# ---------------------------------------------------------------------------


def _add_input_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True, help="Point-cloud CSV with a header row.")
    parser.add_argument(
        "--attribute-col",
        default="attribute",
        help="Column holding the attribute A(x); all other columns are features (default: attribute).",
    )


def _add_mapper_flags(parser: argparse.ArgumentParser) -> None:
    defaults = MapperConfig()
    parser.add_argument("--intervals", type=int, default=defaults.n_intervals, help="Cover intervals n.")
    parser.add_argument(
        "--overlap",
        type=float,
        default=defaults.overlap_pct,
        help="Overlap between consecutive intervals, percent of interval length.",
    )
    parser.add_argument("--metric", choices=("euclidean", "correlation"), default=defaults.metric)
    parser.add_argument("--linkage", choices=("single", "ward"), default=defaults.linkage)
    parser.add_argument(
        "--clusters-per-interval",
        type=int,
        default=defaults.clusters_per_interval,
        help="Clusters cut from each pullback's dendrogram (fewer if the pullback is smaller).",
    )


def _add_detect_flags(parser: argparse.ArgumentParser) -> None:
    defaults = HotspotConfig()
    parser.add_argument("--tau", type=float, default=None, help="Dendrogram cut level (default: suggested).")
    parser.add_argument("--epsilon", type=float, default=defaults.epsilon, help="Heterogeneity threshold.")
    parser.add_argument("--sigma1-nodes", type=int, default=defaults.sigma1_nodes, help="Minimum vertex count.")
    parser.add_argument("--sigma1-points", type=int, default=None, help="Minimum distinct member points.")
    parser.add_argument(
        "--sigma2",
        type=float,
        default=None,
        help="Size-contrast threshold (default: one MAD of candidate sizes per measure).",
    )
    parser.add_argument("--size-mode", choices=SIZE_MODES, default=defaults.size_mode)
    parser.add_argument(
        "--size-contrast",
        choices=SIZE_CONTRASTS,
        default=defaults.size_contrast,
        help="absolute: |S(N)-S(C)| >= sigma2; signed: S(N)-S(C) > sigma2.",
    )


def _mapper_config(args: argparse.Namespace) -> MapperConfig:
    return MapperConfig(
        n_intervals=args.intervals,
        overlap_pct=args.overlap,
        linkage=args.linkage,
        clusters_per_interval=args.clusters_per_interval,
        metric=args.metric,
    )


def _hotspot_config(args: argparse.Namespace) -> HotspotConfig:
    return HotspotConfig(
        epsilon=args.epsilon,
        tau=args.tau,
        sigma1_nodes=args.sigma1_nodes,
        sigma1_points=args.sigma1_points,
        sigma2=args.sigma2,
        size_mode=args.size_mode,
        size_contrast=args.size_contrast,
    )


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _grid_spec(args: argparse.Namespace) -> GridGraphSpec:
    base = GridGraphSpec.default_2d() if args.kind == "grid2d" else GridGraphSpec.default_3d()
    extent = base.extent
    if args.step is not None:
        extent = tuple((lo, hi, args.step) for lo, hi, _ in extent)
    return GridGraphSpec(
        dim=base.dim,
        extent=extent,
        extra_edges=args.extra_edges,
        noise_scale=args.noise_scale,
        correction=args.correction,
        seed=args.seed,
    )


def cmd_gen(args: argparse.Namespace) -> int:
    if args.kind == "two-circles":
        cloud = gen_two_circles(n_points=args.n_points or 3000, noise=args.noise, seed=args.seed)
        export_point_cloud_csv(cloud, args.out)
        print(f"[GEN] two circles: {cloud.n_points} points -> {args.out}")
        return 0

    if args.kind == "planted":
        cloud, planted = gen_planted_blob(
            n_samples=args.n_points or 200,
            n_features=args.n_features,
            blob_size=args.blob_size,
            support=args.support,
            shift=args.shift,
            seed=args.seed,
        )
        export_point_cloud_csv(cloud, args.out)
        truth_path = args.truth or str(Path(args.out).with_suffix(".truth.json"))
        _write_json(truth_path, {"planted": sorted(planted)})
        print(f"[GEN] planted blob: {cloud.n_points} x {cloud.dim}, {len(planted)} planted -> {args.out}")
        return 0

    spec = _grid_spec(args)
    graph, cloud, truth = gen_grid_graph(spec)
    a_hat = induced_attribute(cloud, graph)
    export_graph(graph, a_hat, None, args.out, format="json")
    truth_path = args.truth or str(Path(args.out).with_suffix(".truth.json"))
    _write_json(truth_path, {"spec": spec.to_dict(), **truth.to_dict()})
    print(
        f"[GEN] {spec.dim}-D grid: {graph.n_vertices} vertices, {graph.n_edges} edges, "
        f"{truth.region_count} corrected regions -> {args.out}"
    )
    return 0


def cmd_mapper(args: argparse.Namespace) -> int:
    cloud = load_point_cloud_csv(args.input, args.attribute_col)
    lens = LensSpec.parse(args.lens)
    config = _mapper_config(args)
    print(f"[MAPPER] {cloud.n_points} points x {cloud.dim} features, lens {lens.label}")

    graph = build_mapper(cloud, eval_lens(lens, cloud), config)
    a_hat = induced_attribute(cloud, graph)
    export_graph(graph, a_hat, edge_gradient(graph, a_hat), args.out, format="json")
    print(f"[MAPPER] {graph.n_vertices} vertices, {graph.n_edges} edges -> {args.out}")
    return 0


def cmd_detect(args: argparse.Namespace) -> int:
    graph, a_hat, grad = import_graph(args.graph)
    config = _hotspot_config(args)
    tree = graph_dendrogram(graph, grad)
    if args.dendrogram:
        export_dendrogram(tree, args.dendrogram)
        print(f"[DETECT] dendrogram ({len(tree.merges)} merges) -> {args.dendrogram}")

    report = detect_hotspots(graph, a_hat, config, tree=tree)
    export_report(report, args.out)
    VerbosePrinter(enabled=args.verbose).print_report(report)
    counts = report.verdict_counts
    print(
        f"[DETECT] tau={report.tau:.6g}: {len(report.assessments)} candidates, "
        f"{counts['hotspot']} hotspots -> {args.out}"
    )
    return 0


def cmd_search(args: argparse.Namespace) -> int:
    cloud = load_point_cloud_csv(args.input, args.attribute_col)
    family = SamplerConfig.from_name(args.family, seed=args.seed)
    if args.sparsity is not None:
        family.sparsity = args.sparsity
    family.quad_terms = args.quad_terms
    # re-validate after overrides
    family = SamplerConfig.from_dict(family.to_dict())

    config = SearchConfig(
        trials=args.trials,
        lens_family=family,
        mapper=_mapper_config(args),
        hotspot=_hotspot_config(args),
        master_seed=args.seed,
        score=args.score,
    )
    logger = SearchLogger(args.log_dir) if args.log_dir else None
    printer = VerbosePrinter(enabled=args.verbose)

    results = run_lens_search(cloud, config, workers=args.workers, logger=logger, printer=printer)
    printer.print_top_trials(results, args.top)
    _write_json(args.out, results_to_dict(results, config))

    failed = sum(1 for r in results if r.failed)
    with_hotspots = sum(1 for r in results if r.hotspot_members)
    print(
        f"[SEARCH] {len(results)} trials ({failed} failed), {with_hotspots} with hotspots -> {args.out}"
    )
    for result in results[: args.top]:
        lens = result.lens.label if result.lens else "-"
        print(f"  trial {result.trial_index}: score {result.score:.6g}, lens {lens}")
    if logger is not None:
        print(f"[SEARCH] trial log: {logger.log_file_path}")
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    graph, a_hat, grad = import_graph(args.graph)
    report = import_report(args.report) if args.report else None
    export_graph(graph, a_hat, grad, args.out, format=args.format, report=report)
    print(f"[EXPORT] {args.format} -> {args.out}")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with EXIT_DOMAIN; argparse's own status 2 is EXIT_IO here."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_DOMAIN, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="hotmapper",
        description="Mapper graphs, hotspot detection and random lens search.",
        epilog=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    commands = parser.add_subparsers(dest="command", required=True)
    seed_default = _env_int("HOTMAPPER_SEED", 0)

    gen = commands.add_parser("gen", help="Generate a synthetic dataset.")
    gen.add_argument("kind", choices=("two-circles", "grid2d", "grid3d", "planted"))
    gen.add_argument("--out", required=True, help="CSV (two-circles, planted) or graph JSON (grids).")
    gen.add_argument("--truth", default=None, help="Ground-truth JSON (default: <out>.truth.json).")
    gen.add_argument("--seed", type=int, default=seed_default)
    gen.add_argument("--n-points", type=int, default=None, help="Points (two-circles) or samples (planted).")
    gen.add_argument("--noise", type=float, default=0.16, help="Radial jitter for two-circles.")
    gen.add_argument("--n-features", type=int, default=50)
    gen.add_argument("--blob-size", type=int, default=15)
    gen.add_argument("--support", type=int, default=5, help="Features carrying the planted shift.")
    gen.add_argument("--shift", type=float, default=4.0)
    gen.add_argument("--step", type=float, default=None, help="Grid spacing override.")
    gen.add_argument("--extra-edges", type=int, default=0, help="Random long-range grid edges.")
    gen.add_argument("--noise-scale", type=float, default=0.1, help="Grid attribute noise U[0, s].")
    gen.add_argument("--correction", type=float, default=1.0)
    gen.set_defaults(handler=cmd_gen)

    mapper = commands.add_parser("mapper", help="Build a Mapper graph from a point-cloud CSV.")
    _add_input_flags(mapper)
    mapper.add_argument(
        "--lens",
        default="l2_norm",
        help="l2_norm, std_dev, min_value or coordinate:J (default: l2_norm).",
    )
    _add_mapper_flags(mapper)
    mapper.add_argument("--out", required=True, help="Graph JSON output path.")
    mapper.set_defaults(handler=cmd_mapper)

    detect = commands.add_parser("detect", help="Detect hotspots on a graph JSON.")
    detect.add_argument("--graph", required=True, help="Graph JSON from `mapper` or `gen grid*`.")
    _add_detect_flags(detect)
    detect.add_argument("--out", required=True, help="Hotspot report JSON output path.")
    detect.add_argument("--dendrogram", default=None, help="Also write the merge tree JSON here.")
    detect.add_argument("--verbose", action="store_true", help="Print the candidate table.")
    detect.set_defaults(handler=cmd_detect)

    search = commands.add_parser("search", help="Random lens search with hotspot scoring.")
    _add_input_flags(search)
    search.add_argument("--trials", type=int, default=1000)
    search.add_argument("--family", choices=LENS_FAMILY_NAMES, default="linear")
    search.add_argument(
        "--sparsity",
        type=float,
        default=None,
        help="Fraction of linear coefficients set to zero (default: 0, or 0.9 for *-subset).",
    )
    search.add_argument("--quad-terms", type=int, default=None, help="Quadratic terms (default: ceil(dim/10)).")
    search.add_argument("--seed", type=int, default=seed_default, help="Master seed.")
    search.add_argument("--score", choices=SCORE_CRITERIA, default="max_heterogeneity")
    search.add_argument("--top", type=int, default=3, help="Best trials to print.")
    search.add_argument("--workers", type=int, default=_env_int("HOTMAPPER_WORKERS", 1))
    search.add_argument(
        "--log-dir",
        default=os.environ.get("HOTMAPPER_LOG_DIR") or None,
        help="Directory for the JSONL trial log (default: HOTMAPPER_LOG_DIR, unset = none).",
    )
    _add_mapper_flags(search)
    _add_detect_flags(search)
    search.add_argument("--out", required=True, help="Search results JSON output path.")
    search.add_argument("--verbose", action="store_true", help="Print per-trial progress.")
    search.set_defaults(handler=cmd_search)

    export = commands.add_parser("export", help="Re-export a graph as JSON or DOT.")
    export.add_argument("--graph", required=True)
    export.add_argument("--report", default=None, help="Hotspot report; outlines hotspot vertices.")
    export.add_argument("--format", choices=("json", "dot"), default="json")
    export.add_argument("--out", required=True)
    export.set_defaults(handler=cmd_export)

    return parser


def main(argv: list[str] | None = None) -> int:
    # .env must be loaded before argparse defaults read the environment.
    load_dotenv()
    logging.basicConfig(
        level=os.environ.get("HOTMAPPER_LOG_LEVEL", "WARNING").upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (DomainError, PointCloudLoadError) as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except json.JSONDecodeError as e:
        print(f"ERROR: malformed JSON: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except (KeyError, TypeError, ValueError) as e:
        print(f"ERROR: malformed input: {e!r}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
