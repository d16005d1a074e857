"""
Verbose console output for the hotmapper CLI using rich.

Shows the search configuration, one line per trial, the best trials and the
per-candidate hotspot table. Uses a "Tokyo Night" inspired color theme.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

from rich.console import Console
from rich.panel import Panel
from rich.rule import Rule
from rich.style import Style
from rich.table import Table
from rich.text import Text

from hotmapper.core.types import PointCloud
from hotmapper.hotspot import HotspotReport

if TYPE_CHECKING:
    from hotmapper.search import SearchConfig, TrialResult

COLORS = {
    "primary": "#7AA2F7",
    "secondary": "#BB9AF7",
    "success": "#9ECE6A",
    "warning": "#E0AF68",
    "error": "#F7768E",
    "text": "#A9B1D6",
    "muted": "#565F89",
    "accent": "#7DCFFF",
    "border": "#3B4261",
}

STYLE_PRIMARY = Style(color=COLORS["primary"], bold=True)
STYLE_SECONDARY = Style(color=COLORS["secondary"])
STYLE_SUCCESS = Style(color=COLORS["success"])
STYLE_WARNING = Style(color=COLORS["warning"])
STYLE_ERROR = Style(color=COLORS["error"])
STYLE_TEXT = Style(color=COLORS["text"])
STYLE_MUTED = Style(color=COLORS["muted"])
STYLE_ACCENT = Style(color=COLORS["accent"], bold=True)

VERDICT_STYLES = {
    "hotspot": STYLE_SUCCESS,
    "too_small": STYLE_MUTED,
    "insufficient_size_contrast": STYLE_WARNING,
    "insufficient_heterogeneity": STYLE_TEXT,
}


def _fmt(value: float | None, digits: int = 4) -> str:
    if value is None:
        return "-"
    if not math.isfinite(value):
        return str(value)
    return f"{value:.{digits}g}"


class VerbosePrinter:
    """
    Rich console printer for search and detection output.

    Args:
        enabled: Whether verbose printing is enabled. If False, all methods are no-ops.
        console: Console to print to; a fresh stdout console when omitted.
    """

    def __init__(self, enabled: bool = True, console: Console | None = None):
        self.enabled = enabled
        self.console = (console or Console()) if enabled else None

    def print_search_header(self, config: SearchConfig, cloud: PointCloud, workers: int = 1) -> None:
        if not self.enabled:
            return

        title = Text()
        title.append("◆ ", style=STYLE_ACCENT)
        title.append("hotmapper", style=STYLE_PRIMARY)
        title.append(" ━ lens search", style=STYLE_MUTED)

        table = Table(show_header=False, show_edge=False, box=None, padding=(0, 2), expand=True)
        table.add_column("key", style=STYLE_MUTED, width=16)
        table.add_column("value", style=STYLE_TEXT)
        table.add_column("key2", style=STYLE_MUTED, width=16)
        table.add_column("value2", style=STYLE_TEXT)

        family = config.lens_family
        mapper = config.mapper
        hotspot = config.hotspot
        table.add_row(
            "Data",
            Text(f"{cloud.n_points} x {cloud.dim}", style=STYLE_SECONDARY),
            "Trials",
            Text(str(config.trials), style=STYLE_WARNING),
        )
        table.add_row(
            "Lens family",
            Text(f"{family.family} (sparsity {family.sparsity:g})", style=STYLE_ACCENT),
            "Seed",
            Text(str(config.master_seed), style=STYLE_WARNING),
        )
        table.add_row(
            "Cover",
            Text(f"{mapper.n_intervals} intervals, {mapper.overlap_pct:g}% overlap"),
            "Clustering",
            Text(f"{mapper.linkage}/{mapper.metric}, {mapper.clusters_per_interval} per interval"),
        )
        table.add_row(
            "Hotspots",
            Text(f"eps {hotspot.epsilon:g}, size {hotspot.size_mode} ({hotspot.size_contrast})"),
            "Workers",
            Text(str(workers), style=STYLE_WARNING),
        )

        self.console.print()
        self.console.print(
            Panel(table, title=title, title_align="left", border_style=COLORS["border"], padding=(1, 2))
        )
        self.console.print()

    def print_trial(self, result: TrialResult) -> None:
        if not self.enabled:
            return

        line = Text()
        line.append(f"  trial {result.trial_index:>5}  ", style=STYLE_MUTED)
        if result.failed:
            line.append("failed: ", style=STYLE_ERROR)
            line.append(result.error or "", style=STYLE_TEXT)
        else:
            hotspots = result.report.verdict_counts["hotspot"] if result.report else 0
            line.append(f"score {_fmt(result.score)}", style=STYLE_ACCENT)
            line.append(f"  hotspots {hotspots}", style=STYLE_SUCCESS if hotspots else STYLE_MUTED)
            if result.graph_summary is not None:
                summary = result.graph_summary
                line.append(
                    f"  graph {summary.n_vertices}v/{summary.n_edges}e/{summary.n_components}c",
                    style=STYLE_MUTED,
                )
        self.console.print(line)

    def print_top_trials(self, results: list[TrialResult], top: int) -> None:
        if not self.enabled:
            return

        table = Table(title=f"Top {min(top, len(results))} trials", title_style=STYLE_PRIMARY)
        table.add_column("trial", justify="right", style=STYLE_MUTED)
        table.add_column("score", justify="right", style=STYLE_ACCENT)
        table.add_column("hotspots", justify="right")
        table.add_column("points", justify="right")
        table.add_column("lens", style=STYLE_SECONDARY)
        for result in results[:top]:
            table.add_row(
                str(result.trial_index),
                _fmt(result.score),
                str(len(result.hotspot_members)),
                str(sum(len(m) for m in result.hotspot_members)),
                result.lens.label if result.lens else "-",
            )
        self.console.print(table)

    def print_report(self, report: HotspotReport, title: str = "Hotspot candidates") -> None:
        if not self.enabled:
            return

        self.console.print(Rule(Text(f" {title} ", style=STYLE_PRIMARY), style=COLORS["border"]))
        table = Table(show_edge=False, box=None, padding=(0, 2))
        for column in ("#", "vertices", "points", "a_hat", "a_hat(N)", "heterogeneity", "verdict"):
            table.add_column(column, justify="left" if column == "verdict" else "right")
        for index, assessment in enumerate(report.assessments):
            candidate = assessment.candidate
            table.add_row(
                str(index),
                str(candidate.size_nodes),
                str(candidate.size_points),
                _fmt(candidate.a_hat),
                _fmt(assessment.a_hat_neighbourhood),
                _fmt(assessment.heterogeneity),
                Text(assessment.verdict, style=VERDICT_STYLES[assessment.verdict]),
            )
        self.console.print(table)

        summary = Text()
        summary.append(f"tau {_fmt(report.tau, 6)}", style=STYLE_ACCENT)
        for measure, value in report.sigma2.items():
            summary.append(f"   sigma2[{measure}] {_fmt(value)}", style=STYLE_MUTED)
        summary.append(f"   hotspots {report.verdict_counts['hotspot']}", style=STYLE_SUCCESS)
        self.console.print(summary)
        self.console.print()
