"""Report rendering: tables to delimited/markdown text, figures to SVG.

The renderer is a pure terminal stage: it reads analysis artifacts (JSON files
produced by the analyze/sample commands), renders every table in the exact
form the stats module computed (no re-rounding), and writes the whole report
atomically — either the complete output directory appears, or nothing does.

SVG was chosen for figures because it is self-contained, diffable text whose
structure tests can assert on.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
import os
import shutil
import tempfile
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Optional, Sequence

from pydantic import BaseModel, ConfigDict, model_validator

from . import __version__
from .model import MentionLensError
from .sampling import MentionCountSummary
from .stats import ContingencyTable, DeltaTable, DistributionTable, LeveneResult


class ReportError(MentionLensError):
    pass


class FigureKind(str, enum.Enum):
    RANK_COUNT_DISTRIBUTION = "RANK_COUNT_DISTRIBUTION"
    GROUPED_BARS = "GROUPED_BARS"


class Series(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    points: tuple[tuple[str, float], ...]


class FigureData(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: FigureKind
    series: tuple[Series, ...]
    title: str = ""
    x_label: str = ""
    y_label: str = ""
    log_x: bool = False
    log_y: bool = False

    @model_validator(mode="after")
    def _check_values(self) -> "FigureData":
        for series in self.series:
            for label, value in series.points:
                if not math.isfinite(value):
                    raise ValueError(f"non-finite value in series {series.name!r}")
                if self.log_y and value <= 0:
                    raise ValueError("log-scaled y axis requires positive values")
                if self.log_x and self.kind is FigureKind.RANK_COUNT_DISTRIBUTION:
                    if float(label) <= 0:
                        raise ValueError("log-scaled x axis requires positive ranks")
        return self


# ---------------------------------------------------------------------------
# figure construction
# ---------------------------------------------------------------------------


def render_distribution_figure(
    histogram: dict[int, int] | MentionCountSummary,
    name: str = "mentions",
) -> tuple[FigureData, str]:
    """Rank/count step curve from a mentions-per-software histogram.

    Software is ranked by mention count descending; the x axis is the rank on
    a log scale, the y axis the mention count. Blocks of equal counts render
    as their first and last rank, which preserves the step shape without one
    point per software.
    """
    if isinstance(histogram, MentionCountSummary):
        histogram = histogram.histogram
    if not histogram:
        raise ReportError("cannot render a distribution figure from an empty histogram")
    points: list[tuple[str, float]] = []
    rank = 1
    for count in sorted(histogram, reverse=True):
        block = histogram[count]
        if block < 1:
            raise ReportError("histogram multiplicities must be positive")
        points.append((str(rank), float(count)))
        if block > 1:
            points.append((str(rank + block - 1), float(count)))
        rank += block
    figure = FigureData(
        kind=FigureKind.RANK_COUNT_DISTRIBUTION,
        series=(Series(name=name, points=tuple(points)),),
        title=f"Mention counts per software ({name})",
        x_label="software rank (log)",
        y_label="mentions",
        log_x=True,
    )
    return figure, render_figure_svg(figure)


def render_comparison_figure(
    dists: Sequence[tuple[str, DistributionTable]],
    title: str = "Mention type comparison",
) -> tuple[FigureData, str]:
    """Grouped bars of percents per category, one group color per sample."""
    if not dists:
        raise ReportError("no distributions to compare")
    universe = dists[0][1].categories()
    for name, table in dists[1:]:
        if set(table.categories()) != set(universe):
            raise ReportError(
                f"distribution {name!r} covers a different category universe"
            )
    series = tuple(
        Series(
            name=name,
            points=tuple(
                (category, float(table.percent_of(category))) for category in universe
            ),
        )
        for name, table in dists
    )
    figure = FigureData(
        kind=FigureKind.GROUPED_BARS,
        series=series,
        title=title,
        x_label="category",
        y_label="percent",
    )
    return figure, render_figure_svg(figure)


# ---------------------------------------------------------------------------
# SVG rendering (hand-rolled, deterministic)
# ---------------------------------------------------------------------------

_PALETTE = ("#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2", "#9d755d")
_WIDTH, _HEIGHT = 640, 400
_MARGIN_LEFT, _MARGIN_RIGHT, _MARGIN_TOP, _MARGIN_BOTTOM = 70, 20, 40, 60


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def _esc(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def render_figure_svg(figure: FigureData) -> str:
    plot_w = _WIDTH - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = _HEIGHT - _MARGIN_TOP - _MARGIN_BOTTOM
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<title>{_esc(figure.title)}</title>',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_WIDTH / 2:.1f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{_esc(figure.title)}</text>',
    ]
    # axes
    x0, y0 = _MARGIN_LEFT, _HEIGHT - _MARGIN_BOTTOM
    x1, y1 = _WIDTH - _MARGIN_RIGHT, _MARGIN_TOP
    parts.append(
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>'
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>'
    )
    parts.append(
        f'<text x="{(x0 + x1) / 2:.1f}" y="{_HEIGHT - 16}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{_esc(figure.x_label)}</text>'
    )
    parts.append(
        f'<text x="18" y="{(y0 + y1) / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 18 {(y0 + y1) / 2:.1f})">{_esc(figure.y_label)}</text>'
    )

    if figure.kind is FigureKind.RANK_COUNT_DISTRIBUTION:
        parts.extend(_render_rank_curve(figure, x0, y0, plot_w, plot_h))
    else:
        parts.extend(_render_grouped_bars(figure, x0, y0, plot_w, plot_h))

    # legend
    for i, series in enumerate(figure.series):
        color = _PALETTE[i % len(_PALETTE)]
        lx = x0 + 8 + i * 140
        parts.append(
            f'<rect x="{lx}" y="{y1 - 6}" width="10" height="10" fill="{color}"/>'
            f'<text x="{lx + 14}" y="{y1 + 3}" font-family="sans-serif" '
            f'font-size="11">{_esc(series.name)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _value_to_y(value: float, v_max: float, log_y: bool, y0: int, plot_h: int) -> float:
    if log_y:
        top = math.log10(v_max) if v_max > 1 else 1.0
        frac = math.log10(value) / top if top else 0.0
    else:
        frac = value / v_max if v_max else 0.0
    return y0 - frac * plot_h


def _render_rank_curve(
    figure: FigureData, x0: int, y0: int, plot_w: int, plot_h: int
) -> list[str]:
    parts = []
    all_values = [v for s in figure.series for _, v in s.points]
    all_ranks = [float(lbl) for s in figure.series for lbl, _ in s.points]
    v_max = max(all_values)
    r_max = max(all_ranks)

    def rank_to_x(rank: float) -> float:
        if figure.log_x:
            span = math.log10(r_max) if r_max > 1 else 1.0
            frac = math.log10(rank) / span if span else 0.0
        else:
            frac = (rank - 1) / (r_max - 1) if r_max > 1 else 0.0
        return x0 + frac * plot_w

    # x ticks at powers of ten
    tick = 1.0
    while tick <= r_max:
        tx = rank_to_x(tick)
        parts.append(
            f'<line x1="{tx:.1f}" y1="{y0}" x2="{tx:.1f}" y2="{y0 + 5}" stroke="black"/>'
            f'<text x="{tx:.1f}" y="{y0 + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{_fmt(tick)}</text>'
        )
        tick *= 10
    # y ticks at 0, half, max
    for frac in (0.0, 0.5, 1.0):
        vy = y0 - frac * plot_h
        parts.append(
            f'<line x1="{x0 - 5}" y1="{vy:.1f}" x2="{x0}" y2="{vy:.1f}" stroke="black"/>'
            f'<text x="{x0 - 8}" y="{vy + 4:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{_fmt(frac * v_max)}</text>'
        )
    for i, series in enumerate(figure.series):
        color = _PALETTE[i % len(_PALETTE)]
        coords = " ".join(
            f"{rank_to_x(float(lbl)):.2f},{_value_to_y(v, v_max, figure.log_y, y0, plot_h):.2f}"
            for lbl, v in series.points
        )
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
    return parts


def _render_grouped_bars(
    figure: FigureData, x0: int, y0: int, plot_w: int, plot_h: int
) -> list[str]:
    parts = []
    categories = [lbl for lbl, _ in figure.series[0].points]
    v_max = max((v for s in figure.series for _, v in s.points), default=0.0) or 1.0
    n_groups = len(categories)
    n_series = len(figure.series)
    group_w = plot_w / n_groups if n_groups else plot_w
    bar_w = group_w * 0.8 / n_series

    for g, category in enumerate(categories):
        gx = x0 + g * group_w
        parts.append(
            f'<text x="{gx + group_w / 2:.1f}" y="{y0 + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{_esc(category)}</text>'
        )
        for s, series in enumerate(figure.series):
            value = series.points[g][1]
            color = _PALETTE[s % len(_PALETTE)]
            bx = gx + group_w * 0.1 + s * bar_w
            by = y0 - (value / v_max) * plot_h
            parts.append(
                f'<rect x="{bx:.2f}" y="{by:.2f}" width="{bar_w:.2f}" '
                f'height="{y0 - by:.2f}" fill="{color}">'
                f"<title>{_esc(series.name)} {_esc(category)}: {_fmt(value)}</title></rect>"
            )
    for frac in (0.0, 0.5, 1.0):
        vy = y0 - frac * plot_h
        parts.append(
            f'<line x1="{x0 - 5}" y1="{vy:.1f}" x2="{x0}" y2="{vy:.1f}" stroke="black"/>'
            f'<text x="{x0 - 8}" y="{vy + 4:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{_fmt(frac * v_max)}</text>'
        )
    return parts


# ---------------------------------------------------------------------------
# table rendering
# ---------------------------------------------------------------------------


def distribution_to_csv(table: DistributionTable, name: str = "category") -> str:
    lines = [f"{name},count,percent"]
    for row in table.rows:
        lines.append(f"{row.category},{row.count},{row.percent}")
    lines.append(f"TOTAL,{table.total},")
    return "\n".join(lines) + "\n"


def distribution_to_md(table: DistributionTable, name: str = "Category") -> str:
    lines = [f"| {name} | n | % |", "|---|---:|---:|"]
    for row in table.rows:
        lines.append(f"| {row.category} | {row.count} | {row.percent} |")
    lines.append(f"| **Total** | {table.total} | |")
    return "\n".join(lines) + "\n"


def contingency_to_csv(table: ContingencyTable) -> str:
    header = ["license_category"] + list(table.column_categories) + ["total", "percent"]
    lines = [",".join(header)]
    for r, row_category in enumerate(table.row_categories):
        cells = [str(v) for v in table.cells[r]]
        lines.append(
            ",".join(
                [row_category]
                + cells
                + [str(table.row_totals[r]), str(table.row_total_percents[r])]
            )
        )
    lines.append(
        ",".join(
            ["TOTAL"]
            + [str(v) for v in table.column_totals]
            + [str(table.grand_total), ""]
        )
    )
    return "\n".join(lines) + "\n"


def contingency_to_md(table: ContingencyTable) -> str:
    header = (
        "| License | "
        + " | ".join(table.column_categories)
        + " | Total |"
    )
    rule = "|---|" + "---:|" * (len(table.column_categories) + 1)
    lines = [header, rule]
    for r, row_category in enumerate(table.row_categories):
        cells = [
            f"{count} ({percent})"
            for count, percent in zip(table.cells[r], table.cell_percents[r])
        ]
        lines.append(
            f"| {row_category} | "
            + " | ".join(cells)
            + f" | {table.row_totals[r]} ({table.row_total_percents[r]}) |"
        )
    lines.append(
        "| **Total** | "
        + " | ".join(str(v) for v in table.column_totals)
        + f" | {table.grand_total} |"
    )
    return "\n".join(lines) + "\n"


def delta_to_csv(table: DeltaTable) -> str:
    lines = ["category,count,percent,baseline_count,baseline_percent,delta"]
    for row in table.rows:
        lines.append(
            f"{row.category},{row.count},{row.percent},"
            f"{row.baseline_count},{row.baseline_percent},{row.delta:+}"
        )
    return "\n".join(lines) + "\n"


def delta_to_md(table: DeltaTable) -> str:
    lines = [
        "| Category | n | % | baseline n | baseline % | Δ points |",
        "|---|---:|---:|---:|---:|---:|",
    ]
    for row in table.rows:
        lines.append(
            f"| {row.category} | {row.count} | {row.percent} | "
            f"{row.baseline_count} | {row.baseline_percent} | {row.delta:+} |"
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# artifacts and report emission
# ---------------------------------------------------------------------------


class Analysis(BaseModel):
    """One analysis artifact: a kind tag, the payload, and where it came from."""

    model_config = ConfigDict(frozen=True)

    name: str
    kind: str
    payload: dict
    provenance: dict = {}


class RenderedReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    out_dir: str
    files: tuple[str, ...]
    provenance: dict


def write_analysis(path: str | Path, analysis: Analysis) -> None:
    Path(path).write_text(analysis.model_dump_json(indent=2) + "\n", encoding="utf-8")


def load_analyses(analysis_dir: str | Path) -> list[Analysis]:
    analysis_dir = Path(analysis_dir)
    if not analysis_dir.is_dir():
        raise ReportError(f"{analysis_dir} is not a directory")
    analyses = []
    for path in sorted(analysis_dir.glob("*.json")):
        try:
            data = json.loads(path.read_text("utf-8"))
            # the filename is authoritative, so copies and renames stay distinct
            analyses.append(Analysis.model_validate({**data, "name": path.stem}))
        except (ValueError, TypeError) as exc:
            raise ReportError(f"{path} is not a readable analysis artifact: {exc}")
    return analyses


_TABLE_KINDS = {
    "distribution": (DistributionTable, distribution_to_csv, distribution_to_md),
    "cluster_distribution": (
        DistributionTable,
        distribution_to_csv,
        distribution_to_md,
    ),
    "delta": (DeltaTable, delta_to_csv, delta_to_md),
    "contingency": (ContingencyTable, contingency_to_csv, contingency_to_md),
}


def _render_one(analysis: Analysis, formats: Sequence[str]) -> dict[str, str]:
    """Filename → content for one artifact, honoring the format filter."""
    out: dict[str, str] = {}
    if analysis.kind in _TABLE_KINDS:
        model, to_csv, to_md = _TABLE_KINDS[analysis.kind]
        table = model.model_validate(analysis.payload)
        if "csv" in formats:
            out[f"{analysis.name}.csv"] = to_csv(table)
        if "md" in formats:
            out[f"{analysis.name}.md"] = to_md(table)
    elif analysis.kind == "figure":
        figure = FigureData.model_validate(analysis.payload)
        if "svg" in formats:
            out[f"{analysis.name}.svg"] = render_figure_svg(figure)
    elif analysis.kind == "mention_count_summary":
        summary = MentionCountSummary.model_validate(analysis.payload)
        if summary.histogram and "svg" in formats:
            figure, svg = render_distribution_figure(
                summary.histogram, name=analysis.name
            )
            out[f"{analysis.name}.svg"] = svg
        if "csv" in formats:
            lines = ["statistic,value"]
            for field in (
                "n_mentions",
                "n_software",
                "max_count",
                "share_single",
                "share_over_10",
                "share_over_50",
            ):
                lines.append(f"{field},{getattr(summary, field)}")
            out[f"{analysis.name}.csv"] = "\n".join(lines) + "\n"
    elif analysis.kind == "levene":
        result = LeveneResult.model_validate(analysis.payload)
        if "csv" in formats:
            out[f"{analysis.name}.csv"] = (
                "F,df_between,df_within,p\n"
                f"{_fmt(result.F)},{result.df_between},{result.df_within},{_fmt(result.p)}\n"
            )
    else:
        # unknown kinds are copied through as JSON so nothing silently vanishes
        out[f"{analysis.name}.json"] = json.dumps(
            analysis.payload, indent=2, sort_keys=True
        ) + "\n"
    return out


def emit_report(
    analyses: Iterable[Analysis],
    out_dir: str | Path,
    formats: Sequence[str] = ("svg", "csv", "md"),
    force: bool = False,
    input_hashes: Optional[dict[str, str]] = None,
) -> RenderedReport:
    """Render all artifacts into ``out_dir`` atomically.

    Everything is rendered into a temporary sibling directory first and only
    then moved into place, so a failure partway leaves no partial report. An
    existing destination is only replaced with ``force=True``.
    """
    out_dir = Path(out_dir)
    if out_dir.exists() and any(out_dir.iterdir()) and not force:
        raise ReportError(f"{out_dir} exists and is not empty (use force to replace)")
    out_dir.parent.mkdir(parents=True, exist_ok=True)

    files: dict[str, str] = {}
    seeds: dict[str, object] = {}
    provenance_in: dict[str, dict] = {}
    for analysis in analyses:
        rendered = _render_one(analysis, formats)
        collision = set(rendered) & set(files)
        if collision:
            raise ReportError(f"duplicate output names: {sorted(collision)}")
        files.update(rendered)
        if analysis.provenance:
            provenance_in[analysis.name] = analysis.provenance
            if "seed" in analysis.provenance:
                seeds[analysis.name] = analysis.provenance["seed"]

    provenance = {
        "tool": "mention-lens",
        "version": __version__,
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "inputs": input_hashes or {},
        "artifact_provenance": provenance_in,
        "seeds": seeds,
        "files": {
            name: hashlib.sha256(content.encode("utf-8")).hexdigest()
            for name, content in sorted(files.items())
        },
    }

    staging = Path(
        tempfile.mkdtemp(prefix=out_dir.name + ".", dir=out_dir.parent)
    )
    try:
        for name, content in files.items():
            (staging / name).write_text(content, encoding="utf-8", newline="")
        (staging / "manifest.json").write_text(
            json.dumps(provenance, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        if out_dir.exists():
            shutil.rmtree(out_dir)
        os.replace(staging, out_dir)
    except BaseException:
        shutil.rmtree(staging, ignore_errors=True)
        raise
    return RenderedReport(
        out_dir=str(out_dir),
        files=tuple(sorted(files) + ["manifest.json"]),
        provenance=provenance,
    )


def hash_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()
