"""Command-line interface.

Batch commands (ingest, sample, analyze, report, iaa) call the library
directly and stream where the underlying operation streams. The annotation
commands manage campaign directories; ``annotate serve`` starts the local API
the companion UI talks to, and ``annotate status`` can read progress from a
running server instead of the directory.
"""

from __future__ import annotations

import json
import sys
from collections import Counter
from pathlib import Path
from typing import Optional

import click

from . import __version__
from .annotation import (
    AGREEMENT_LAYERS,
    CampaignStore,
    DEFAULT_LAYERS,
    read_annotated_sheet,
)
from .headermap import load_header_map
from .ingest import (
    Collection,
    IngestError,
    RejectSink,
    ReportBuilder,
    explode_csm,
    ingest_czi_raw,
    merge_linked,
    normalize_software_key,
    read_csm_rows,
    read_czi_rows,
    read_link_rows,
    read_mentions,
    write_links,
    write_mentions,
)
from .model import MentionLensError
from .report import (
    Analysis,
    contingency_to_md,
    delta_to_md,
    distribution_to_md,
    emit_report,
    hash_file,
    load_analyses,
    write_analysis,
)
from .sampling import (
    SampleResult,
    mention_count_distribution,
    one_per_software,
    simple_random_sample,
    stratified_proportionate_sample,
)
from .stats import (
    BASELINE_HOWISON2015,
    cluster_distribution,
    compare_to_baseline,
    extraction_and_entity_stats,
    krippendorff_alpha,
    levene_test,
    link_quality_stats,
    mention_type_by_license,
    mention_type_distribution,
)


@click.group()
@click.version_option(version=__version__, prog_name="mention-lens")
def cli() -> None:
    """Software-mention dataset toolkit: ingest, sample, annotate, analyze."""


def _fail(message: str) -> None:
    raise click.ClickException(message)


# ---------------------------------------------------------------------------
# ingest
# ---------------------------------------------------------------------------


@cli.command()
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["csm", "czi-raw", "czi-linked"]),
    required=True,
    help="Input dataset shape.",
)
@click.option(
    "--input",
    "inputs",
    multiple=True,
    required=True,
    help="Input file; for czi-raw use COLLECTION=PATH "
    "(collections: commercial, non_commercial, publishers).",
)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--reject-log", "reject_log", type=click.Path(), default=None)
@click.option("--header-map", "header_map_path", type=click.Path(exists=True), default=None)
@click.option("--report", "report_path", type=click.Path(), default=None)
def ingest(
    fmt: str,
    inputs: tuple[str, ...],
    out_path: str,
    reject_log: Optional[str],
    header_map_path: Optional[str],
    report_path: Optional[str],
) -> None:
    """Convert raw dataset dumps into the canonical mention (or link) table."""
    header_map = load_header_map(header_map_path) if header_map_path else {}
    report = ReportBuilder()
    reject_stream = open(reject_log, "w", encoding="utf-8") if reject_log else None
    sink = RejectSink(stream=reject_stream)
    try:
        if fmt == "csm":
            if len(inputs) != 1:
                _fail("csm ingest takes exactly one --input file")
            records = explode_csm(read_csm_rows(inputs[0], header_map), report, sink)
            written = write_mentions(out_path, records)
        elif fmt == "czi-raw":
            streams = []
            for item in inputs:
                if "=" not in item:
                    _fail(
                        "czi-raw inputs must look like COLLECTION=PATH, e.g. "
                        "commercial=comm.csv"
                    )
                name, path = item.split("=", 1)
                try:
                    collection = Collection(name.strip().upper())
                except ValueError:
                    _fail(f"unknown collection {name!r}")
                streams.append(read_czi_rows(path, collection, header_map))

            def chained():
                for stream in streams:
                    yield from stream

            records = ingest_czi_raw(chained(), report, sink)
            written = write_mentions(out_path, records)
        else:  # czi-linked
            if len(inputs) != 1:
                _fail("czi-linked ingest takes exactly one --input file")
            links = read_link_rows(inputs[0], header_map)
            written = write_links(out_path, links)
            report.rows_read = report.rows_accepted = written
    except (IngestError, OSError) as exc:
        _fail(str(exc))
    finally:
        if reject_stream is not None:
            reject_stream.close()

    built = report.build()
    if report_path:
        Path(report_path).write_text(built.model_dump_json(indent=2) + "\n", "utf-8")
    click.echo(
        f"rows read {built.rows_read}, accepted {built.rows_accepted}, "
        f"rejected {built.rows_rejected}; wrote {written} rows to {out_path}"
        + (f" ({built.distinct_software} distinct software)" if fmt != "czi-linked" else "")
    )
    if sink.count:
        click.echo(f"{sink.count} rows rejected" + (f"; see {reject_log}" if reject_log else ""))


# ---------------------------------------------------------------------------
# sample
# ---------------------------------------------------------------------------


@cli.command()
@click.option(
    "--strategy",
    type=click.Choice(["simple", "stratified", "one-per-software"]),
    required=True,
)
@click.option("--n", "n", type=int, default=None)
@click.option("--seed", type=int, required=True)
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--stratum-key", default="software_key", show_default=True)
@click.option("--min-per-stratum", type=int, default=0, show_default=True)
@click.option("--report", "report_path", type=click.Path(), default=None)
@click.option(
    "--levene",
    is_flag=True,
    help="Compare mentions-per-software spread, full population vs sample.",
)
def sample(
    strategy: str,
    n: Optional[int],
    seed: int,
    in_path: str,
    out_path: str,
    stratum_key: str,
    min_per_stratum: int,
    report_path: Optional[str],
    levene: bool,
) -> None:
    """Draw a reproducible sample from a canonical mention table."""
    population = list(read_mentions(in_path))
    try:
        if strategy == "simple":
            if n is None:
                _fail("--n is required for simple sampling")
            result = simple_random_sample(population, n, seed)
        elif strategy == "stratified":
            if n is None:
                _fail("--n is required for stratified sampling")
            result = stratified_proportionate_sample(
                population, n, seed, stratum_key=stratum_key,
                min_per_stratum=min_per_stratum,
            )
        else:
            result = one_per_software(population, seed)
    except MentionLensError as exc:
        _fail(str(exc))
    extra = {
        "sample_strategy": result.spec.strategy.value,
        "sample_seed": str(result.spec.seed),
    }
    write_mentions(out_path, result.records, extra_columns=extra)
    click.echo(
        f"sampled {len(result.records)} of {result.population_size} mentions "
        f"({result.spec.strategy.value}, seed {seed}) into {out_path}"
    )
    if report_path:
        Path(report_path).write_text(
            result.model_dump_json(indent=2, exclude={"records"}) + "\n", "utf-8"
        )
    if levene:
        full_counts = list(
            Counter(
                normalize_software_key(r.software_raw).key for r in population
            ).values()
        )
        sample_counts = list(
            Counter(
                normalize_software_key(r.software_raw).key for r in result.records
            ).values()
        )
        if len(full_counts) < 2 or len(sample_counts) < 2:
            _fail("Levene comparison needs at least two software keys per group")
        outcome = levene_test([full_counts, sample_counts])
        click.echo(
            f"Levene: F({outcome.df_between},{outcome.df_within}) = "
            f"{outcome.F:.4g}, p = {outcome.p:.4g}"
        )


# ---------------------------------------------------------------------------
# iaa
# ---------------------------------------------------------------------------


def _matrices_from_sheets(paths: tuple[str, ...], layer_names: list[str]):
    """(units × annotators) matrix per layer from one or more sheet files."""
    cells: dict[str, dict[tuple[str, str], Optional[str]]] = {
        name: {} for name in layer_names
    }
    unit_order: list[str] = []
    annotators: list[str] = []
    bool_layers = {
        layer.name for layer in DEFAULT_LAYERS if layer.kind.value == "bool"
    }
    for path in paths:
        annotated, _ = read_annotated_sheet(path)
        for item in annotated:
            if item.mention.mention_id not in unit_order:
                unit_order.append(item.mention.mention_id)
            for record in item.annotations:
                if record.annotator_id not in annotators:
                    annotators.append(record.annotator_id)
                for name in layer_names:
                    value = getattr(record, name, None)
                    if name in bool_layers and value is not None:
                        value = "Y" if value else "N"
                    elif value is not None:
                        value = str(value)
                    cells[name][(item.mention.mention_id, record.annotator_id)] = value
    matrices = {}
    for name in layer_names:
        matrices[name] = [
            [cells[name].get((unit, annotator)) for annotator in annotators]
            for unit in unit_order
        ]
    return matrices, annotators


@cli.command()
@click.option("--layers", default=",".join(AGREEMENT_LAYERS), show_default=True)
@click.option(
    "--in",
    "in_paths",
    multiple=True,
    required=True,
    type=click.Path(exists=True),
    help="Annotation sheet file(s); repeat for multiple annotators' sheets.",
)
@click.option(
    "--pooling",
    type=click.Choice(["concat", "mean"]),
    default="concat",
    show_default=True,
)
def iaa(layers: str, in_paths: tuple[str, ...], pooling: str) -> None:
    """Inter-annotator agreement (Krippendorff's alpha) per layer."""
    layer_names = [name.strip() for name in layers.split(",") if name.strip()]
    known = {layer.name for layer in DEFAULT_LAYERS}
    for name in layer_names:
        if name not in known:
            _fail(f"unknown layer {name!r}")
    matrices, annotators = _matrices_from_sheets(in_paths, layer_names)
    if len(annotators) < 2:
        _fail("agreement needs annotations from at least two annotators")
    pooled: list[list[Optional[str]]] = []
    alphas: list[float] = []
    click.echo(f"{'layer':<22} {'alpha':>7} {'units':>6} {'coders':>7}")
    for name in layer_names:
        matrix = matrices[name]
        pooled.extend(
            [None if v is None else f"{name}={v}" for v in row] for row in matrix
        )
        try:
            result = krippendorff_alpha(matrix, layer=name)
        except MentionLensError as exc:
            click.echo(f"{name:<22} {'--':>7} undefined: {exc}")
            continue
        alphas.append(result.alpha)
        click.echo(
            f"{name:<22} {result.alpha:>7.2f} {result.n_units:>6} {result.n_annotators:>7}"
        )
    try:
        if pooling == "concat":
            total = krippendorff_alpha(pooled, layer="all layers")
            click.echo(
                f"{'all layers':<22} {total.alpha:>7.2f} {total.n_units:>6} "
                f"{total.n_annotators:>7}"
            )
        elif alphas:
            click.echo(f"{'all layers (mean)':<22} {sum(alphas) / len(alphas):>7.2f}")
    except MentionLensError as exc:
        click.echo(f"{'all layers':<22} {'--':>7} undefined: {exc}")


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


@cli.command()
@click.argument(
    "what",
    type=click.Choice(["licenses", "mention-types", "links", "extraction", "counts"]),
)
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--since-year", type=int, default=None)
@click.option("--baseline", type=click.Choice(["howison2015"]), default=None)
@click.option("--links", "links_path", type=click.Path(exists=True), default=None)
@click.option(
    "--out",
    "out_dir",
    type=click.Path(),
    default=None,
    help="Directory for analysis artifacts (consumed by `report`).",
)
def analyze(
    what: str,
    in_path: str,
    since_year: Optional[int],
    baseline: Optional[str],
    links_path: Optional[str],
    out_dir: Optional[str],
) -> None:
    """Compute a published-style analysis over annotated (or raw) mentions."""
    artifacts: list[Analysis] = []
    provenance = {"input": in_path, "sha256": hash_file(in_path)}

    if what == "counts":
        summary = mention_count_distribution(read_mentions(in_path))
        artifacts.append(
            Analysis(
                name="mention_counts",
                kind="mention_count_summary",
                payload=json.loads(summary.model_dump_json()),
                provenance=provenance,
            )
        )
        click.echo(
            f"{summary.n_mentions} mentions of {summary.n_software} distinct software; "
            f"max {summary.max_count} mentions; "
            f"{summary.share_single:.1%} of software mentioned exactly once"
        )
    else:
        try:
            annotated, unannotated = read_annotated_sheet(in_path)
        except MentionLensError as exc:
            _fail(str(exc))
        if what == "licenses":
            table = mention_type_by_license(annotated)
            artifacts.append(
                Analysis(
                    name="license_by_type",
                    kind="contingency",
                    payload=json.loads(table.model_dump_json()),
                    provenance=provenance,
                )
            )
            click.echo(contingency_to_md(table), nl=False)
        elif what == "mention-types":
            provenance["since_year"] = since_year
            dist = mention_type_distribution(annotated, since_year=since_year)
            artifacts.append(
                Analysis(
                    name="mention_types",
                    kind="distribution",
                    payload=json.loads(dist.model_dump_json()),
                    provenance=provenance,
                )
            )
            clusters = cluster_distribution(dist)
            artifacts.append(
                Analysis(
                    name="mention_type_clusters",
                    kind="cluster_distribution",
                    payload=json.loads(clusters.model_dump_json()),
                    provenance=provenance,
                )
            )
            click.echo(distribution_to_md(dist, name="Type"), nl=False)
            click.echo(distribution_to_md(clusters, name="Cluster"), nl=False)
            if baseline:
                deltas = compare_to_baseline(dist, BASELINE_HOWISON2015)
                artifacts.append(
                    Analysis(
                        name="baseline_deltas",
                        kind="delta",
                        payload=json.loads(deltas.model_dump_json()),
                        provenance=dict(provenance, baseline=baseline),
                    )
                )
                click.echo(delta_to_md(deltas), nl=False)
        elif what == "links":
            if not links_path:
                _fail("links analysis needs --links LINKS.csv")
            mentions = [item.mention for item in annotated]
            joined, merge_report = merge_linked(mentions, read_link_rows(links_path))
            stats = link_quality_stats(joined, annotated)
            artifacts.append(
                Analysis(
                    name="link_quality",
                    kind="link_stats",
                    payload=json.loads(stats.model_dump_json()),
                    provenance=dict(
                        provenance,
                        links=links_path,
                        links_sha256=hash_file(links_path),
                        merge=json.loads(merge_report.model_dump_json()),
                    ),
                )
            )
            for label, stat in (
                ("multi-target links", stats.multi_target),
                ("wrong-target links", stats.wrong_target),
                ("unlinked but linkable", stats.unlinked),
            ):
                shown = "undefined" if stat.rate is None else f"{stat.percent}%"
                click.echo(
                    f"{label}: {stat.numerator}/{stat.denominator} ({shown})"
                )
        else:  # extraction
            stats = extraction_and_entity_stats(annotated)
            artifacts.append(
                Analysis(
                    name="extraction_quality",
                    kind="extraction_stats",
                    payload=json.loads(stats.model_dump_json()),
                    provenance=provenance,
                )
            )
            for label, stat in (
                ("incorrectly extracted", stats.incorrect_extraction),
                ("not software", stats.not_software),
            ):
                shown = "undefined" if stat.rate is None else f"{stat.percent}%"
                click.echo(f"{label}: {stat.numerator}/{stat.denominator} ({shown})")
        if unannotated:
            click.echo(f"note: {unannotated} mentions carried no annotations")

    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for artifact in artifacts:
            write_analysis(out / f"{artifact.name}.json", artifact)
        click.echo(f"wrote {len(artifacts)} artifact(s) to {out_dir}")


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


@cli.command()
@click.option("--in", "in_dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--format", "formats", default="svg,csv,md", show_default=True)
@click.option("--force", is_flag=True, help="Replace an existing report directory.")
def report(in_dir: str, out_dir: str, formats: str, force: bool) -> None:
    """Render analysis artifacts into a report directory (tables + figures)."""
    wanted = [f.strip() for f in formats.split(",") if f.strip()]
    for fmt in wanted:
        if fmt not in ("svg", "csv", "md"):
            _fail(f"unknown format {fmt!r}")
    try:
        analyses = load_analyses(in_dir)
        input_hashes = {
            path.name: hash_file(path) for path in sorted(Path(in_dir).glob("*.json"))
        }
        rendered = emit_report(
            analyses, out_dir, formats=wanted, force=force, input_hashes=input_hashes
        )
    except MentionLensError as exc:
        _fail(str(exc))
    click.echo(f"wrote {len(rendered.files)} files to {rendered.out_dir}")


# ---------------------------------------------------------------------------
# annotate
# ---------------------------------------------------------------------------


@cli.group()
def annotate() -> None:
    """Manage annotation campaigns."""


@annotate.command("init")
@click.option("--campaign", "campaign_dir", required=True, type=click.Path())
@click.option("--sample", "sample_path", required=True, type=click.Path(exists=True))
@click.option("--annotators", required=True, help="Comma-separated annotator ids.")
@click.option("--id", "campaign_id", default=None, help="Campaign id (default: dir name).")
def annotate_init(
    campaign_dir: str, sample_path: str, annotators: str, campaign_id: Optional[str]
) -> None:
    """Create a campaign directory from a sampled mention table."""
    ids = [a.strip() for a in annotators.split(",") if a.strip()]
    mentions = list(read_mentions(sample_path))
    try:
        store = CampaignStore.create(
            campaign_dir,
            campaign_id or Path(campaign_dir).name,
            mentions,
            ids,
        )
    except MentionLensError as exc:
        _fail(str(exc))
    click.echo(
        f"campaign {store.meta.campaign_id!r}: {len(store.mentions)} mentions, "
        f"{len(store.meta.annotators)} annotator(s)"
    )


@annotate.command("export")
@click.option("--campaign", "campaign_dir", required=True, type=click.Path(exists=True))
@click.option("--annotator", required=True)
@click.option("--out", "out_path", type=click.Path(), default=None)
def annotate_export(campaign_dir: str, annotator: str, out_path: Optional[str]) -> None:
    """Write one annotator's sheet (header, legend, one row per mention)."""
    try:
        store = CampaignStore(campaign_dir)
        sheet = store.export_sheet(annotator)
    except MentionLensError as exc:
        _fail(str(exc))
    if out_path:
        Path(out_path).write_text(sheet, "utf-8")
        click.echo(f"wrote sheet for {annotator} to {out_path}")
    else:
        click.echo(sheet, nl=False)


@annotate.command("import")
@click.option("--campaign", "campaign_dir", required=True, type=click.Path(exists=True))
@click.option("--sheet", "sheet_path", required=True, type=click.Path(exists=True))
@click.option("--annotator", default=None, help="Annotator for rows without one.")
def annotate_import(campaign_dir: str, sheet_path: str, annotator: Optional[str]) -> None:
    """Validate and store a completed sheet; report per-row problems."""
    try:
        store = CampaignStore(campaign_dir)
        text = Path(sheet_path).read_text("utf-8")
        _, import_report = store.import_sheet(text, default_annotator=annotator)
    except MentionLensError as exc:
        _fail(str(exc))
    click.echo(
        f"{import_report.accepted} rows stored, {import_report.skipped_empty} empty, "
        f"{len(import_report.issues)} rejected"
    )
    for issue in import_report.issues:
        click.echo(
            f"  row {issue.row} ({issue.mention_id}): {issue.field} [{issue.rule}] "
            f"{issue.message}"
        )
    if import_report.issues:
        sys.exit(1)


@annotate.command("status")
@click.option("--campaign", "campaign_dir", type=click.Path(exists=True), default=None)
@click.option("--server", "server_url", default=None, help="Read from a running API.")
def annotate_status(campaign_dir: Optional[str], server_url: Optional[str]) -> None:
    """Progress per annotator, from the directory or from a running server."""
    if server_url:
        import httpx

        response = httpx.get(server_url.rstrip("/") + "/api/progress", timeout=10.0)
        response.raise_for_status()
        data = response.json()
        per_annotator = data["per_annotator"]
        sample_size = data["sample_size"]
    elif campaign_dir:
        store = CampaignStore(campaign_dir)
        per_annotator = store.progress()
        sample_size = len(store.mentions)
    else:
        _fail("pass --campaign DIR or --server URL")
    click.echo(f"{'annotator':<16} {'done':>5} {'skipped':>8} {'pending':>8}")
    for annotator, counts in per_annotator.items():
        click.echo(
            f"{annotator:<16} {counts['DONE']:>5} {counts['SKIPPED']:>8} "
            f"{counts['PENDING']:>8}"
        )
    click.echo(f"sample size {sample_size}")


@annotate.command("iaa")
@click.option("--campaign", "campaign_dir", required=True, type=click.Path(exists=True))
@click.option("--layers", default=None, help="Comma-separated layer names.")
@click.option(
    "--pooling",
    type=click.Choice(["concat", "mean"]),
    default="concat",
    show_default=True,
)
def annotate_iaa(campaign_dir: str, layers: Optional[str], pooling: str) -> None:
    """Agreement over the campaign's stored annotations."""
    try:
        store = CampaignStore(campaign_dir)
        selected = (
            [name.strip() for name in layers.split(",") if name.strip()]
            if layers
            else None
        )
        results = store.agreement(layers=selected, pooling=pooling)
    except MentionLensError as exc:
        _fail(str(exc))
    click.echo(f"{'layer':<22} {'alpha':>7} {'units':>6}")
    for item in results:
        if item.result is None:
            click.echo(f"{item.layer:<22} {'--':>7} {item.error}")
        else:
            click.echo(
                f"{item.layer:<22} {item.result.alpha:>7.2f} {item.result.n_units:>6}"
            )


@annotate.command("serve")
@click.option("--campaign", "campaign_dir", required=True, type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8377, show_default=True)
@click.option("--open", "open_browser", is_flag=True, help="Open the UI in a browser.")
def annotate_serve(campaign_dir: str, host: str, port: int, open_browser: bool) -> None:
    """Serve the annotation API (and the UI, if built) for this campaign."""
    import uvicorn

    from .server import create_app, default_static_dir

    try:
        store = CampaignStore(campaign_dir)
    except MentionLensError as exc:
        _fail(str(exc))
    app = create_app(store, static_dir=default_static_dir())
    if open_browser:
        import threading
        import webbrowser

        threading.Timer(
            0.8, lambda: webbrowser.open(f"http://{host}:{port}/")
        ).start()
    click.echo(f"serving campaign {store.meta.campaign_id!r} on http://{host}:{port}")
    uvicorn.run(app, host=host, port=port, log_level="warning")


def main() -> None:
    cli.main(prog_name="mention-lens")


if __name__ == "__main__":
    main()
