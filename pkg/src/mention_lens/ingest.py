"""Dataset ingestion: publication-row and mention-row dumps to canonical mention tables.

Two shapes of input are handled:

* publication-row dumps ("csm" format), where every row is a publication and
  the mentions sit in a bracketed, quoted list field that has to be exploded;
* mention-row dumps ("czi-raw" format) split over collections, filtered to
  rows curated as software, plus a "czi-linked" table of repository URLs
  joined back on mention ids.

All readers stream, accept gzip-compressed files, and never abort on a bad
row: rejects go to a machine-readable sidecar and processing continues.
"""

from __future__ import annotations

import csv
import enum
import gzip
import io
import json
import re
import sys
from pathlib import Path
from typing import Callable, Iterable, Iterator, Optional, TextIO

from pydantic import BaseModel, ConfigDict

from .headermap import resolve
from .model import (
    LinkedRepoRecord,
    LinkSource,
    MatchBasis,
    MentionLensError,
    MentionRecord,
    SoftwareKey,
    SourceDataset,
)

csv.field_size_limit(sys.maxsize)


class IngestError(MentionLensError):
    """Configuration-level ingestion failure (bad schema, duplicate ids)."""


class MentionListParseError(MentionLensError):
    """The mention-list field does not parse; ``offset`` is the byte position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class DuplicateMentionIdError(IngestError):
    def __init__(self, mention_id: str, first: str, second: str):
        super().__init__(
            f"mention id {mention_id!r} appears twice: {first} and {second}"
        )
        self.mention_id = mention_id
        self.first = first
        self.second = second


class Collection(str, enum.Enum):
    COMMERCIAL = "COMMERCIAL"
    NON_COMMERCIAL = "NON_COMMERCIAL"
    PUBLISHERS = "PUBLISHERS"


COLLECTION_TO_DATASET = {
    Collection.COMMERCIAL: SourceDataset.CZI_COMM,
    Collection.NON_COMMERCIAL: SourceDataset.CZI_NC,
    Collection.PUBLISHERS: SourceDataset.CZI_PUB,
}

#: curation_label value that marks a row as an actual software mention
CURATED_SOFTWARE_LABEL = "software"


class PublicationRow(BaseModel):
    """One publication-row input record before explosion."""

    model_config = ConfigDict(frozen=True)

    identifiers: tuple[str, ...] = ()
    title: Optional[str] = None
    source: Optional[str] = None
    license: Optional[str] = None
    publish_time: Optional[str] = None
    journal: Optional[str] = None
    urls: tuple[str, ...] = ()
    software_list_raw: str = ""
    source_row: int = 0
    source_file: str = ""


class RawCziRow(BaseModel):
    """One mention-row input record from a named collection."""

    model_config = ConfigDict(frozen=True)

    mention_id: str
    paper_id: str
    software_raw: str
    text: Optional[str] = None
    curation_label: str = ""
    collection: Collection
    source_row: int = 0
    source_file: str = ""


class IngestReport(BaseModel):
    rows_read: int
    rows_accepted: int
    rows_rejected: int
    mentions_emitted: int
    distinct_software: int


class MergeReport(BaseModel):
    mentions: int
    link_rows: int
    matched_link_rows: int
    unmatched_link_rows: int
    mentions_with_links: int
    multi_target_mentions: int


class RejectSink:
    """Collects reject diagnostics; optionally mirrors them to a JSONL file."""

    def __init__(self, stream: Optional[TextIO] = None, keep: int = 1000):
        self._stream = stream
        self._keep = keep
        self.count = 0
        self.diagnostics: list[dict] = []

    def reject(self, source: str, row: int, reason: str, detail: str) -> None:
        diag = {"source": source, "row": row, "reason": reason, "detail": detail}
        self.count += 1
        if len(self.diagnostics) < self._keep:
            self.diagnostics.append(diag)
        if self._stream is not None:
            self._stream.write(json.dumps(diag, ensure_ascii=False) + "\n")


class ReportBuilder:
    """Accumulates ingest counts; merge is associative so partitions can be combined."""

    def __init__(self) -> None:
        self.rows_read = 0
        self.rows_accepted = 0
        self.rows_rejected = 0
        self.mentions_emitted = 0
        self._keys: set[str] = set()

    def saw_mention(self, software_raw: str) -> None:
        self.mentions_emitted += 1
        self._keys.add(normalize_software_key(software_raw).key)

    def merge(self, other: "ReportBuilder") -> None:
        self.rows_read += other.rows_read
        self.rows_accepted += other.rows_accepted
        self.rows_rejected += other.rows_rejected
        self.mentions_emitted += other.mentions_emitted
        self._keys |= other._keys

    def build(self) -> IngestReport:
        return IngestReport(
            rows_read=self.rows_read,
            rows_accepted=self.rows_accepted,
            rows_rejected=self.rows_rejected,
            mentions_emitted=self.mentions_emitted,
            distinct_software=len(self._keys),
        )


# ---------------------------------------------------------------------------
# mention-list parsing and cleaning
# ---------------------------------------------------------------------------

_QUOTES = "'\""


def clean_mention(s: str) -> str:
    """Trim and strip wrapping quote pairs; idempotent by construction."""
    t = s.strip()
    while len(t) >= 2 and t[0] == t[-1] and t[0] in _QUOTES:
        t = t[1:-1].strip()
    return t


def parse_mention_list(raw: str) -> list[str]:
    """Parse a bracketed, comma-separated, quoted list field into clean strings.

    Both quote characters are accepted; a doubled quote or a backslash escape
    inside a quoted element stands for a literal quote. Interior punctuation
    and case are preserved; empty elements are dropped.
    """
    i = 0
    n = len(raw)

    def skip_ws(pos: int) -> int:
        while pos < n and raw[pos].isspace():
            pos += 1
        return pos

    i = skip_ws(i)
    if i >= n or raw[i] != "[":
        raise MentionListParseError("expected '[' to open the list", i)
    i += 1

    elements: list[str] = []
    expecting_element = True
    while True:
        i = skip_ws(i)
        if i >= n:
            raise MentionListParseError("unclosed list: missing ']'", n)
        ch = raw[i]
        if ch == "]":
            i += 1
            break
        if ch == ",":
            if expecting_element:
                # tolerate empty slots like [,] or [a,,b]
                i += 1
                continue
            expecting_element = True
            i += 1
            continue
        if not expecting_element:
            raise MentionListParseError("expected ',' or ']' between elements", i)
        if ch in _QUOTES:
            quote = ch
            i += 1
            buf: list[str] = []
            closed = False
            while i < n:
                c = raw[i]
                if c == "\\" and i + 1 < n and raw[i + 1] in (quote, "\\"):
                    buf.append(raw[i + 1])
                    i += 2
                    continue
                if c == quote:
                    if i + 1 < n and raw[i + 1] == quote:
                        buf.append(quote)
                        i += 2
                        continue
                    i += 1
                    closed = True
                    break
                buf.append(c)
                i += 1
            if not closed:
                raise MentionListParseError(f"unterminated {quote} quote", i)
            element = "".join(buf)
        else:
            start = i
            while i < n and raw[i] not in ",]":
                i += 1
            if i >= n:
                raise MentionListParseError("unclosed list: missing ']'", start)
            element = raw[start:i]
        cleaned = clean_mention(element)
        if cleaned:
            elements.append(cleaned)
        expecting_element = False

    tail = skip_ws(i)
    if tail < n:
        raise MentionListParseError("trailing content after ']'", tail)
    return elements


def normalize_software_key(s: str) -> SoftwareKey:
    """Trim, collapse whitespace runs, case-fold; the dedup identity of a name."""
    collapsed = " ".join(s.split())
    if not collapsed:
        raise ValueError("software name is empty after trimming")
    return SoftwareKey(key=collapsed.casefold(), exemplar=collapsed)


# ---------------------------------------------------------------------------
# file readers (streaming, gzip-aware, header-mapped)
# ---------------------------------------------------------------------------


def open_text(path: str | Path) -> TextIO:
    path = Path(path)
    if path.suffix == ".gz":
        return io.TextIOWrapper(gzip.open(path, "rb"), encoding="utf-8", newline="")
    return open(path, encoding="utf-8", newline="")


_URL_SPLIT = re.compile(r"[;\s]+")


def _split_urls(field: str) -> tuple[str, ...]:
    return tuple(u for u in _URL_SPLIT.split(field.strip()) if u)


_YEAR = re.compile(r"(?<!\d)(\d{4})(?!\d)")


def extract_year(date_like: Optional[str]) -> Optional[int]:
    """First plausible 4-digit year in a date-like string, else None."""
    if not date_like:
        return None
    for m in _YEAR.finditer(date_like):
        year = int(m.group(1))
        if 1900 <= year <= 2100:
            return year
    return None


def _require_column(fieldnames: Iterable[str] | None, column: str, path: str) -> None:
    if fieldnames is None or column not in fieldnames:
        raise IngestError(f"{path}: required column {column!r} not found in header")


def read_csm_rows(
    path: str | Path, header_map: Optional[dict[str, str]] = None
) -> Iterator[PublicationRow]:
    """Stream publication rows from a csm-format delimited file."""
    header_map = header_map or {}
    col = lambda field: resolve(header_map, "csm", field)
    path = Path(path)
    with open_text(path) as fh:
        reader = csv.DictReader(_skip_comments(fh))
        _require_column(reader.fieldnames, col("software"), str(path))
        for row_index, row in enumerate(reader):
            get = lambda field: (row.get(col(field)) or "").strip()
            identifiers = tuple(v for v in (get("doi"),) if v)
            yield PublicationRow(
                identifiers=identifiers,
                title=get("title") or None,
                source=get("source") or None,
                license=get("license") or None,
                publish_time=get("publish_time") or None,
                journal=get("journal") or None,
                urls=_split_urls(get("url")),
                software_list_raw=row.get(col("software")) or "",
                source_row=row_index,
                source_file=path.name,
            )


def read_czi_rows(
    path: str | Path,
    collection: Collection,
    header_map: Optional[dict[str, str]] = None,
) -> Iterator[RawCziRow]:
    """Stream mention rows of one collection from a czi-raw-format file."""
    header_map = header_map or {}
    col = lambda field: resolve(header_map, "czi-raw", field)
    path = Path(path)
    with open_text(path) as fh:
        reader = csv.DictReader(_skip_comments(fh))
        for required in ("mention_id", "software"):
            _require_column(reader.fieldnames, col(required), str(path))
        for row_index, row in enumerate(reader):
            get = lambda field: (row.get(col(field)) or "").strip()
            yield RawCziRow(
                mention_id=get("mention_id"),
                paper_id=get("paper_id"),
                software_raw=row.get(col("software")) or "",
                text=row.get(col("text")) or None,
                curation_label=get("curation_label"),
                collection=collection,
                source_row=row_index,
                source_file=path.name,
            )


def read_link_rows(
    path: str | Path, header_map: Optional[dict[str, str]] = None
) -> Iterator[LinkedRepoRecord]:
    """Stream repository-link rows from a czi-linked-format file."""
    header_map = header_map or {}
    col = lambda field: resolve(header_map, "czi-linked", field)
    path = Path(path)
    with open_text(path) as fh:
        reader = csv.DictReader(_skip_comments(fh))
        for required in ("mention_id", "url"):
            _require_column(reader.fieldnames, col(required), str(path))
        for row in reader:
            get = lambda field: (row.get(col(field)) or "").strip()
            source_value = get("source").upper() or "OTHER"
            try:
                source = LinkSource(source_value)
            except ValueError:
                source = LinkSource.OTHER
            basis_value = get("match_basis").upper()
            basis = MatchBasis(basis_value) if basis_value in MatchBasis.__members__ else None
            yield LinkedRepoRecord(
                mention_id=get("mention_id"),
                source=source,
                url=get("url"),
                match_basis=basis,
            )


# ---------------------------------------------------------------------------
# core operations
# ---------------------------------------------------------------------------


def explode_csm(
    rows: Iterable[PublicationRow],
    report: ReportBuilder,
    rejects: Optional[RejectSink] = None,
) -> Iterator[MentionRecord]:
    """One mention record per (publication, mention) pair.

    Bibliographic fields are copied onto every emitted record; mention ids are
    synthesized from the source row plus the intra-row index, so re-running the
    same input yields the same ids. Malformed rows are rejected and skipped.
    """
    for row in rows:
        report.rows_read += 1
        try:
            mentions = parse_mention_list(row.software_list_raw)
        except MentionListParseError as exc:
            report.rows_rejected += 1
            if rejects is not None:
                rejects.reject(row.source_file, row.source_row, "mention-list-parse", str(exc))
            continue
        report.rows_accepted += 1
        pub_id = row.identifiers[0] if row.identifiers else f"{row.source_file}:{row.source_row}"
        year = extract_year(row.publish_time)
        for j, software in enumerate(mentions):
            record = MentionRecord(
                mention_id=f"csm-{row.source_row}-{j}",
                software_raw=software,
                context=None,
                pub_id=pub_id,
                pub_title=row.title,
                pub_year=year,
                pub_urls=row.urls,
                source_dataset=SourceDataset.CSM,
                source_row=row.source_row,
            )
            report.saw_mention(software)
            yield record


def ingest_czi_raw(
    rows: Iterable[RawCziRow],
    report: ReportBuilder,
    rejects: Optional[RejectSink] = None,
) -> Iterator[MentionRecord]:
    """Merge collection streams, keeping only rows curated as software.

    A mention id seen twice (within or across collections) is a dataset-level
    defect and raises, naming both provenance rows.
    """
    seen: dict[str, str] = {}
    for row in rows:
        report.rows_read += 1
        if row.curation_label.strip().casefold() != CURATED_SOFTWARE_LABEL:
            report.rows_accepted += 1  # filtered by curation, not malformed
            continue
        software = clean_mention(row.software_raw)
        if not row.mention_id or not software:
            report.rows_rejected += 1
            if rejects is not None:
                reason = "missing-mention-id" if not row.mention_id else "empty-software"
                rejects.reject(row.source_file, row.source_row, reason, row.software_raw[:200])
            continue
        provenance = f"{row.source_file}:{row.source_row}"
        if row.mention_id in seen:
            raise DuplicateMentionIdError(row.mention_id, seen[row.mention_id], provenance)
        seen[row.mention_id] = provenance
        report.rows_accepted += 1
        report.saw_mention(software)
        yield MentionRecord(
            mention_id=row.mention_id,
            software_raw=software,
            context=row.text,
            pub_id=row.paper_id or provenance,
            pub_title=None,
            pub_year=None,
            pub_urls=(),
            source_dataset=COLLECTION_TO_DATASET[row.collection],
            source_row=row.source_row,
        )


def merge_linked(
    mentions: Iterable[MentionRecord],
    links: Iterable[LinkedRepoRecord],
) -> tuple[list[tuple[MentionRecord, list[LinkedRepoRecord]]], MergeReport]:
    """Left join of mentions with their repository links (source order kept).

    Never drops a mention; link rows whose mention id matches nothing are
    counted as unmatched. A mention whose links point at more than one distinct
    URL is counted as multi-target.
    """
    by_mention: dict[str, list[LinkedRepoRecord]] = {}
    link_rows = 0
    for link in links:
        link_rows += 1
        by_mention.setdefault(link.mention_id, []).append(link)

    joined: list[tuple[MentionRecord, list[LinkedRepoRecord]]] = []
    matched = 0
    with_links = 0
    multi_target = 0
    matched_ids: set[str] = set()
    for mention in mentions:
        mention_links = by_mention.get(mention.mention_id, [])
        if mention_links:
            matched_ids.add(mention.mention_id)
            matched += len(mention_links)
            with_links += 1
            if len({l.url for l in mention_links}) > 1:
                multi_target += 1
        joined.append((mention, mention_links))

    unmatched = sum(
        len(rows) for mid, rows in by_mention.items() if mid not in matched_ids
    )
    report = MergeReport(
        mentions=len(joined),
        link_rows=link_rows,
        matched_link_rows=matched,
        unmatched_link_rows=unmatched,
        mentions_with_links=with_links,
        multi_target_mentions=multi_target,
    )
    return joined, report


# ---------------------------------------------------------------------------
# canonical table IO
# ---------------------------------------------------------------------------

MENTION_COLUMNS = [
    "mention_id",
    "software_raw",
    "context",
    "pub_id",
    "pub_title",
    "pub_year",
    "pub_urls",
    "source_dataset",
    "source_row",
]

LINK_COLUMNS = ["mention_id", "source", "url", "match_basis"]


def mention_to_row(record: MentionRecord) -> dict[str, str]:
    return {
        "mention_id": record.mention_id,
        "software_raw": record.software_raw,
        "context": record.context or "",
        "pub_id": record.pub_id,
        "pub_title": record.pub_title or "",
        "pub_year": "" if record.pub_year is None else str(record.pub_year),
        "pub_urls": " ".join(record.pub_urls),
        "source_dataset": record.source_dataset.value,
        "source_row": str(record.source_row),
    }


def mention_from_row(row: dict[str, str]) -> MentionRecord:
    return MentionRecord(
        mention_id=row["mention_id"],
        software_raw=row["software_raw"],
        context=row.get("context") or None,
        pub_id=row["pub_id"],
        pub_title=row.get("pub_title") or None,
        pub_year=int(row["pub_year"]) if row.get("pub_year") else None,
        pub_urls=tuple((row.get("pub_urls") or "").split()),
        source_dataset=SourceDataset(row.get("source_dataset") or "OTHER"),
        source_row=int(row.get("source_row") or 0),
    )


def write_mentions(
    path: str | Path,
    records: Iterable[MentionRecord],
    extra_columns: Optional[dict[str, str]] = None,
) -> int:
    """Write the canonical mention table; returns the number of rows written.

    ``extra_columns`` adds constant-valued metadata columns (e.g. the sampling
    spec) to every row.
    """
    extra = extra_columns or {}
    columns = MENTION_COLUMNS + list(extra)
    count = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for record in records:
            row = mention_to_row(record)
            row.update(extra)
            writer.writerow(row)
            count += 1
    return count


def read_mentions(path: str | Path) -> Iterator[MentionRecord]:
    with open_text(path) as fh:
        reader = csv.DictReader(_skip_comments(fh))
        _require_column(reader.fieldnames, "mention_id", str(path))
        for row in reader:
            yield mention_from_row(row)


def write_links(path: str | Path, links: Iterable[LinkedRepoRecord]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=LINK_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for link in links:
            writer.writerow(
                {
                    "mention_id": link.mention_id,
                    "source": link.source.value,
                    "url": link.url,
                    "match_basis": link.match_basis.value if link.match_basis else "",
                }
            )
            count += 1
    return count


def read_links(path: str | Path) -> Iterator[LinkedRepoRecord]:
    yield from read_link_rows(path)


def _skip_comments(lines: Iterable[str]) -> Iterator[str]:
    """Drop '#'-prefixed comment lines, but never inside a quoted field.

    RFC 4180 quoting doubles embedded quote characters, so a line with an odd
    number of '"' toggles whether the next physical line starts mid-field.
    """
    in_quoted = False
    for line in lines:
        if not in_quoted and line.startswith("#"):
            continue
        if line.count('"') % 2 == 1:
            in_quoted = not in_quoted
        yield line
