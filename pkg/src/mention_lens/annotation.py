"""Annotation campaigns: sheets out, validated annotations in, agreement over the top.

A campaign lives in a directory:

* ``campaign.json`` — identity, layer bindings, registered annotators;
* ``sample.csv`` — the sampled mentions, in canonical table form;
* ``log.ndjson`` — append-only event log (every accepted write, skip, reopen);
* ``state.csv`` — compacted current state, rewritten atomically.

The store is a single-writer system: mutations serialize through one lock and
are flushed to disk before the caller gets an acknowledgement, so a crash
never loses an acknowledged annotation. Nothing that fails validation is ever
persisted.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import os
import tempfile
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Optional, Sequence

from pydantic import BaseModel, ConfigDict

from .ingest import _skip_comments, mention_from_row, write_mentions
from .model import (
    AnnotatedMention,
    AnnotationRecord,
    BUILTIN_TAGSETS,
    CONFIDENCE_MAX,
    CONFIDENCE_MIN,
    MentionLensError,
    MentionRecord,
    TagsetConfigError,
    TagsetRegistry,
    Violation,
    validate_annotation,
)
from .stats import AgreementResult, AgreementUndefinedError, krippendorff_alpha


class CampaignError(MentionLensError):
    pass


class AnnotationRejected(CampaignError):
    """A submitted annotation failed validation; nothing was persisted."""

    def __init__(self, violations: Sequence[Violation]):
        detail = "; ".join(f"{v.field}: {v.message}" for v in violations)
        super().__init__(f"annotation rejected: {detail}")
        self.violations = tuple(violations)


class SheetHeaderError(CampaignError):
    """The sheet header does not match the campaign; whole sheet rejected."""


class MentionStatus(str, enum.Enum):
    PENDING = "PENDING"
    DONE = "DONE"
    SKIPPED = "SKIPPED"


class LayerKind(str, enum.Enum):
    CODE = "code"
    TEXT = "text"
    BOOL = "bool"


class LayerSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    kind: LayerKind
    tagset: Optional[str] = None


DEFAULT_LAYERS: tuple[LayerSpec, ...] = (
    LayerSpec(name="retrieval_quality", kind=LayerKind.CODE, tagset="RetrievalQuality"),
    LayerSpec(name="mention_type", kind=LayerKind.CODE, tagset="MentionType"),
    LayerSpec(name="mention_quality", kind=LayerKind.CODE, tagset="MentionQuality"),
    LayerSpec(name="found_url", kind=LayerKind.TEXT),
    LayerSpec(name="link_quality", kind=LayerKind.CODE, tagset="LinkQuality"),
    LayerSpec(name="license_spdx_or_name", kind=LayerKind.TEXT),
    LayerSpec(name="license_category", kind=LayerKind.CODE, tagset="LicenseCategory"),
    LayerSpec(name="is_preprint", kind=LayerKind.BOOL),
    LayerSpec(name="is_software_paper", kind=LayerKind.BOOL),
)

#: layers that carry discrete codes and therefore enter agreement by default
AGREEMENT_LAYERS = tuple(
    layer.name for layer in DEFAULT_LAYERS if layer.kind is not LayerKind.TEXT
)

SHEET_PREFIX_COLUMNS = [
    "mention_id",
    "software_raw",
    "context",
    "pub_id",
    "pub_year",
    "pub_urls",
]
SHEET_SUFFIX_COLUMNS = ["confidence", "notes", "annotator_id"]


class CampaignMeta(BaseModel):
    model_config = ConfigDict(frozen=True)

    campaign_id: str
    layers: tuple[LayerSpec, ...]
    annotators: tuple[str, ...]
    created: str
    sample_meta: dict = {}


@dataclass
class _StateEntry:
    status: MentionStatus = MentionStatus.PENDING
    version: int = 0
    record: Optional[AnnotationRecord] = None
    note: Optional[str] = None


class SheetRowIssue(BaseModel):
    model_config = ConfigDict(frozen=True)

    row: int
    mention_id: str
    field: str
    rule: str
    message: str


class SheetImportReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    rows_seen: int
    accepted: int
    skipped_empty: int
    issues: tuple[SheetRowIssue, ...]

    @property
    def ok(self) -> bool:
        return not self.issues


class LayerAgreement(BaseModel):
    model_config = ConfigDict(frozen=True)

    layer: str
    result: Optional[AgreementResult] = None
    error: Optional[str] = None


def guideline_checks(
    record: AnnotationRecord, mention: Optional[MentionRecord] = None
) -> list[str]:
    """Advisory warnings for a record; never blocks a save.

    These mirror checks an annotator applies while reading the paper, so the
    tool can only flag the obviously suspicious combinations.
    """
    warnings = []
    if record.mention_type == "URL" and not record.found_url:
        warnings.append("URL-type mention without recorded URL")
    if record.mention_quality == "SC" and not record.found_url:
        warnings.append(
            "mention quality SC requires a repository link, but no URL recorded"
        )
    if record.mention_quality == "SP" and not record.found_url:
        warnings.append("mention quality SP implies a website link, but no URL recorded")
    if record.confidence <= 2:
        warnings.append(
            f"confidence {record.confidence}: flagged for adjudication"
        )
    return warnings


def _bool_to_cell(value: Optional[bool]) -> str:
    if value is None:
        return ""
    return "Y" if value else "N"


_BOOL_VALUES = {
    "y": True, "yes": True, "true": True, "1": True,
    "n": False, "no": False, "false": False, "0": False,
}


def _cell_to_bool(cell: str) -> Optional[bool]:
    cell = cell.strip()
    if not cell:
        return None
    try:
        return _BOOL_VALUES[cell.casefold()]
    except KeyError:
        raise ValueError(f"cannot read {cell!r} as yes/no") from None


def record_from_cells(
    row: dict[str, str],
    mention_id: str,
    annotator_id: str,
    layers: Sequence[LayerSpec] = DEFAULT_LAYERS,
) -> AnnotationRecord:
    """Build a record from sheet/state cells; raises ValueError on bad cells."""
    kwargs: dict = {"mention_id": mention_id, "annotator_id": annotator_id}
    for layer in layers:
        cell = (row.get(layer.name) or "").strip()
        if layer.kind is LayerKind.BOOL:
            kwargs[layer.name] = _cell_to_bool(cell)
        else:
            kwargs[layer.name] = cell or None
    confidence_cell = (row.get("confidence") or "").strip()
    if not confidence_cell:
        raise ValueError("confidence is required for an annotated row")
    try:
        kwargs["confidence"] = int(confidence_cell)
    except ValueError:
        raise ValueError(
            f"confidence must be an integer, got {confidence_cell!r}"
        ) from None
    notes = (row.get("notes") or "").strip()
    kwargs["notes"] = notes or None
    return AnnotationRecord(**kwargs)


def read_annotated_sheet(
    path: str | Path, layers: Sequence[LayerSpec] = DEFAULT_LAYERS
) -> tuple[list[AnnotatedMention], int]:
    """Read a sheet-format file back into annotated mentions.

    Rows are grouped by mention id; each row with annotation content becomes
    one annotation of its mention. Returns the annotated mentions in first-seen
    order plus the number of mentions that had no annotations at all. The file
    must be in sheet format (it needs the mention content columns), not the
    compacted state format.
    """
    from .ingest import open_text

    layer_names = [layer.name for layer in layers]
    mentions: dict[str, MentionRecord] = {}
    annotations: dict[str, list[AnnotationRecord]] = {}
    with open_text(path) as fh:
        reader = csv.DictReader(_skip_comments(fh))
        fields = reader.fieldnames or []
        if "software_raw" not in fields or "mention_id" not in fields:
            raise CampaignError(
                f"{path}: not a sheet-format file (mention content columns missing); "
                "export a sheet rather than passing the state table"
            )
        for row in reader:
            mention_id = (row.get("mention_id") or "").strip()
            if not mention_id:
                continue
            if mention_id not in mentions:
                mentions[mention_id] = MentionRecord(
                    mention_id=mention_id,
                    software_raw=row.get("software_raw") or "?",
                    context=row.get("context") or None,
                    pub_id=(row.get("pub_id") or "").strip() or "unknown",
                    pub_year=int(row["pub_year"]) if (row.get("pub_year") or "").strip() else None,
                    pub_urls=tuple((row.get("pub_urls") or "").split()),
                )
                annotations[mention_id] = []
            has_content = any(
                (row.get(c) or "").strip() for c in layer_names + ["confidence"]
            )
            if not has_content:
                continue
            annotator_id = (row.get("annotator_id") or "").strip() or "unknown"
            annotations[mention_id].append(
                record_from_cells(row, mention_id, annotator_id, layers)
            )
    annotated = []
    empty = 0
    for mention_id, mention in mentions.items():
        records = annotations[mention_id]
        if records:
            annotated.append(
                AnnotatedMention(mention=mention, annotations=tuple(records))
            )
        else:
            empty += 1
    return annotated, empty


class CampaignStore:
    """Directory-backed campaign state with an append-only history."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self._lock = threading.Lock()
        self.meta = self._read_meta()
        self.mentions = self._read_sample()
        self._by_id = {m.mention_id: m for m in self.mentions}
        self._state: dict[tuple[str, str], _StateEntry] = {
            (m.mention_id, a): _StateEntry()
            for m in self.mentions
            for a in self.meta.annotators
        }
        if self.state_path.exists():
            self._load_state()
        elif self.log_path.exists():
            self._replay_log()

    # -- paths ------------------------------------------------------------

    @property
    def meta_path(self) -> Path:
        return self.directory / "campaign.json"

    @property
    def sample_path(self) -> Path:
        return self.directory / "sample.csv"

    @property
    def log_path(self) -> Path:
        return self.directory / "log.ndjson"

    @property
    def state_path(self) -> Path:
        return self.directory / "state.csv"

    # -- creation ---------------------------------------------------------

    @classmethod
    def create(
        cls,
        directory: str | Path,
        campaign_id: str,
        mentions: Iterable[MentionRecord],
        annotators: Sequence[str],
        layers: Sequence[LayerSpec] = DEFAULT_LAYERS,
        sample_meta: Optional[dict] = None,
        registry: TagsetRegistry = BUILTIN_TAGSETS,
    ) -> "CampaignStore":
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        if (directory / "campaign.json").exists():
            raise CampaignError(f"{directory} already holds a campaign")
        annotators = list(dict.fromkeys(annotators))
        if not annotators:
            raise CampaignError("a campaign needs at least one annotator")
        for layer in layers:
            if layer.kind is LayerKind.CODE:
                if not layer.tagset or layer.tagset not in registry:
                    raise TagsetConfigError(
                        f"layer {layer.name!r} references unknown tagset {layer.tagset!r}"
                    )
        meta = CampaignMeta(
            campaign_id=campaign_id,
            layers=tuple(layers),
            annotators=tuple(annotators),
            created=datetime.now(timezone.utc).isoformat(timespec="seconds"),
            sample_meta=sample_meta or {},
        )
        _atomic_write(directory / "campaign.json", meta.model_dump_json(indent=2) + "\n")
        write_mentions(directory / "sample.csv", mentions)
        store = cls(directory)
        store._write_state()
        return store

    # -- metadata and lookups ---------------------------------------------

    def _read_meta(self) -> CampaignMeta:
        if not self.meta_path.exists():
            raise CampaignError(f"{self.directory} is not a campaign directory")
        return CampaignMeta.model_validate_json(self.meta_path.read_text("utf-8"))

    def _read_sample(self) -> list[MentionRecord]:
        with open(self.sample_path, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(_skip_comments(fh))
            return [mention_from_row(row) for row in reader]

    def mention(self, mention_id: str) -> MentionRecord:
        try:
            return self._by_id[mention_id]
        except KeyError:
            raise CampaignError(f"unknown mention id {mention_id!r}") from None

    def _key(self, mention_id: str, annotator_id: str) -> tuple[str, str]:
        if mention_id not in self._by_id:
            raise CampaignError(f"unknown mention id {mention_id!r}")
        if annotator_id not in self.meta.annotators:
            raise CampaignError(f"unknown annotator {annotator_id!r}")
        return (mention_id, annotator_id)

    def status_of(self, mention_id: str, annotator_id: str) -> tuple[MentionStatus, int]:
        entry = self._state[self._key(mention_id, annotator_id)]
        return entry.status, entry.version

    def annotation_of(
        self, mention_id: str, annotator_id: str
    ) -> Optional[AnnotationRecord]:
        return self._state[self._key(mention_id, annotator_id)].record

    def progress(self) -> dict[str, dict[str, int]]:
        """Status counts per annotator; always sums to the sample size."""
        out: dict[str, dict[str, int]] = {
            a: {s.value: 0 for s in MentionStatus} for a in self.meta.annotators
        }
        for (mention_id, annotator_id), entry in self._state.items():
            out[annotator_id][entry.status.value] += 1
        return out

    # -- mutations ---------------------------------------------------------

    def submit(self, record: AnnotationRecord) -> tuple[int, list[str]]:
        """Validate, persist, acknowledge. Returns (new version, warnings)."""
        key = self._key(record.mention_id, record.annotator_id)
        report = validate_annotation(record)
        if not report.ok:
            raise AnnotationRejected(report.violations)
        warnings = guideline_checks(record, self._by_id[record.mention_id])
        with self._lock:
            entry = self._state[key]
            entry.version += 1
            entry.status = MentionStatus.DONE
            entry.record = record
            entry.note = record.notes
            self._append_log(
                {
                    "event": "annotate",
                    "mention_id": record.mention_id,
                    "annotator_id": record.annotator_id,
                    "version": entry.version,
                    "record": json.loads(record.model_dump_json()),
                }
            )
            self._write_state()
            return entry.version, warnings

    def skip(
        self, mention_id: str, annotator_id: str, note: Optional[str] = None
    ) -> int:
        key = self._key(mention_id, annotator_id)
        with self._lock:
            entry = self._state[key]
            entry.version += 1
            entry.status = MentionStatus.SKIPPED
            entry.note = note
            self._append_log(
                {
                    "event": "skip",
                    "mention_id": mention_id,
                    "annotator_id": annotator_id,
                    "version": entry.version,
                    "note": note,
                }
            )
            self._write_state()
            return entry.version

    def reopen(self, mention_id: str, annotator_id: str) -> int:
        """Reset to PENDING (adjudication path); the history stays in the log."""
        key = self._key(mention_id, annotator_id)
        with self._lock:
            entry = self._state[key]
            entry.version += 1
            entry.status = MentionStatus.PENDING
            self._append_log(
                {
                    "event": "reopen",
                    "mention_id": mention_id,
                    "annotator_id": annotator_id,
                    "version": entry.version,
                }
            )
            self._write_state()
            return entry.version

    # -- persistence -------------------------------------------------------

    def _append_log(self, event: dict) -> None:
        event = dict(event, ts=datetime.now(timezone.utc).isoformat(timespec="seconds"))
        with open(self.log_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, ensure_ascii=False) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def _state_columns(self) -> list[str]:
        return (
            ["mention_id", "annotator_id", "status", "version"]
            + [layer.name for layer in self.meta.layers]
            + ["confidence", "notes"]
        )

    def _write_state(self) -> None:
        buf = io.StringIO()
        writer = csv.DictWriter(
            buf, fieldnames=self._state_columns(), lineterminator="\n"
        )
        writer.writeheader()
        for mention in self.mentions:
            for annotator in self.meta.annotators:
                entry = self._state[(mention.mention_id, annotator)]
                row = {
                    "mention_id": mention.mention_id,
                    "annotator_id": annotator,
                    "status": entry.status.value,
                    "version": str(entry.version),
                    "notes": entry.note or "",
                }
                if entry.record is not None:
                    row.update(self._layer_cells(entry.record))
                    row["confidence"] = str(entry.record.confidence)
                writer.writerow(row)
        _atomic_write(self.state_path, buf.getvalue())

    def _load_state(self) -> None:
        with open(self.state_path, encoding="utf-8", newline="") as fh:
            for row in csv.DictReader(fh):
                key = (row["mention_id"], row["annotator_id"])
                if key not in self._state:
                    continue
                entry = self._state[key]
                entry.status = MentionStatus(row["status"])
                entry.version = int(row["version"])
                entry.note = row.get("notes") or None
                if row.get("confidence"):
                    entry.record = self._record_from_cells(
                        row, row["mention_id"], row["annotator_id"]
                    )

    def _replay_log(self) -> None:
        with open(self.log_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                event = json.loads(line)
                key = (event["mention_id"], event["annotator_id"])
                if key not in self._state:
                    continue
                entry = self._state[key]
                entry.version = event["version"]
                if event["event"] == "annotate":
                    entry.status = MentionStatus.DONE
                    entry.record = AnnotationRecord.model_validate(event["record"])
                    entry.note = entry.record.notes
                elif event["event"] == "skip":
                    entry.status = MentionStatus.SKIPPED
                    entry.note = event.get("note")
                elif event["event"] == "reopen":
                    entry.status = MentionStatus.PENDING

    # -- sheets ------------------------------------------------------------

    def sheet_columns(self) -> list[str]:
        return (
            SHEET_PREFIX_COLUMNS
            + [layer.name for layer in self.meta.layers]
            + SHEET_SUFFIX_COLUMNS
        )

    def _legend_lines(self, registry: TagsetRegistry = BUILTIN_TAGSETS) -> list[str]:
        lines = [f"# campaign {self.meta.campaign_id}", "#"]
        for layer in self.meta.layers:
            if layer.kind is LayerKind.CODE and layer.tagset:
                tagset = registry.get(layer.tagset)
                lines.append(f"# {layer.name} ({tagset.name}):")
                for code in tagset.codes:
                    suffix = f" [order {code.order}]" if code.order is not None else ""
                    text = code.label
                    if code.definition:
                        text = f"{text} :: {code.definition}"
                    lines.append(f"#   {code.code}{suffix} = {text}")
            elif layer.kind is LayerKind.BOOL:
                lines.append(f"# {layer.name}: Y = yes, N = no, blank = not coded")
            else:
                lines.append(f"# {layer.name}: free text")
        lines.append(
            f"# confidence: integer {CONFIDENCE_MIN} (lowest) to {CONFIDENCE_MAX} (highest)"
        )
        lines.append("#")
        return lines

    def _layer_cells(self, record: AnnotationRecord) -> dict[str, str]:
        cells: dict[str, str] = {}
        for layer in self.meta.layers:
            value = getattr(record, layer.name, None)
            if layer.kind is LayerKind.BOOL:
                cells[layer.name] = _bool_to_cell(value)
            else:
                cells[layer.name] = value or ""
        return cells

    def export_sheet(self, annotator_id: str) -> str:
        """One row per sampled mention; already-saved annotations fill their cells."""
        if annotator_id not in self.meta.annotators:
            raise CampaignError(f"unknown annotator {annotator_id!r}")
        buf = io.StringIO()
        for line in self._legend_lines():
            buf.write(line + "\n")
        writer = csv.DictWriter(buf, fieldnames=self.sheet_columns(), lineterminator="\n")
        writer.writeheader()
        for mention in self.mentions:
            entry = self._state[(mention.mention_id, annotator_id)]
            row = {
                "mention_id": mention.mention_id,
                "software_raw": mention.software_raw,
                "context": mention.context or "",
                "pub_id": mention.pub_id,
                "pub_year": "" if mention.pub_year is None else str(mention.pub_year),
                "pub_urls": " ".join(mention.pub_urls),
                "annotator_id": annotator_id,
            }
            if entry.record is not None:
                row.update(self._layer_cells(entry.record))
                row["confidence"] = str(entry.record.confidence)
                row["notes"] = entry.record.notes or ""
            writer.writerow(row)
        return buf.getvalue()

    def _record_from_cells(
        self, row: dict[str, str], mention_id: str, annotator_id: str
    ) -> AnnotationRecord:
        return record_from_cells(row, mention_id, annotator_id, self.meta.layers)

    def import_sheet(
        self, text: str, default_annotator: Optional[str] = None
    ) -> tuple[list[AnnotationRecord], SheetImportReport]:
        """Validate and store sheet rows; bad rows are reported, not fatal.

        A header that does not match the campaign's layers rejects the whole
        sheet. Rows with no annotation content at all are skipped silently;
        every other row either becomes a stored record or an issue naming the
        row, field, and rule.
        """
        reader = csv.reader(_skip_comments(io.StringIO(text)))
        try:
            header = next(reader)
        except StopIteration:
            raise SheetHeaderError("sheet is empty") from None
        if header != self.sheet_columns():
            raise SheetHeaderError(
                "sheet header does not match campaign layers: "
                f"expected {self.sheet_columns()}, got {header}"
            )

        annotation_columns = (
            [layer.name for layer in self.meta.layers] + ["confidence", "notes"]
        )
        accepted: list[AnnotationRecord] = []
        issues: list[SheetRowIssue] = []
        rows_seen = 0
        skipped_empty = 0
        for row_number, cells in enumerate(reader, start=2):
            if not any(cell.strip() for cell in cells):
                continue
            rows_seen += 1
            row = dict(zip(header, cells))
            mention_id = (row.get("mention_id") or "").strip()
            if not any((row.get(c) or "").strip() for c in annotation_columns):
                skipped_empty += 1
                continue
            annotator_id = (row.get("annotator_id") or "").strip() or (
                default_annotator or ""
            )
            if mention_id not in self._by_id:
                issues.append(
                    SheetRowIssue(
                        row=row_number,
                        mention_id=mention_id,
                        field="mention_id",
                        rule="unknown-mention",
                        message=f"mention id {mention_id!r} is not in this campaign's sample",
                    )
                )
                continue
            if annotator_id not in self.meta.annotators:
                issues.append(
                    SheetRowIssue(
                        row=row_number,
                        mention_id=mention_id,
                        field="annotator_id",
                        rule="unknown-annotator",
                        message=f"annotator {annotator_id!r} is not registered",
                    )
                )
                continue
            try:
                record = self._record_from_cells(row, mention_id, annotator_id)
            except (ValueError, TypeError) as exc:
                issues.append(
                    SheetRowIssue(
                        row=row_number,
                        mention_id=mention_id,
                        field="confidence",
                        rule="bad-cell",
                        message=str(exc),
                    )
                )
                continue
            try:
                self.submit(record)
            except AnnotationRejected as exc:
                for violation in exc.violations:
                    issues.append(
                        SheetRowIssue(
                            row=row_number,
                            mention_id=mention_id,
                            field=violation.field,
                            rule=violation.rule,
                            message=violation.message,
                        )
                    )
                continue
            accepted.append(record)
        report = SheetImportReport(
            rows_seen=rows_seen,
            accepted=len(accepted),
            skipped_empty=skipped_empty,
            issues=tuple(issues),
        )
        return accepted, report

    # -- agreement ---------------------------------------------------------

    def matrix_for_layer(self, layer_name: str) -> list[list[Optional[str]]]:
        """Units-by-annotators matrix of codes for one layer, in sample order."""
        layer = next(
            (l for l in self.meta.layers if l.name == layer_name), None
        )
        if layer is None:
            raise CampaignError(f"unknown layer {layer_name!r}")
        matrix: list[list[Optional[str]]] = []
        for mention in self.mentions:
            row: list[Optional[str]] = []
            for annotator in self.meta.annotators:
                entry = self._state[(mention.mention_id, annotator)]
                value = None
                if entry.status is MentionStatus.DONE and entry.record is not None:
                    raw = getattr(entry.record, layer_name, None)
                    if layer.kind is LayerKind.BOOL:
                        value = None if raw is None else ("Y" if raw else "N")
                    elif raw is not None:
                        value = str(raw)
                row.append(value)
            matrix.append(row)
        return matrix

    def agreement(
        self,
        layers: Optional[Sequence[str]] = None,
        pooling: str = "concat",
    ) -> list[LayerAgreement]:
        """Per-layer Krippendorff's alpha plus a pooled all-layers value.

        ``pooling="concat"`` stacks every layer's units into one matrix for
        the pooled value; ``pooling="mean"`` averages the defined per-layer
        alphas instead.
        """
        if pooling not in ("concat", "mean"):
            raise CampaignError(f"unknown pooling {pooling!r}")
        selected = list(layers) if layers is not None else [
            l.name for l in self.meta.layers if l.kind is not LayerKind.TEXT
        ]
        results: list[LayerAgreement] = []
        pooled_matrix: list[list[Optional[str]]] = []
        defined_alphas: list[float] = []
        for name in selected:
            matrix = self.matrix_for_layer(name)
            # prefix codes with the layer so pooled categories never collide
            pooled_matrix.extend(
                [None if v is None else f"{name}={v}" for v in row] for row in matrix
            )
            try:
                result = krippendorff_alpha(matrix, layer=name)
            except AgreementUndefinedError as exc:
                results.append(LayerAgreement(layer=name, error=str(exc)))
                continue
            defined_alphas.append(result.alpha)
            results.append(LayerAgreement(layer=name, result=result))

        pooled_name = "all layers"
        if pooling == "concat":
            try:
                pooled = krippendorff_alpha(pooled_matrix, layer=pooled_name)
                results.append(LayerAgreement(layer=pooled_name, result=pooled))
            except AgreementUndefinedError as exc:
                results.append(LayerAgreement(layer=pooled_name, error=str(exc)))
        else:
            if defined_alphas:
                mean_alpha = sum(defined_alphas) / len(defined_alphas)
                results.append(
                    LayerAgreement(
                        layer=pooled_name,
                        result=AgreementResult(
                            layer=pooled_name,
                            alpha=mean_alpha,
                            n_units=sum(
                                r.result.n_units for r in results if r.result
                            ),
                            n_annotators=len(self.meta.annotators),
                            n_missing=sum(
                                r.result.n_missing for r in results if r.result
                            ),
                        ),
                    )
                )
            else:
                results.append(
                    LayerAgreement(
                        layer=pooled_name, error="alpha undefined: no defined layers"
                    )
                )
        return results

    # -- export ------------------------------------------------------------

    def annotated_mentions(self) -> list[tuple[MentionRecord, list[AnnotationRecord]]]:
        """Current DONE annotations grouped per mention, in sample order."""
        out = []
        for mention in self.mentions:
            records = [
                self._state[(mention.mention_id, a)].record
                for a in self.meta.annotators
                if self._state[(mention.mention_id, a)].status is MentionStatus.DONE
                and self._state[(mention.mention_id, a)].record is not None
            ]
            out.append((mention, records))
        return out


def _atomic_write(path: Path, text: str) -> None:
    """Write-to-temp then rename, so readers never see a half-written file."""
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
