"""Local HTTP API over a campaign store, for the companion annotation UI.

All mutation endpoints persist to disk before acknowledging. Validation
failures come back as structured 422 bodies naming the field and the rule, so
a client can highlight the offending control; advisory guideline warnings ride
along with successful saves instead of blocking them.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, ConfigDict

from .annotation import (
    AnnotationRejected,
    CampaignError,
    CampaignStore,
    LayerKind,
    MentionStatus,
)
from .model import (
    AnnotationRecord,
    BUILTIN_TAGSETS,
    CONFIDENCE_MAX,
    CONFIDENCE_MIN,
)


class CampaignOut(BaseModel):
    campaign_id: str
    annotators: list[str]
    layers: list[dict]
    sample_size: int
    sample_meta: dict


class TagCodeOut(BaseModel):
    code: str
    label: str
    definition: str
    order: Optional[int] = None


class TagsetOut(BaseModel):
    name: str
    codes: list[TagCodeOut]


class TagsetsOut(BaseModel):
    tagsets: list[TagsetOut]
    confidence_min: int = CONFIDENCE_MIN
    confidence_max: int = CONFIDENCE_MAX


class MentionSummaryOut(BaseModel):
    mention_id: str
    software_raw: str
    pub_id: str
    pub_year: Optional[int] = None
    status: Optional[str] = None
    version: Optional[int] = None


class MentionListOut(BaseModel):
    mentions: list[MentionSummaryOut]
    total: int


class AnnotationPayload(BaseModel):
    """Annotation fields as submitted by a client; ids come from the URL."""

    model_config = ConfigDict(extra="forbid")

    retrieval_quality: str
    mention_type: Optional[str] = None
    mention_quality: Optional[str] = None
    found_url: Optional[str] = None
    link_quality: Optional[str] = None
    license_spdx_or_name: Optional[str] = None
    license_category: Optional[str] = None
    is_preprint: Optional[bool] = None
    is_software_paper: Optional[bool] = None
    confidence: int
    notes: Optional[str] = None


class MentionDetailOut(BaseModel):
    mention_id: str
    software_raw: str
    context: Optional[str] = None
    pub_id: str
    pub_title: Optional[str] = None
    pub_year: Optional[int] = None
    pub_urls: list[str]
    source_dataset: str
    statuses: dict[str, str]
    versions: dict[str, int]
    annotation: Optional[AnnotationPayload] = None


class SubmitOut(BaseModel):
    version: int
    status: str
    warnings: list[str]


class ViolationOut(BaseModel):
    field: str
    rule: str
    message: str


class VersionOut(BaseModel):
    version: int
    status: str


class ProgressOut(BaseModel):
    per_annotator: dict[str, dict[str, int]]
    sample_size: int
    total_slots: int


class ReviewItemOut(BaseModel):
    mention_id: str
    annotator_id: str
    confidence: int
    warnings: list[str]


class ReviewQueueOut(BaseModel):
    items: list[ReviewItemOut]


def _payload_from_record(record: AnnotationRecord) -> AnnotationPayload:
    data = record.model_dump()
    data.pop("mention_id")
    data.pop("annotator_id")
    return AnnotationPayload(**data)


def create_app(store: CampaignStore, static_dir: Optional[Path] = None) -> FastAPI:
    app = FastAPI(title="mention-lens annotation API", version="1")

    @app.get("/api/campaign", response_model=CampaignOut)
    def get_campaign() -> CampaignOut:
        return CampaignOut(
            campaign_id=store.meta.campaign_id,
            annotators=list(store.meta.annotators),
            layers=[layer.model_dump() for layer in store.meta.layers],
            sample_size=len(store.mentions),
            sample_meta=store.meta.sample_meta,
        )

    @app.get("/api/tagsets", response_model=TagsetsOut)
    def get_tagsets() -> TagsetsOut:
        names = []
        for layer in store.meta.layers:
            if layer.kind is LayerKind.CODE and layer.tagset and layer.tagset not in names:
                names.append(layer.tagset)
        return TagsetsOut(
            tagsets=[
                TagsetOut(
                    name=name,
                    codes=[
                        TagCodeOut(
                            code=c.code,
                            label=c.label,
                            definition=c.definition,
                            order=c.order,
                        )
                        for c in BUILTIN_TAGSETS.get(name).codes
                    ],
                )
                for name in names
            ]
        )

    @app.get("/api/mentions", response_model=MentionListOut)
    def list_mentions(
        annotator: Optional[str] = Query(default=None),
        status: Optional[str] = Query(default=None),
    ) -> MentionListOut:
        if annotator is not None and annotator not in store.meta.annotators:
            raise HTTPException(404, f"unknown annotator {annotator!r}")
        wanted: Optional[MentionStatus] = None
        if status is not None:
            try:
                wanted = MentionStatus(status.upper())
            except ValueError:
                raise HTTPException(422, f"unknown status {status!r}") from None
        items = []
        for mention in store.mentions:
            summary = MentionSummaryOut(
                mention_id=mention.mention_id,
                software_raw=mention.software_raw,
                pub_id=mention.pub_id,
                pub_year=mention.pub_year,
            )
            if annotator is not None:
                mention_status, version = store.status_of(
                    mention.mention_id, annotator
                )
                if wanted is not None and mention_status is not wanted:
                    continue
                summary = summary.model_copy(
                    update={"status": mention_status.value, "version": version}
                )
            items.append(summary)
        return MentionListOut(mentions=items, total=len(items))

    @app.get("/api/mentions/{mention_id}", response_model=MentionDetailOut)
    def get_mention(
        mention_id: str, annotator: Optional[str] = Query(default=None)
    ) -> MentionDetailOut:
        try:
            mention = store.mention(mention_id)
        except CampaignError as exc:
            raise HTTPException(404, str(exc)) from None
        statuses = {}
        versions = {}
        for a in store.meta.annotators:
            s, v = store.status_of(mention_id, a)
            statuses[a] = s.value
            versions[a] = v
        annotation = None
        if annotator is not None:
            if annotator not in store.meta.annotators:
                raise HTTPException(404, f"unknown annotator {annotator!r}")
            record = store.annotation_of(mention_id, annotator)
            if record is not None:
                annotation = _payload_from_record(record)
        return MentionDetailOut(
            mention_id=mention.mention_id,
            software_raw=mention.software_raw,
            context=mention.context,
            pub_id=mention.pub_id,
            pub_title=mention.pub_title,
            pub_year=mention.pub_year,
            pub_urls=list(mention.pub_urls),
            source_dataset=mention.source_dataset.value,
            statuses=statuses,
            versions=versions,
            annotation=annotation,
        )

    @app.put(
        "/api/annotations/{mention_id}/{annotator_id}",
        response_model=SubmitOut,
        responses={422: {"model": dict}},
    )
    def put_annotation(
        mention_id: str, annotator_id: str, payload: AnnotationPayload
    ) -> SubmitOut:
        record = AnnotationRecord(
            mention_id=mention_id, annotator_id=annotator_id, **payload.model_dump()
        )
        try:
            version, warnings = store.submit(record)
        except AnnotationRejected as exc:
            raise HTTPException(
                422,
                detail={
                    "violations": [
                        ViolationOut(
                            field=v.field, rule=v.rule, message=v.message
                        ).model_dump()
                        for v in exc.violations
                    ]
                },
            ) from None
        except CampaignError as exc:
            raise HTTPException(404, str(exc)) from None
        status, _ = store.status_of(mention_id, annotator_id)
        return SubmitOut(version=version, status=status.value, warnings=warnings)

    class SkipIn(BaseModel):
        note: Optional[str] = None

    @app.post(
        "/api/annotations/{mention_id}/{annotator_id}/skip", response_model=VersionOut
    )
    def post_skip(
        mention_id: str, annotator_id: str, body: Optional[SkipIn] = None
    ) -> VersionOut:
        try:
            version = store.skip(
                mention_id, annotator_id, note=body.note if body else None
            )
        except CampaignError as exc:
            raise HTTPException(404, str(exc)) from None
        return VersionOut(version=version, status=MentionStatus.SKIPPED.value)

    @app.post(
        "/api/annotations/{mention_id}/{annotator_id}/reopen",
        response_model=VersionOut,
    )
    def post_reopen(mention_id: str, annotator_id: str) -> VersionOut:
        try:
            version = store.reopen(mention_id, annotator_id)
        except CampaignError as exc:
            raise HTTPException(404, str(exc)) from None
        return VersionOut(version=version, status=MentionStatus.PENDING.value)

    @app.get("/api/progress", response_model=ProgressOut)
    def get_progress() -> ProgressOut:
        per_annotator = store.progress()
        return ProgressOut(
            per_annotator=per_annotator,
            sample_size=len(store.mentions),
            total_slots=len(store.mentions) * len(store.meta.annotators),
        )

    @app.get("/api/export")
    def get_export(annotator: Optional[str] = Query(default=None)) -> PlainTextResponse:
        if annotator is not None:
            try:
                text = store.export_sheet(annotator)
            except CampaignError as exc:
                raise HTTPException(404, str(exc)) from None
        else:
            text = store.state_path.read_text("utf-8")
        return PlainTextResponse(text, media_type="text/csv; charset=utf-8")

    @app.get("/api/review-queue", response_model=ReviewQueueOut)
    def get_review_queue() -> ReviewQueueOut:
        from .annotation import guideline_checks

        items = []
        for mention, records in store.annotated_mentions():
            for record in records:
                warnings = guideline_checks(record, mention)
                if warnings:
                    items.append(
                        ReviewItemOut(
                            mention_id=mention.mention_id,
                            annotator_id=record.annotator_id,
                            confidence=record.confidence,
                            warnings=warnings,
                        )
                    )
        return ReviewQueueOut(items=items)

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def default_static_dir() -> Optional[Path]:
    """The built companion UI, when present next to the repository root."""
    candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return candidate if candidate.is_dir() else None
