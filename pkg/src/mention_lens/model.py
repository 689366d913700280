"""Canonical data model: mention records, tagsets, annotations and validation.

Everything here is an immutable value object; validation is pure and returns
reports rather than raising, so callers can surface per-row diagnostics.
"""

from __future__ import annotations

import enum
from typing import Iterable, Optional

from pydantic import BaseModel, ConfigDict, field_validator, model_validator


class MentionLensError(Exception):
    """Base class for errors raised by this package."""


class TagsetConfigError(MentionLensError):
    """A required tagset is missing or malformed (configuration, not data)."""


class UnknownCodeError(MentionLensError, ValueError):
    """A code is not a member of its closed tagset."""


class SourceDataset(str, enum.Enum):
    CSM = "CSM"
    CZI_NC = "CZI_NC"
    CZI_COMM = "CZI_COMM"
    CZI_PUB = "CZI_PUB"
    OTHER = "OTHER"


class LinkSource(str, enum.Enum):
    GITHUB = "GITHUB"
    PYPI = "PYPI"
    CRAN = "CRAN"
    SCICRUNCH = "SCICRUNCH"
    BIOCONDUCTOR = "BIOCONDUCTOR"
    OTHER = "OTHER"


class MatchBasis(str, enum.Enum):
    EXACT_STRING = "EXACT_STRING"
    OTHER = "OTHER"


class TagCode(BaseModel):
    """One code of a closed tagset, with its human-readable definition."""

    model_config = ConfigDict(frozen=True)

    code: str
    label: str
    definition: str = ""
    order: Optional[int] = None


class Tagset(BaseModel):
    """A closed, ordered code list; ``order`` ranks quality where applicable."""

    model_config = ConfigDict(frozen=True)

    name: str
    codes: tuple[TagCode, ...]

    @field_validator("codes")
    @classmethod
    def _unique(cls, codes: tuple[TagCode, ...]) -> tuple[TagCode, ...]:
        seen = [c.code for c in codes]
        if len(set(seen)) != len(seen):
            raise ValueError("duplicate codes in tagset")
        orders = [c.order for c in codes if c.order is not None]
        if len(set(orders)) != len(orders):
            raise ValueError("duplicate order ranks in tagset")
        return codes

    def __contains__(self, code: str) -> bool:
        return any(c.code == code for c in self.codes)

    def code_list(self) -> list[str]:
        return [c.code for c in self.codes]

    def get(self, code: str) -> TagCode:
        for c in self.codes:
            if c.code == code:
                return c
        raise UnknownCodeError(f"{code!r} is not a code of tagset {self.name}")

    def rank(self, code: str) -> int:
        order = self.get(code).order
        if order is None:
            raise UnknownCodeError(f"code {code!r} of tagset {self.name} has no rank")
        return order


RETRIEVAL_QUALITY = Tagset(
    name="RetrievalQuality",
    codes=(
        TagCode(
            code="Y",
            label="Yes, name was correctly and completely retrieved from the publication for the dataset.",
        ),
        TagCode(
            code="N",
            label="No, name was NOT correctly and completely retrieved from the publication for the dataset.",
        ),
    ),
)

MENTION_TYPE = Tagset(
    name="MentionType",
    codes=(
        TagCode(
            code="PUB",
            label="Cite to publication",
            definition=(
                "Cites a paper/monograph primarily describing the mentioned software "
                "(NOT a review paper comparing different software), as it would for "
                "non-software cites. For non-software mentions, we don't judge the "
                "suitability of the referenced work."
            ),
            order=2,
        ),
        TagCode(
            code="PRO",
            label="Cite to project name or website",
            definition='Cites the project name or website via a "fake" reference.',
            order=1,
        ),
        TagCode(
            code="URL",
            label="URL in text",
            definition="URL in text or in footnote",
            order=4,
        ),
        TagCode(code="MAN", label="Cite to user manual", order=3),
        TagCode(
            code="INS",
            label="Instrument-like",
            definition=(
                "Mention software in a manner similar to scientific instruments or "
                "materials, typically mentioning the name in text followed by the "
                "author or company and a location in parentheses."
            ),
            order=5,
        ),
        TagCode(code="NAM", label="In-text name mention only", order=6),
        TagCode(code="NOT", label="Not even name mentioned", order=7),
    ),
)

MENTION_QUALITY = Tagset(
    name="MentionQuality",
    codes=(
        TagCode(
            code="SC",
            label=(
                "Software where a direct link to a code repository or distribution "
                "repository landing page (e.g., CRAN, PyPI) can be found in the "
                "mentioning paper, and the page includes author/version/license metadata."
            ),
        ),
        TagCode(
            code="SP",
            label=(
                "Software where a link to another website can be found in the mentioning "
                "paper and that website provides access to the source code, but the "
                "website does not provide author/version/license metadata."
            ),
        ),
        TagCode(
            code="SN",
            label=(
                "Software but no link to a code repository or website providing access "
                "to the source code can be found in the mentioning paper. Annotate as SN "
                "even if the reference is to a software paper that does include a link "
                "to a source code repository."
            ),
        ),
        TagCode(
            code="NA",
            label="Not software (only annotate this, retrieval quality and confidence)",
        ),
        TagCode(
            code="UN",
            label=(
                "Other classification - unknown/needs further investigation, e.g., "
                "unclear from the information in the paper whether this is software or not."
            ),
        ),
    ),
)

LICENSE_CATEGORY = Tagset(
    name="LicenseCategory",
    codes=(
        TagCode(
            code="CLOSED",
            label="Closed",
            definition="Closed source licenses, generally commercial products",
        ),
        TagCode(
            code="ACADEMIC",
            label="Academic",
            definition="No cost for academic or non-commercial use",
        ),
        TagCode(
            code="PERMISSIVE",
            label="Permissive",
            definition="Minimally restrictive open source licenses (e.g., Apache, Artistic, BSD, MIT, Unlimited)",
        ),
        TagCode(
            code="COPYLEFT",
            label="Copyleft",
            definition="Open source licenses with reciprocal clauses (e.g., LGPL, GPL)",
        ),
        TagCode(
            code="UNKNOWN",
            label="Unknown",
            definition="License conditions could not be found",
        ),
        TagCode(
            code="UNKNOWN_SAAS",
            label="Unknown (SaaS)",
            definition="Software as a Service (SaaS) with no license for service or code",
        ),
    ),
)

# Introduced by this toolkit: the smallest closed set expressing the three
# reported link statistics (multi-target, wrong-target, unlinked).
LINK_QUALITY = Tagset(
    name="LinkQuality",
    codes=(
        TagCode(code="CORRECT", label="Link(s) point to the mentioned software"),
        TagCode(code="WRONG", label="Link(s) point to the wrong software"),
        TagCode(
            code="MULTIPLE_CONFLICT",
            label="Links point to multiple different software",
        ),
        TagCode(code="NONE", label="No link present for this mention"),
    ),
)

BUILTIN_TAGSET_NAMES = (
    "RetrievalQuality",
    "MentionType",
    "MentionQuality",
    "LicenseCategory",
    "LinkQuality",
)

#: Confidence scale bounds (Likert-style; recorded in sheet headers).
CONFIDENCE_MIN = 1
CONFIDENCE_MAX = 5


class TagsetRegistry:
    """Lookup of tagsets by name; prepopulated with the five built-ins."""

    def __init__(self, tagsets: Optional[Iterable[Tagset]] = None):
        base = (
            RETRIEVAL_QUALITY,
            MENTION_TYPE,
            MENTION_QUALITY,
            LICENSE_CATEGORY,
            LINK_QUALITY,
        )
        self._by_name: dict[str, Tagset] = {t.name: t for t in base}
        for t in tagsets or ():
            self._by_name[t.name] = t

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def get(self, name: str) -> Tagset:
        try:
            return self._by_name[name]
        except KeyError:
            raise TagsetConfigError(f"no tagset named {name!r} is registered") from None

    def names(self) -> list[str]:
        return list(self._by_name)


BUILTIN_TAGSETS = TagsetRegistry()


class MentionRecord(BaseModel):
    """One software mention with its bibliographic context."""

    model_config = ConfigDict(frozen=True)

    mention_id: str
    software_raw: str
    context: Optional[str] = None
    pub_id: str
    pub_title: Optional[str] = None
    pub_year: Optional[int] = None
    pub_urls: tuple[str, ...] = ()
    source_dataset: SourceDataset = SourceDataset.OTHER
    source_row: int = 0

    @field_validator("software_raw")
    @classmethod
    def _non_empty(cls, v: str) -> str:
        if not v.strip():
            raise ValueError("software_raw must be non-empty after cleaning")
        return v

    @field_validator("pub_year")
    @classmethod
    def _year_range(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and not (1900 <= v <= 2100):
            raise ValueError(f"pub_year {v} outside [1900, 2100]")
        return v


class SoftwareKey(BaseModel):
    """Normalized identity of a software name, with one original spelling kept."""

    model_config = ConfigDict(frozen=True)

    key: str
    exemplar: str


class LinkedRepoRecord(BaseModel):
    """One candidate repository URL attached to a mention."""

    model_config = ConfigDict(frozen=True)

    mention_id: str
    source: LinkSource
    url: str
    match_basis: Optional[MatchBasis] = None


class AnnotationRecord(BaseModel):
    """One annotator's coded layers for one mention.

    Codes are kept as plain strings so invalid values can be *reported* by
    :func:`validate_annotation` instead of blowing up at parse time.
    """

    model_config = ConfigDict(frozen=True)

    mention_id: str
    annotator_id: str
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


class AnnotatedMention(BaseModel):
    """A mention together with all annotations recorded for it (>= 1)."""

    model_config = ConfigDict(frozen=True)

    mention: MentionRecord
    annotations: tuple[AnnotationRecord, ...]

    @field_validator("annotations")
    @classmethod
    def _at_least_one(cls, v: tuple[AnnotationRecord, ...]) -> tuple[AnnotationRecord, ...]:
        if not v:
            raise ValueError("an annotated mention needs at least one annotation")
        return v

    @model_validator(mode="after")
    def _ids_agree(self) -> "AnnotatedMention":
        for a in self.annotations:
            if a.mention_id != self.mention.mention_id:
                raise ValueError(
                    f"annotation for {a.mention_id!r} attached to mention "
                    f"{self.mention.mention_id!r}"
                )
        return self


class Violation(BaseModel):
    model_config = ConfigDict(frozen=True)

    field: str
    rule: str
    message: str


class ValidationReport(BaseModel):
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


#: Fields that must be absent when the mention is coded as not-software (NA).
NOT_SOFTWARE_EXCLUDED_FIELDS = (
    "mention_type",
    "found_url",
    "link_quality",
    "license_spdx_or_name",
    "license_category",
)

RULE_UNKNOWN_CODE = "unknown-code"
RULE_NOT_SOFTWARE_EXCLUSIVE = "not-software-exclusive"
RULE_CONFIDENCE_RANGE = "confidence-range"

_CODE_FIELDS = (
    ("retrieval_quality", "RetrievalQuality"),
    ("mention_type", "MentionType"),
    ("mention_quality", "MentionQuality"),
    ("link_quality", "LinkQuality"),
    ("license_category", "LicenseCategory"),
)


def validate_annotation(
    rec: AnnotationRecord, tagsets: TagsetRegistry = BUILTIN_TAGSETS
) -> ValidationReport:
    """Check an annotation against the closed tagsets and cross-field rules.

    Returns an empty report iff the record is storable. A missing tagset in the
    registry is a configuration problem and raises :class:`TagsetConfigError`
    instead of being reported as a data violation.
    """
    for name in BUILTIN_TAGSET_NAMES:
        if name not in tagsets:
            raise TagsetConfigError(f"registry is missing built-in tagset {name!r}")

    violations: list[Violation] = []

    for field, tagset_name in _CODE_FIELDS:
        value = getattr(rec, field)
        if value is None:
            continue
        tagset = tagsets.get(tagset_name)
        if value not in tagset:
            violations.append(
                Violation(
                    field=field,
                    rule=RULE_UNKNOWN_CODE,
                    message=f"{value!r} is not a code of {tagset_name} "
                    f"(expected one of {', '.join(tagset.code_list())})",
                )
            )

    if rec.mention_quality == "NA":
        for field in NOT_SOFTWARE_EXCLUDED_FIELDS:
            if getattr(rec, field) is not None:
                violations.append(
                    Violation(
                        field=field,
                        rule=RULE_NOT_SOFTWARE_EXCLUSIVE,
                        message=(
                            "a mention coded NA (not software) may only carry "
                            f"retrieval quality and confidence; {field} must be empty"
                        ),
                    )
                )

    if not (CONFIDENCE_MIN <= rec.confidence <= CONFIDENCE_MAX):
        violations.append(
            Violation(
                field="confidence",
                rule=RULE_CONFIDENCE_RANGE,
                message=f"confidence {rec.confidence} outside "
                f"[{CONFIDENCE_MIN}, {CONFIDENCE_MAX}]",
            )
        )

    return ValidationReport(violations=tuple(violations))


def mention_type_rank(code: str) -> int:
    """Quality rank of a mention type, 1 (best) to 7 (worst)."""
    return MENTION_TYPE.rank(code)


def best_mention(codes: Iterable[str]) -> str:
    """The mention type with the best (minimal) rank among ``codes``."""
    codes = list(codes)
    if not codes:
        raise ValueError("best_mention needs at least one mention type")
    return min(codes, key=mention_type_rank)
