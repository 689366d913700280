"""Statistical core: Levene's test, Krippendorff's alpha, and the published tables.

Everything here is a pure function over immutable inputs. Three rules keep
results reproducible across platforms:

* agreement coefficients are accumulated in exact rational arithmetic and
  converted to float only at the boundary;
* percentages are rounded half-up in exact integer arithmetic (no binary
  floating-point artifacts at .5 boundaries);
* the F-distribution tail probability is computed in-package via the
  regularized incomplete beta function, so no external statistics package
  is involved.
"""

from __future__ import annotations

import enum
import math
import statistics
from collections import defaultdict
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from pydantic import BaseModel, ConfigDict, model_validator

from .model import (
    AnnotatedMention,
    LICENSE_CATEGORY,
    LinkedRepoRecord,
    MENTION_TYPE,
    MentionLensError,
    MentionRecord,
    UnknownCodeError,
)


class StatsError(MentionLensError):
    pass


class AgreementUndefinedError(StatsError):
    pass


# ---------------------------------------------------------------------------
# exact percentage rounding
# ---------------------------------------------------------------------------


def percent_exact(count: int, total: int, decimals: int) -> Decimal:
    """Half-up rounding of 100*count/total, in exact integer arithmetic."""
    if decimals < 0:
        raise StatsError("decimals must be non-negative")
    if total < 0 or count < 0:
        raise StatsError("counts must be non-negative")
    if total == 0:
        return Decimal(0).scaleb(-decimals).quantize(Decimal(1).scaleb(-decimals))
    scaled = 100 * 10**decimals * count
    q, r = divmod(scaled, total)
    if 2 * r >= total:
        q += 1
    return Decimal(q).scaleb(-decimals)


# ---------------------------------------------------------------------------
# regularized incomplete beta and the F-distribution tail
# ---------------------------------------------------------------------------

_BETA_TINY = 1e-300
_BETA_EPS = 1e-15
_BETA_MAX_ITER = 1000


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz's method)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _BETA_TINY:
        d = _BETA_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAX_ITER + 1):
        m2 = 2 * m
        numerator = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + numerator * d
        if abs(d) < _BETA_TINY:
            d = _BETA_TINY
        c = 1.0 + numerator / c
        if abs(c) < _BETA_TINY:
            c = _BETA_TINY
        d = 1.0 / d
        h *= d * c
        numerator = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + numerator * d
        if abs(d) < _BETA_TINY:
            d = _BETA_TINY
        c = 1.0 + numerator / c
        if abs(c) < _BETA_TINY:
            c = _BETA_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_EPS:
            return h
    raise StatsError("incomplete beta continued fraction did not converge")


def betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise StatsError("beta parameters must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b


def f_sf(f_value: float, df1: int, df2: int) -> float:
    """Upper-tail probability of the F distribution."""
    if df1 < 1 or df2 < 1:
        raise StatsError("degrees of freedom must be at least 1")
    if f_value <= 0.0:
        return 1.0
    if math.isinf(f_value):
        return 0.0
    x = df2 / (df2 + df1 * f_value)
    return betainc_reg(df2 / 2.0, df1 / 2.0, x)


# ---------------------------------------------------------------------------
# Levene's test
# ---------------------------------------------------------------------------


class LeveneResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    F: float
    df_between: int
    df_within: int
    p: float


def levene_test(
    groups: Sequence[Sequence[float]], center: str = "mean"
) -> LeveneResult:
    """Classical Levene test for equality of variances across groups.

    ``center="mean"`` is the classical form; ``center="median"`` gives the
    Brown-Forsythe variant. Degenerate inputs get defined results instead of
    division by zero: equal spread in every group yields F=0, p=1, and zero
    within-group variation with nonzero between-group variation yields
    F=inf, p=0.
    """
    if center not in ("mean", "median"):
        raise StatsError(f"unknown centering {center!r}")
    if len(groups) < 2:
        raise StatsError("Levene's test needs at least two groups")
    for g in groups:
        if len(g) < 2:
            raise StatsError("every group needs at least two values")
        for v in g:
            if not math.isfinite(v):
                raise StatsError("group values must be finite")

    deviations: list[list[float]] = []
    for g in groups:
        if center == "mean":
            loc = math.fsum(g) / len(g)
        else:
            loc = statistics.median(g)
        deviations.append([abs(v - loc) for v in g])

    k = len(groups)
    n_total = sum(len(z) for z in deviations)
    grand_mean = math.fsum(math.fsum(z) for z in deviations) / n_total
    group_means = [math.fsum(z) / len(z) for z in deviations]
    ss_between = math.fsum(
        len(z) * (mean - grand_mean) ** 2 for z, mean in zip(deviations, group_means)
    )
    ss_within = math.fsum(
        math.fsum((v - mean) ** 2 for v in z)
        for z, mean in zip(deviations, group_means)
    )
    df_between = k - 1
    df_within = n_total - k

    if ss_between == 0.0:
        f_value, p = 0.0, 1.0
    elif ss_within == 0.0:
        f_value, p = math.inf, 0.0
    else:
        f_value = (df_within / df_between) * (ss_between / ss_within)
        p = f_sf(f_value, df_between, df_within)
    return LeveneResult(F=f_value, df_between=df_between, df_within=df_within, p=p)


# ---------------------------------------------------------------------------
# Krippendorff's alpha (nominal)
# ---------------------------------------------------------------------------


class AgreementResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    layer: str
    alpha: float
    n_units: int
    n_annotators: int
    n_missing: int


def krippendorff_alpha(
    matrix: Sequence[Sequence[Optional[str]]],
    layer: str = "",
    level: str = "nominal",
) -> AgreementResult:
    """Krippendorff's alpha over a units-by-annotators matrix of codes.

    Missing cells are None; units with fewer than two codings drop out of the
    coincidence counting. The coincidence matrix is accumulated in exact
    rationals, so column or row permutations provably cannot change the
    result. Note that duplicating the unit set does change alpha slightly:
    the expected-disagreement term carries Krippendorff's finite-sample
    correction (the n-1 in its denominator), which rewards larger samples.
    """
    if level != "nominal":
        raise StatsError(f"only nominal-level alpha is implemented, not {level!r}")
    widths = {len(row) for row in matrix}
    if len(widths) > 1:
        raise StatsError("matrix rows must all have the same number of annotators")
    n_annotators = widths.pop() if widths else 0
    if n_annotators < 2:
        raise AgreementUndefinedError("alpha undefined: need at least two annotators")

    n_missing = sum(1 for row in matrix for v in row if v is None)
    kept: list[list[str]] = []
    for row in matrix:
        values = [v for v in row if v is not None]
        if len(values) >= 2:
            kept.append(values)
    if len(kept) < 2:
        raise AgreementUndefinedError(
            "alpha undefined: fewer than two units carry two or more codings"
        )

    coincidence: dict[tuple[str, str], Fraction] = defaultdict(Fraction)
    for values in kept:
        weight = Fraction(1, len(values) - 1)
        for i, a in enumerate(values):
            for j, b in enumerate(values):
                if i != j:
                    coincidence[(a, b)] += weight

    totals: dict[str, Fraction] = defaultdict(Fraction)
    for (a, _), value in coincidence.items():
        totals[a] += value
    n = sum(totals.values())

    observed = sum(v for (a, b), v in coincidence.items() if a != b)
    d_observed = observed / n
    if d_observed == 0:
        alpha = Fraction(1)
    else:
        expected = sum(
            totals[a] * totals[b]
            for a in totals
            for b in totals
            if a != b
        )
        d_expected = expected / (n * (n - 1))
        alpha = 1 - d_observed / d_expected

    return AgreementResult(
        layer=layer,
        alpha=float(alpha),
        n_units=len(kept),
        n_annotators=n_annotators,
        n_missing=n_missing,
    )


# ---------------------------------------------------------------------------
# clustering maps
# ---------------------------------------------------------------------------


class LicenseCluster(str, enum.Enum):
    OPEN = "OPEN"
    CLOSED_CLUSTER = "CLOSED_CLUSTER"


class QualityCluster(str, enum.Enum):
    GOOD = "GOOD"
    OKAY = "OKAY"
    POOR = "POOR"
    UNCLUSTERED = "UNCLUSTERED"


_LICENSE_CLUSTERS = {
    "PERMISSIVE": LicenseCluster.OPEN,
    "COPYLEFT": LicenseCluster.OPEN,
    "CLOSED": LicenseCluster.CLOSED_CLUSTER,
    "ACADEMIC": LicenseCluster.CLOSED_CLUSTER,
    "UNKNOWN": LicenseCluster.CLOSED_CLUSTER,
    "UNKNOWN_SAAS": LicenseCluster.CLOSED_CLUSTER,
}

_QUALITY_CLUSTERS = {
    "PUB": QualityCluster.GOOD,
    "PRO": QualityCluster.OKAY,
    "URL": QualityCluster.OKAY,
    "INS": QualityCluster.POOR,
    "NAM": QualityCluster.POOR,
    "MAN": QualityCluster.UNCLUSTERED,
    "NOT": QualityCluster.UNCLUSTERED,
}


def cluster_license(category: str) -> LicenseCluster:
    """Open (permissive + copyleft) versus everything effectively closed."""
    try:
        return _LICENSE_CLUSTERS[category]
    except KeyError:
        raise UnknownCodeError(
            f"{category!r} is not a license category code"
        ) from None


def cluster_mention_quality(code: str) -> QualityCluster:
    """Good (PUB), okay (PRO + URL), poor (INS + NAM); MAN and NOT stay out."""
    try:
        return _QUALITY_CLUSTERS[code]
    except KeyError:
        raise UnknownCodeError(f"{code!r} is not a mention type code") from None


# ---------------------------------------------------------------------------
# distribution and contingency tables
# ---------------------------------------------------------------------------


class DistributionRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    category: str
    count: int
    percent: Decimal


class DistributionTable(BaseModel):
    model_config = ConfigDict(frozen=True)

    rows: tuple[DistributionRow, ...]
    total: int
    percent_precision: int

    @model_validator(mode="after")
    def _check_total(self) -> "DistributionTable":
        if sum(r.count for r in self.rows) != self.total:
            raise ValueError("row counts do not sum to the table total")
        return self

    @classmethod
    def from_counts(
        cls,
        counts: Mapping[str, int],
        order: Sequence[str],
        percent_precision: int,
    ) -> "DistributionTable":
        """Build a table whose percents are recomputed from the counts."""
        unknown = set(counts) - set(order)
        if unknown:
            raise StatsError(f"categories outside the stated order: {sorted(unknown)}")
        total = sum(counts.values())
        rows = tuple(
            DistributionRow(
                category=category,
                count=counts.get(category, 0),
                percent=percent_exact(counts.get(category, 0), total, percent_precision),
            )
            for category in order
        )
        return cls(rows=rows, total=total, percent_precision=percent_precision)

    def percent_of(self, category: str) -> Decimal:
        for row in self.rows:
            if row.category == category:
                return row.percent
        raise KeyError(category)

    def count_of(self, category: str) -> int:
        for row in self.rows:
            if row.category == category:
                return row.count
        raise KeyError(category)

    def categories(self) -> tuple[str, ...]:
        return tuple(r.category for r in self.rows)


class ContingencyTable(BaseModel):
    model_config = ConfigDict(frozen=True)

    row_categories: tuple[str, ...]
    column_categories: tuple[str, ...]
    cells: tuple[tuple[int, ...], ...]
    row_totals: tuple[int, ...]
    column_totals: tuple[int, ...]
    grand_total: int
    cell_percents: tuple[tuple[Decimal, ...], ...]
    row_total_percents: tuple[Decimal, ...]
    percent_precision: int

    @model_validator(mode="after")
    def _check_marginals(self) -> "ContingencyTable":
        for r, row in enumerate(self.cells):
            if sum(row) != self.row_totals[r]:
                raise ValueError(f"row total mismatch in row {r}")
        for c in range(len(self.column_categories)):
            if sum(row[c] for row in self.cells) != self.column_totals[c]:
                raise ValueError(f"column total mismatch in column {c}")
        if sum(self.row_totals) != self.grand_total:
            raise ValueError("grand total mismatch")
        return self

    def cell(self, row_category: str, column_category: str) -> int:
        r = self.row_categories.index(row_category)
        c = self.column_categories.index(column_category)
        return self.cells[r][c]

    def cell_percent(self, row_category: str, column_category: str) -> Decimal:
        r = self.row_categories.index(row_category)
        c = self.column_categories.index(column_category)
        return self.cell_percents[r][c]

    def row_total(self, row_category: str) -> int:
        return self.row_totals[self.row_categories.index(row_category)]

    def row_percent(self, row_category: str) -> Decimal:
        return self.row_total_percents[self.row_categories.index(row_category)]


#: mention-quality codes whose records stay out of type/license tables
_EXCLUDED_QUALITY = ("NA", "UN")

#: license categories folded together for contingency reporting
_LICENSE_ROLLUP = {"UNKNOWN_SAAS": "UNKNOWN"}

_LICENSE_ROW_ORDER = tuple(
    c.code for c in LICENSE_CATEGORY.codes if c.code not in _LICENSE_ROLLUP
)
_TYPE_ORDER = tuple(c.code for c in MENTION_TYPE.codes)


def _primary_annotation(annotated: AnnotatedMention, field: str):
    """First annotation of the mention that fills the given layer."""
    for annotation in annotated.annotations:
        if getattr(annotation, field) is not None:
            return annotation
    return None


def mention_type_by_license(
    annots: Iterable[AnnotatedMention], percent_precision: int = 2
) -> ContingencyTable:
    """License category by mention type, excluding non-software and unclear records.

    Annotations whose mention quality is NA or UN are excluded; the
    SaaS-without-license category is folded into Unknown. Only mention types
    that actually occur become columns. Cell percents are of the grand total.
    """
    counts: dict[tuple[str, str], int] = defaultdict(int)
    for annotated in annots:
        for annotation in annotated.annotations:
            if annotation.mention_quality in _EXCLUDED_QUALITY:
                continue
            license_category = annotation.license_category
            mention_type = annotation.mention_type
            if license_category is None or mention_type is None:
                continue
            if license_category not in LICENSE_CATEGORY:
                raise UnknownCodeError(f"unknown license category {license_category!r}")
            if mention_type not in MENTION_TYPE:
                raise UnknownCodeError(f"unknown mention type {mention_type!r}")
            row = _LICENSE_ROLLUP.get(license_category, license_category)
            counts[(row, mention_type)] += 1

    column_categories = tuple(
        t for t in _TYPE_ORDER if any(counts.get((r, t), 0) for r in _LICENSE_ROW_ORDER)
    )
    cells = tuple(
        tuple(counts.get((r, t), 0) for t in column_categories)
        for r in _LICENSE_ROW_ORDER
    )
    row_totals = tuple(sum(row) for row in cells)
    column_totals = tuple(
        sum(row[c] for row in cells) for c in range(len(column_categories))
    )
    grand_total = sum(row_totals)
    cell_percents = tuple(
        tuple(percent_exact(v, grand_total, percent_precision) for v in row)
        for row in cells
    )
    row_total_percents = tuple(
        percent_exact(v, grand_total, percent_precision) for v in row_totals
    )
    return ContingencyTable(
        row_categories=_LICENSE_ROW_ORDER,
        column_categories=column_categories,
        cells=cells,
        row_totals=row_totals,
        column_totals=column_totals,
        grand_total=grand_total,
        cell_percents=cell_percents,
        row_total_percents=row_total_percents,
        percent_precision=percent_precision,
    )


def mention_type_distribution(
    annots: Iterable[AnnotatedMention],
    since_year: Optional[int] = None,
    percent_precision: int = 1,
) -> DistributionTable:
    """Counts and percents per mention type, optionally filtered by year.

    Every annotation that carries a mention type contributes one count; the
    year filter keeps mentions whose publication year is at or after the
    given year (mentions without a year are dropped by the filter).
    """
    counts: dict[str, int] = defaultdict(int)
    for annotated in annots:
        if since_year is not None:
            year = annotated.mention.pub_year
            if year is None or year < since_year:
                continue
        for annotation in annotated.annotations:
            mention_type = annotation.mention_type
            if mention_type is None:
                continue
            if mention_type not in MENTION_TYPE:
                raise UnknownCodeError(f"unknown mention type {mention_type!r}")
            counts[mention_type] += 1
    return DistributionTable.from_counts(counts, _TYPE_ORDER, percent_precision)


#: Reference mention-type distribution from hand-coded samples of 2015-era
#: biology papers (PUB 105, MAN 6, PRO 15, INS 53, URL 13, NAM 90 of 282).
BASELINE_HOWISON2015 = DistributionTable.from_counts(
    {"PUB": 105, "MAN": 6, "PRO": 15, "INS": 53, "URL": 13, "NAM": 90},
    order=("PUB", "PRO", "URL", "MAN", "INS", "NAM"),
    percent_precision=1,
)


class DeltaRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    category: str
    count: int
    baseline_count: int
    percent: Decimal
    baseline_percent: Decimal
    delta: Decimal


class DeltaTable(BaseModel):
    model_config = ConfigDict(frozen=True)

    rows: tuple[DeltaRow, ...]
    percent_precision: int

    def delta_of(self, category: str) -> Decimal:
        for row in self.rows:
            if row.category == category:
                return row.delta
        raise KeyError(category)


def compare_to_baseline(
    dist: DistributionTable, baseline: DistributionTable
) -> DeltaTable:
    """Per-category percentage-point deltas against a baseline distribution.

    Deltas are taken between the stated (already rounded) percents, matching
    how such comparisons are quoted. A category missing from one side is
    imputed with count 0; a category that has actual counts on one side but
    is entirely absent from the other side's universe is a real mismatch and
    raises.
    """
    if dist.percent_precision != baseline.percent_precision:
        raise StatsError("cannot compare tables with different percent precision")
    universe = list(dist.categories()) + [
        c for c in baseline.categories() if c not in dist.categories()
    ]
    zero = Decimal(0).scaleb(-dist.percent_precision)
    rows = []
    for category in universe:
        in_dist = category in dist.categories()
        in_baseline = category in baseline.categories()
        count = dist.count_of(category) if in_dist else 0
        baseline_count = baseline.count_of(category) if in_baseline else 0
        if (count and not in_baseline) or (baseline_count and not in_dist):
            raise StatsError(
                f"category {category!r} with nonzero count is outside the other "
                "table's universe"
            )
        percent = dist.percent_of(category) if in_dist else zero
        baseline_percent = baseline.percent_of(category) if in_baseline else zero
        rows.append(
            DeltaRow(
                category=category,
                count=count,
                baseline_count=baseline_count,
                percent=percent,
                baseline_percent=baseline_percent,
                delta=percent - baseline_percent,
            )
        )
    return DeltaTable(rows=tuple(rows), percent_precision=dist.percent_precision)


_CLUSTER_ORDER = (QualityCluster.GOOD, QualityCluster.OKAY, QualityCluster.POOR)


def cluster_distribution(dist: DistributionTable) -> DistributionTable:
    """Good/okay/poor rollup of a mention-type distribution.

    Counts are summed per cluster. Cluster percents are the sums of the
    member types' already-rounded percents — the presentation convention for
    such rollups — so they can differ from a recomputation by a final digit.
    Unclustered types (MAN, NOT) are left out.
    """
    counts: dict[str, int] = {c.value: 0 for c in _CLUSTER_ORDER}
    percents: dict[str, Decimal] = {
        c.value: Decimal(0).scaleb(-dist.percent_precision) for c in _CLUSTER_ORDER
    }
    for row in dist.rows:
        cluster = cluster_mention_quality(row.category)
        if cluster is QualityCluster.UNCLUSTERED:
            continue
        counts[cluster.value] += row.count
        percents[cluster.value] += row.percent
    rows = tuple(
        DistributionRow(
            category=c.value, count=counts[c.value], percent=percents[c.value]
        )
        for c in _CLUSTER_ORDER
    )
    return DistributionTable(
        rows=rows,
        total=sum(counts.values()),
        percent_precision=dist.percent_precision,
    )


# ---------------------------------------------------------------------------
# link-quality and extraction summaries
# ---------------------------------------------------------------------------


class RateStat(BaseModel):
    model_config = ConfigDict(frozen=True)

    numerator: int
    denominator: int

    @property
    def rate(self) -> Optional[float]:
        if self.denominator == 0:
            return None
        return self.numerator / self.denominator

    @property
    def percent(self) -> Optional[Decimal]:
        if self.denominator == 0:
            return None
        return percent_exact(self.numerator, self.denominator, 1)


class LinkQualityStats(BaseModel):
    model_config = ConfigDict(frozen=True)

    multi_target: RateStat
    wrong_target: RateStat
    unlinked: RateStat


_LINK_VERDICTS = ("CORRECT", "WRONG")


def link_quality_stats(
    joined: Sequence[tuple[MentionRecord, Sequence[LinkedRepoRecord]]],
    annots: Iterable[AnnotatedMention],
) -> LinkQualityStats:
    """Link-health rates over a mention+link join with link-quality codings.

    Three denominators, each reported alongside its numerator so an undefined
    rate (zero denominator) stays distinguishable from a zero rate:

    * multi_target: of mentions with links, how many point at more than one
      distinct URL;
    * wrong_target: of linked mentions with a single-target verdict
      (CORRECT or WRONG), how many are wrong;
    * unlinked: of potentially linkable mentions — those annotated as actual
      software, plus any non-software carrying a link — how many have no link.
    """
    annotations_by_id: dict[str, AnnotatedMention] = {}
    for annotated in annots:
        annotations_by_id[annotated.mention.mention_id] = annotated

    with_links = 0
    multi_target = 0
    verdicts = 0
    wrong = 0
    potentially_linkable = 0
    linkable_without_link = 0
    for mention, links in joined:
        has_links = len(links) > 0
        distinct_urls = {l.url for l in links}
        annotated = annotations_by_id.get(mention.mention_id)
        quality = None
        link_quality = None
        if annotated is not None:
            quality_annotation = _primary_annotation(annotated, "mention_quality")
            if quality_annotation is not None:
                quality = quality_annotation.mention_quality
            link_annotation = _primary_annotation(annotated, "link_quality")
            if link_annotation is not None:
                link_quality = link_annotation.link_quality

        if has_links:
            with_links += 1
            if len(distinct_urls) > 1:
                multi_target += 1
            if link_quality in _LINK_VERDICTS:
                verdicts += 1
                if link_quality == "WRONG":
                    wrong += 1

        is_software = quality is not None and quality != "NA"
        if is_software or has_links:
            potentially_linkable += 1
            if not has_links:
                linkable_without_link += 1

    return LinkQualityStats(
        multi_target=RateStat(numerator=multi_target, denominator=with_links),
        wrong_target=RateStat(numerator=wrong, denominator=verdicts),
        unlinked=RateStat(
            numerator=linkable_without_link, denominator=potentially_linkable
        ),
    )


class ExtractionStats(BaseModel):
    model_config = ConfigDict(frozen=True)

    incorrect_extraction: RateStat
    not_software: RateStat


def extraction_and_entity_stats(
    annots: Iterable[AnnotatedMention],
) -> ExtractionStats:
    """Retrieval-error and not-software shares over an annotated sample."""
    retrieval_n = 0
    retrieval_total = 0
    not_software = 0
    quality_total = 0
    for annotated in annots:
        retrieval_annotation = _primary_annotation(annotated, "retrieval_quality")
        if retrieval_annotation is not None:
            retrieval_total += 1
            if retrieval_annotation.retrieval_quality == "N":
                retrieval_n += 1
        quality_annotation = _primary_annotation(annotated, "mention_quality")
        if quality_annotation is not None:
            quality_total += 1
            if quality_annotation.mention_quality == "NA":
                not_software += 1
    return ExtractionStats(
        incorrect_extraction=RateStat(
            numerator=retrieval_n, denominator=retrieval_total
        ),
        not_software=RateStat(numerator=not_software, denominator=quality_total),
    )
