"""Statistical core: exact rounding, Levene, alpha, tables, rates."""

import math
from collections import Counter
from decimal import Decimal

import pytest

from mention_lens.model import (
    AnnotatedMention,
    AnnotationRecord,
    LinkedRepoRecord,
    LinkSource,
    MentionRecord,
)
from mention_lens.prng import SplitMix64
from mention_lens.stats import (
    BASELINE_HOWISON2015,
    AgreementUndefinedError,
    ContingencyTable,
    DistributionTable,
    LicenseCluster,
    QualityCluster,
    RateStat,
    StatsError,
    UnknownCodeError,
    betainc_reg,
    cluster_distribution,
    cluster_license,
    cluster_mention_quality,
    compare_to_baseline,
    extraction_and_entity_stats,
    f_sf,
    krippendorff_alpha,
    levene_test,
    link_quality_stats,
    mention_type_by_license,
    mention_type_distribution,
    percent_exact,
)

scipy_special = pytest.importorskip("scipy.special")
scipy_stats = pytest.importorskip("scipy.stats")


class TestPercentExact:
    @pytest.mark.parametrize(
        "count,total,decimals,expected",
        [
            (1, 2, 1, "50.0"),
            (1, 8, 1, "12.5"),
            (1, 16, 1, "6.3"),      # 6.25 rounds up, not to even
            (1, 3, 1, "33.3"),
            (2, 3, 1, "66.7"),
            (36, 55, 1, "65.5"),    # 65.4545...
            (23, 163, 2, "14.11"),
            (57, 163, 2, "34.97"),
            (0, 7, 1, "0.0"),
            (7, 7, 1, "100.0"),
            (29, 150, 1, "19.3"),
            (1, 800, 1, "0.1"),     # 0.125 -> 0.1 (the half-up step is at the last digit)
            (1, 1000, 1, "0.1"),    # 0.1 exactly
            (1, 2000, 1, "0.1"),    # 0.05 is the exact boundary: rounds up
            (1, 2001, 1, "0.0"),    # just below the boundary
        ],
    )
    def test_values(self, count, total, decimals, expected):
        result = percent_exact(count, total, decimals)
        assert str(result) == expected

    def test_zero_total_yields_zero_display(self):
        assert str(percent_exact(0, 0, 1)) == "0.0"
        assert str(percent_exact(0, 0, 2)) == "0.00"

    def test_exponent_matches_precision(self):
        assert percent_exact(1, 3, 2).as_tuple().exponent == -2
        assert percent_exact(1, 3, 0).as_tuple().exponent == 0

    def test_differs_from_bankers_rounding(self):
        # float round() is half-even; this table must be half-up
        assert str(percent_exact(1, 16, 1)) == "6.3"
        assert round(100 * 1 / 16, 1) == 6.2

    def test_negative_inputs_rejected(self):
        with pytest.raises(StatsError):
            percent_exact(-1, 5, 1)
        with pytest.raises(StatsError):
            percent_exact(1, 5, -1)


class TestBetaInc:
    def test_edges(self):
        assert betainc_reg(2.0, 3.0, 0.0) == 0.0
        assert betainc_reg(2.0, 3.0, 1.0) == 1.0

    def test_invalid_parameters(self):
        with pytest.raises(StatsError):
            betainc_reg(0.0, 1.0, 0.5)
        with pytest.raises(StatsError):
            betainc_reg(1.0, -2.0, 0.5)

    def test_against_scipy_grid(self):
        shapes = [0.5, 1.0, 2.5, 17.0, 100.0]
        xs = [1e-6, 0.1, 0.3, 0.5, 0.7, 0.9, 1 - 1e-6]
        for a in shapes:
            for b in shapes:
                for x in xs:
                    expected = float(scipy_special.betainc(a, b, x))
                    assert betainc_reg(a, b, x) == pytest.approx(expected, abs=1e-10)

    def test_large_shape_parameters(self):
        # the shape pair from an F test with thousands of observations
        a, b, x = 1648.0, 17.5, 0.924
        expected = float(scipy_special.betainc(a, b, x))
        assert betainc_reg(a, b, x) == pytest.approx(expected, abs=1e-10)

    def test_symmetry_identity(self):
        for a, b, x in [(2.0, 5.0, 0.3), (0.5, 0.5, 0.8), (10.0, 1.5, 0.02)]:
            assert betainc_reg(a, b, x) == pytest.approx(
                1.0 - betainc_reg(b, a, 1.0 - x), abs=1e-12
            )


class TestFSurvival:
    def test_edges(self):
        assert f_sf(0.0, 3, 10) == 1.0
        assert f_sf(-2.0, 3, 10) == 1.0
        assert f_sf(math.inf, 3, 10) == 0.0
        with pytest.raises(StatsError):
            f_sf(1.0, 0, 10)

    def test_against_scipy(self):
        for f, d1, d2 in [(2.4, 1, 6), (7.73, 35, 3296), (0.3, 5, 5), (15.0, 2, 40)]:
            expected = float(scipy_stats.f.sf(f, d1, d2))
            assert f_sf(f, d1, d2) == pytest.approx(expected, abs=1e-10)


class TestLevene:
    def test_equal_spread_is_exactly_zero(self):
        result = levene_test([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
        assert result.F == 0.0
        assert result.p == 1.0
        assert (result.df_between, result.df_within) == (1, 4)

    def test_constant_groups(self):
        result = levene_test([[5.0, 5.0], [5.0, 5.0]])
        assert result.F == 0.0
        assert result.p == 1.0

    def test_zero_within_nonzero_between(self):
        result = levene_test([[0.0, 0.0], [1.0, -1.0]])
        assert math.isinf(result.F)
        assert result.p == 0.0

    def test_two_group_oracle(self):
        # |deviations| means 1.0 and 2.0; SSB = 2, SSW = 5, F = 6 * 2/5
        result = levene_test([[1.0, 2.0, 3.0, 4.0], [2.0, 4.0, 6.0, 8.0]])
        assert result.F == pytest.approx(2.4, abs=1e-9)
        assert result.p == pytest.approx(0.17230829673039982, abs=1e-10)
        assert (result.df_between, result.df_within) == (1, 6)

    @pytest.mark.parametrize("scale", [2.5, -3.0, 1e6, 1e-7])
    def test_scale_invariance(self, scale):
        groups = [[1.0, 2.0, 3.0, 4.0], [2.0, 4.0, 6.0, 8.0], [1.0, 9.0, 2.0]]
        base = levene_test(groups)
        scaled = levene_test([[scale * v for v in g] for g in groups])
        assert scaled.F == pytest.approx(base.F, rel=1e-9)

    def test_per_group_shift_invariance(self):
        groups = [[1.0, 5.0, 2.0], [0.0, 3.0, 3.5, 1.0]]
        shifted = [[v + 100.0 for v in groups[0]], [v - 7.0 for v in groups[1]]]
        assert levene_test(shifted).F == pytest.approx(levene_test(groups).F, rel=1e-12)

    def test_permutation_within_groups_exact(self):
        groups = [[0.1, 0.7, 0.3, 0.9], [2.0, 1.5, 1.1]]
        permuted = [[0.9, 0.1, 0.7, 0.3], [1.1, 2.0, 1.5]]
        a, b = levene_test(groups), levene_test(permuted)
        assert (a.F, a.p) == (b.F, b.p)

    def test_against_scipy_mean_center(self):
        groups = [
            [3.1, 4.5, 2.2, 6.7, 5.5],
            [10.0, 9.1, 12.2, 8.8],
            [1.0, 1.2, 0.8, 1.1, 0.9, 1.3],
        ]
        expected_f, expected_p = scipy_stats.levene(*groups, center="mean")
        result = levene_test(groups)
        assert result.F == pytest.approx(float(expected_f), rel=1e-9)
        assert result.p == pytest.approx(float(expected_p), abs=1e-10)

    def test_against_scipy_median_center(self):
        groups = [[1.0, 2.0, 10.0, 3.0], [5.0, 5.5, 4.0, 20.0]]
        expected_f, expected_p = scipy_stats.levene(*groups, center="median")
        result = levene_test(groups, center="median")
        assert result.F == pytest.approx(float(expected_f), rel=1e-9)
        assert result.p == pytest.approx(float(expected_p), abs=1e-10)

    def test_errors(self):
        with pytest.raises(StatsError):
            levene_test([[1.0, 2.0]])
        with pytest.raises(StatsError):
            levene_test([[1.0, 2.0], [3.0]])
        with pytest.raises(StatsError):
            levene_test([[1.0, math.nan], [1.0, 2.0]])
        with pytest.raises(StatsError):
            levene_test([[1.0, 2.0], [3.0, 4.0]], center="mode")


def reference_alpha(matrix):
    """Float-arithmetic coincidence-matrix alpha, kept deliberately separate."""
    units = [[v for v in row if v is not None] for row in matrix]
    units = [u for u in units if len(u) >= 2]
    o = Counter()
    for u in units:
        for i, a in enumerate(u):
            for j, b in enumerate(u):
                if i != j:
                    o[(a, b)] += 1.0 / (len(u) - 1)
    totals = Counter()
    for (a, _), v in o.items():
        totals[a] += v
    n = sum(totals.values())
    d_obs = sum(v for (a, b), v in o.items() if a != b) / n
    if d_obs == 0.0:
        return 1.0
    d_exp = sum(
        totals[a] * totals[b] for a in totals for b in totals if a != b
    ) / (n * (n - 1))
    return 1.0 - d_obs / d_exp


def _random_matrix(rng, n_units, n_annotators, categories, missing_rate_pct):
    matrix = []
    for _ in range(n_units):
        row = []
        for _ in range(n_annotators):
            if rng.randbelow(100) < missing_rate_pct:
                row.append(None)
            else:
                row.append(categories[rng.randbelow(len(categories))])
        matrix.append(row)
    return matrix


class TestKrippendorff:
    WORKED = [["a", "a"], ["b", "b"], ["a", "b"], ["b", "a"]]

    def test_worked_example_exact(self):
        result = krippendorff_alpha(self.WORKED, layer="demo")
        assert result.alpha == 0.125
        assert result.layer == "demo"
        assert result.n_units == 4
        assert result.n_annotators == 2
        assert result.n_missing == 0

    def test_perfect_agreement_exactly_one(self):
        assert krippendorff_alpha([["a", "a"], ["b", "b"], ["c", "c"]]).alpha == 1.0
        assert krippendorff_alpha([["x", "x", "x"], ["x", "x", "x"]]).alpha == 1.0

    def test_unit_permutation_invariance(self):
        rng = SplitMix64(99)
        matrix = _random_matrix(rng, 40, 3, ["a", "b", "c", "d"], 20)
        base = krippendorff_alpha(matrix).alpha
        order = list(range(len(matrix)))
        for _ in range(5):
            # Fisher-Yates on the unit order
            for i in range(len(order) - 1, 0, -1):
                j = rng.randbelow(i + 1)
                order[i], order[j] = order[j], order[i]
            assert krippendorff_alpha([matrix[i] for i in order]).alpha == base

    def test_annotator_permutation_invariance(self):
        rng = SplitMix64(7)
        matrix = _random_matrix(rng, 30, 4, ["a", "b", "c"], 15)
        base = krippendorff_alpha(matrix).alpha
        for cols in ([3, 2, 1, 0], [1, 0, 3, 2], [2, 3, 0, 1]):
            permuted = [[row[c] for c in cols] for row in matrix]
            assert krippendorff_alpha(permuted).alpha == base

    def test_matches_reference_on_random_matrices(self):
        rng = SplitMix64(5150)
        for _ in range(25):
            matrix = _random_matrix(
                rng, 10 + rng.randbelow(40), 2 + rng.randbelow(4),
                ["a", "b", "c", "d", "e"][: 2 + rng.randbelow(3)],
                rng.randbelow(35),
            )
            try:
                mine = krippendorff_alpha(matrix).alpha
            except AgreementUndefinedError:
                continue
            assert mine == pytest.approx(reference_alpha(matrix), abs=1e-12)

    def test_missing_data_accounting(self):
        matrix = [
            ["a", "a", None],
            ["b", None, "b"],
            [None, "c", "c"],
            ["a", "b", None],
            ["a", None, None],  # single coding: excluded from units
        ]
        result = krippendorff_alpha(matrix)
        assert result.n_units == 4
        assert result.n_missing == 6
        assert result.alpha == pytest.approx(reference_alpha(matrix), abs=1e-12)

    def test_finite_sample_correction_pins_duplication_behavior(self):
        # The expected-disagreement denominator carries n(n-1), so k copies of
        # the worked matrix give alpha/k, converging to the large-sample 0.
        for k in (2, 5, 10):
            assert krippendorff_alpha(self.WORKED * k).alpha == 0.125 / k

    def test_undefined_cases(self):
        with pytest.raises(AgreementUndefinedError):
            krippendorff_alpha([["a"], ["b"]])  # one annotator
        with pytest.raises(AgreementUndefinedError):
            krippendorff_alpha([["a", "a"], ["b", None], [None, "c"]])  # 1 pairable unit
        with pytest.raises(AgreementUndefinedError):
            krippendorff_alpha([])

    def test_invalid_inputs(self):
        with pytest.raises(StatsError):
            krippendorff_alpha([["a", "a"], ["b", "b", "b"]])  # ragged
        with pytest.raises(StatsError):
            krippendorff_alpha([["a", "a"], ["b", "b"]], level="interval")


class TestClusters:
    def test_license_map_total(self):
        assert cluster_license("PERMISSIVE") is LicenseCluster.OPEN
        assert cluster_license("COPYLEFT") is LicenseCluster.OPEN
        for code in ("CLOSED", "ACADEMIC", "UNKNOWN", "UNKNOWN_SAAS"):
            assert cluster_license(code) is LicenseCluster.CLOSED_CLUSTER
        with pytest.raises(UnknownCodeError):
            cluster_license("FREEWARE")

    def test_quality_map_total(self):
        assert cluster_mention_quality("PUB") is QualityCluster.GOOD
        assert cluster_mention_quality("PRO") is QualityCluster.OKAY
        assert cluster_mention_quality("URL") is QualityCluster.OKAY
        assert cluster_mention_quality("INS") is QualityCluster.POOR
        assert cluster_mention_quality("NAM") is QualityCluster.POOR
        assert cluster_mention_quality("MAN") is QualityCluster.UNCLUSTERED
        assert cluster_mention_quality("NOT") is QualityCluster.UNCLUSTERED
        with pytest.raises(UnknownCodeError):
            cluster_mention_quality("XYZ")


def _ann(mention_id, annotator="a1", **kwargs):
    kwargs.setdefault("retrieval_quality", "Y")
    kwargs.setdefault("confidence", 4)
    return AnnotationRecord(mention_id=mention_id, annotator_id=annotator, **kwargs)


def _annotated(mention_id, *, year=None, annotations=None, **kwargs):
    mention = MentionRecord(
        mention_id=mention_id, software_raw="R", pub_id="p", pub_year=year
    )
    if annotations is None:
        annotations = [_ann(mention_id, **kwargs)]
    return AnnotatedMention(mention=mention, annotations=tuple(annotations))


class TestDistributionTable:
    def test_from_counts_recomputes_percents(self):
        table = DistributionTable.from_counts(
            {"PUB": 2, "NAM": 1}, ("PUB", "PRO", "NAM"), 1
        )
        assert table.total == 3
        assert table.categories() == ("PUB", "PRO", "NAM")
        assert str(table.percent_of("PUB")) == "66.7"
        assert table.count_of("PRO") == 0
        assert str(table.percent_of("PRO")) == "0.0"

    def test_unknown_category_rejected(self):
        with pytest.raises(StatsError):
            DistributionTable.from_counts({"ZZZ": 1}, ("PUB",), 1)

    def test_total_validator(self):
        table = DistributionTable.from_counts({"PUB": 2}, ("PUB",), 1)
        with pytest.raises(ValueError):
            DistributionTable(rows=table.rows, total=5, percent_precision=1)

    def test_accessor_keyerror(self):
        table = DistributionTable.from_counts({"PUB": 1}, ("PUB",), 1)
        with pytest.raises(KeyError):
            table.percent_of("NAM")

    def test_single_record_is_hundred(self):
        table = DistributionTable.from_counts({"NAM": 1}, ("NAM",), 1)
        assert str(table.percent_of("NAM")) == "100.0"


class TestMentionTypeDistribution:
    def test_counts_and_year_filter(self):
        annots = [
            _annotated("m1", year=2015, mention_type="PUB"),
            _annotated("m2", year=2016, mention_type="PUB"),
            _annotated("m3", year=2020, mention_type="NAM"),
            _annotated("m4", year=None, mention_type="URL"),
        ]
        full = mention_type_distribution(annots)
        assert full.total == 4
        filtered = mention_type_distribution(annots, since_year=2016)
        assert filtered.total == 2
        assert filtered.count_of("PUB") == 1
        assert filtered.count_of("NAM") == 1
        assert filtered.count_of("URL") == 0  # no year, dropped by the filter

    def test_every_annotation_counts(self):
        annots = [
            _annotated(
                "m1",
                annotations=[
                    _ann("m1", "a1", mention_type="PUB"),
                    _ann("m1", "a2", mention_type="NAM"),
                    _ann("m1", "a3"),  # no type: contributes nothing
                ],
            )
        ]
        table = mention_type_distribution(annots)
        assert table.total == 2

    def test_row_order_is_declaration_order(self):
        table = mention_type_distribution([_annotated("m1", mention_type="PUB")])
        assert table.categories() == ("PUB", "PRO", "URL", "MAN", "INS", "NAM", "NOT")

    def test_unknown_type_raises(self):
        with pytest.raises(UnknownCodeError):
            mention_type_distribution([_annotated("m1", mention_type="ZzZ")])


class TestBaseline:
    def test_frozen_reference_values(self):
        table = BASELINE_HOWISON2015
        assert table.total == 282
        assert table.categories() == ("PUB", "PRO", "URL", "MAN", "INS", "NAM")
        assert str(table.percent_of("PUB")) == "37.2"
        assert str(table.percent_of("PRO")) == "5.3"
        assert str(table.percent_of("URL")) == "4.6"
        assert str(table.percent_of("MAN")) == "2.1"
        assert str(table.percent_of("INS")) == "18.8"
        assert str(table.percent_of("NAM")) == "31.9"

    def test_identity_comparison_is_zero(self):
        deltas = compare_to_baseline(BASELINE_HOWISON2015, BASELINE_HOWISON2015)
        for row in deltas.rows:
            assert row.delta == Decimal("0.0")

    def test_deltas_use_stated_percents(self):
        dist = DistributionTable.from_counts(
            {"PUB": 1, "NAM": 2}, ("PUB", "PRO", "URL", "MAN", "INS", "NAM"), 1
        )
        deltas = compare_to_baseline(dist, BASELINE_HOWISON2015)
        assert deltas.delta_of("PUB") == Decimal("33.3") - Decimal("37.2")
        assert deltas.delta_of("NAM") == Decimal("66.7") - Decimal("31.9")
        # zero-count category imputes the baseline percent negated
        assert deltas.delta_of("MAN") == Decimal("0.0") - Decimal("2.1")

    def test_nonzero_category_outside_universe_raises(self):
        dist = DistributionTable.from_counts(
            {"NOT": 3}, ("PUB", "PRO", "URL", "MAN", "INS", "NAM", "NOT"), 1
        )
        with pytest.raises(StatsError):
            compare_to_baseline(dist, BASELINE_HOWISON2015)

    def test_zero_count_extra_category_tolerated(self):
        dist = DistributionTable.from_counts(
            {"PUB": 1}, ("PUB", "PRO", "URL", "MAN", "INS", "NAM", "NOT"), 1
        )
        deltas = compare_to_baseline(dist, BASELINE_HOWISON2015)
        assert deltas.delta_of("NOT") == Decimal("0.0")

    def test_precision_mismatch_raises(self):
        two_dp = DistributionTable.from_counts({"PUB": 1}, ("PUB",), 2)
        with pytest.raises(StatsError):
            compare_to_baseline(two_dp, BASELINE_HOWISON2015)


class TestClusterDistribution:
    def test_rollup_counts_and_percents(self):
        dist = DistributionTable.from_counts(
            {"PUB": 2, "PRO": 1, "URL": 1, "MAN": 1, "INS": 1, "NAM": 1, "NOT": 1},
            ("PUB", "PRO", "URL", "MAN", "INS", "NAM", "NOT"),
            1,
        )
        clusters = cluster_distribution(dist)
        assert clusters.categories() == ("GOOD", "OKAY", "POOR")
        assert clusters.count_of("GOOD") == 2
        assert clusters.count_of("OKAY") == 2
        assert clusters.count_of("POOR") == 2
        assert clusters.total == 6  # MAN and NOT dropped

    def test_percents_are_sums_of_rounded_members(self):
        dist = DistributionTable.from_counts(
            {"PUB": 1, "PRO": 1, "URL": 1}, ("PUB", "PRO", "URL"), 1
        )
        clusters = cluster_distribution(dist)
        # 33.3 + 33.3, not round(2/3)
        assert clusters.percent_of("OKAY") == Decimal("66.6")
        assert str(percent_exact(2, 3, 1)) == "66.7"


class TestMentionTypeByLicense:
    def _six_record_fixture(self):
        return [
            _annotated("m1", mention_type="INS", mention_quality="SC",
                       license_category="CLOSED"),
            _annotated("m2", mention_type="INS", mention_quality="SP",
                       license_category="CLOSED"),
            _annotated("m3", mention_type="PUB", mention_quality="SC",
                       license_category="PERMISSIVE"),
            _annotated("m4", mention_type="NAM", mention_quality="SN",
                       license_category="UNKNOWN_SAAS"),
            _annotated("m5", mention_type="PRO", mention_quality="SC",
                       license_category="COPYLEFT"),
            _annotated("m6", mention_type="PUB", mention_quality="UN",
                       license_category="PERMISSIVE"),
        ]

    def test_hand_tallied_cells(self):
        table = mention_type_by_license(self._six_record_fixture())
        assert table.grand_total == 5  # the UN record is excluded
        assert table.row_categories == (
            "CLOSED", "ACADEMIC", "PERMISSIVE", "COPYLEFT", "UNKNOWN"
        )
        assert table.column_categories == ("PUB", "PRO", "INS", "NAM")
        assert table.cell("CLOSED", "INS") == 2
        assert table.cell("UNKNOWN", "NAM") == 1  # SaaS folded into Unknown
        assert table.row_total("CLOSED") == 2
        assert table.row_total("ACADEMIC") == 0
        assert str(table.cell_percent("CLOSED", "INS")) == "40.00"
        assert str(table.row_percent("PERMISSIVE")) == "20.00"
        assert table.column_totals == (1, 1, 2, 1)

    def test_marginal_validator(self):
        table = mention_type_by_license(self._six_record_fixture())
        with pytest.raises(ValueError):
            ContingencyTable(
                row_categories=table.row_categories,
                column_categories=table.column_categories,
                cells=table.cells,
                row_totals=tuple(t + 1 for t in table.row_totals),
                column_totals=table.column_totals,
                grand_total=table.grand_total,
                cell_percents=table.cell_percents,
                row_total_percents=table.row_total_percents,
                percent_precision=2,
            )

    def test_empty_input(self):
        table = mention_type_by_license([])
        assert table.grand_total == 0
        assert table.column_categories == ()

    def test_na_records_excluded(self):
        annots = [
            _annotated("m1", mention_quality="NA"),
            _annotated("m2", mention_type="PUB", mention_quality="SC",
                       license_category="CLOSED"),
        ]
        assert mention_type_by_license(annots).grand_total == 1


def _link(mention_id, url):
    return LinkedRepoRecord(mention_id=mention_id, source=LinkSource.GITHUB, url=url)


class TestRateStat:
    def test_defined(self):
        stat = RateStat(numerator=7, denominator=62)
        assert stat.rate == pytest.approx(7 / 62)
        assert str(stat.percent) == "11.3"

    def test_undefined_is_none_not_zero(self):
        stat = RateStat(numerator=0, denominator=0)
        assert stat.rate is None
        assert stat.percent is None


class TestLinkQualityStats:
    def _fixture(self):
        mentions = {i: MentionRecord(mention_id=f"m{i}", software_raw="R", pub_id="p")
                    for i in range(1, 8)}
        joined = [
            (mentions[1], [_link("m1", "https://a"), _link("m1", "https://b")]),
            (mentions[2], [_link("m2", "https://c")]),
            (mentions[3], [_link("m3", "https://d")]),
            (mentions[4], []),
            (mentions[5], []),
            (mentions[6], [_link("m6", "https://e"), _link("m6", "https://e")]),
            (mentions[7], []),
        ]
        annots = [
            _annotated("m1", mention_quality="SC", link_quality="MULTIPLE_CONFLICT",
                       mention_type="NAM"),
            _annotated("m2", mention_quality="SC", link_quality="CORRECT",
                       mention_type="NAM"),
            _annotated("m3", mention_quality="SC", link_quality="WRONG",
                       mention_type="NAM"),
            _annotated("m4", mention_quality="SN", link_quality="NONE",
                       mention_type="NAM"),
            _annotated("m5", mention_quality="NA"),
            _annotated("m6", mention_quality="NA"),
            # m7 has no annotation at all
        ]
        return joined, annots

    def test_three_denominators(self):
        joined, annots = self._fixture()
        stats = link_quality_stats(joined, annots)
        # linked: m1 m2 m3 m6; multi-target: m1 only (m6 repeats one URL)
        assert stats.multi_target.numerator == 1
        assert stats.multi_target.denominator == 4
        # verdicts: m2 CORRECT + m3 WRONG
        assert stats.wrong_target.numerator == 1
        assert stats.wrong_target.denominator == 2
        # potentially linkable: m1-m4 software, m6 non-software with a link
        assert stats.unlinked.numerator == 1  # m4
        assert stats.unlinked.denominator == 5

    def test_empty_join(self):
        stats = link_quality_stats([], [])
        assert stats.multi_target.rate is None
        assert stats.wrong_target.rate is None
        assert stats.unlinked.rate is None


class TestExtractionStats:
    def test_shares(self):
        annots = [
            _annotated("m1", retrieval_quality="Y", mention_quality="SC"),
            _annotated("m2", retrieval_quality="N", mention_quality="NA"),
            _annotated("m3", retrieval_quality="Y", mention_quality="SP"),
            _annotated(
                "m4",
                annotations=[
                    _ann("m4", "a1"),  # no quality coded
                    _ann("m4", "a2", mention_quality="SC"),
                ],
            ),
        ]
        stats = extraction_and_entity_stats(annots)
        assert stats.incorrect_extraction.numerator == 1
        assert stats.incorrect_extraction.denominator == 4
        assert stats.not_software.numerator == 1
        assert stats.not_software.denominator == 4

    def test_empty(self):
        stats = extraction_and_entity_stats([])
        assert stats.incorrect_extraction.rate is None
        assert stats.not_software.rate is None
