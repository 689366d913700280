"""Reproducible sampling over mention tables.

Three strategies: simple random, stratified proportionate (largest-remainder
apportionment), and one-mention-per-software. All draws run on a portable
seeded generator, so a (dataset, strategy, seed) triple picks the same rows on
any platform or interpreter. Stratified draws use an independent substream per
stratum, which keeps results stable even if strata were drawn in parallel.
"""

from __future__ import annotations

import enum
from collections import Counter
from typing import Iterable, Optional, Sequence

from pydantic import BaseModel, ConfigDict

from .model import MentionLensError, MentionRecord
from .prng import SplitMix64, sample_positions, stream_seed
from .ingest import normalize_software_key


class SamplingError(MentionLensError):
    pass


class SampleStrategy(str, enum.Enum):
    SIMPLE = "SIMPLE"
    STRATIFIED_PROPORTIONATE = "STRATIFIED_PROPORTIONATE"
    ONE_PER_SOFTWARE = "ONE_PER_SOFTWARE"


class SampleSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    strategy: SampleStrategy
    n: Optional[int] = None
    seed: int = 0
    stratum_key: str = "software_key"
    min_per_stratum: int = 0


class SampleResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    records: tuple[MentionRecord, ...]
    spec: SampleSpec
    population_size: int
    per_stratum_counts: dict[str, int] = {}


def _stratum_of(record: MentionRecord, stratum_key: str) -> str:
    if stratum_key == "software_key":
        return normalize_software_key(record.software_raw).key
    if stratum_key == "source_dataset":
        return record.source_dataset.value
    if stratum_key == "pub_year":
        return "" if record.pub_year is None else str(record.pub_year)
    raise SamplingError(f"unknown stratum key {stratum_key!r}")


def simple_random_sample(
    population: Sequence[MentionRecord], n: int, seed: int
) -> SampleResult:
    """Uniform sample without replacement, in population order."""
    if n < 0:
        raise SamplingError("sample size must be non-negative")
    if n > len(population):
        raise SamplingError(
            f"sample size {n} exceeds population size {len(population)}"
        )
    rng = SplitMix64(stream_seed(seed, "simple"))
    positions = sample_positions(len(population), n, rng)
    records = tuple(population[i] for i in positions)
    return SampleResult(
        records=records,
        spec=SampleSpec(strategy=SampleStrategy.SIMPLE, n=n, seed=seed),
        population_size=len(population),
    )


def allocate_largest_remainder(
    sizes: dict[str, int], n: int, min_per_stratum: int = 0
) -> dict[str, int]:
    """Proportionate integer quotas by the largest-remainder method.

    Computed in exact integer arithmetic: floor(n * size / total) seats first,
    then one extra seat per stratum in order of descending remainder
    (n * size mod total), ties broken by stratum key ascending. Quotas never
    exceed stratum sizes; a minimum per stratum is applied first (capped by
    the stratum size) and the remaining seats are apportioned proportionately.
    """
    total = sum(sizes.values())
    if n > total:
        raise SamplingError(f"sample size {n} exceeds population size {total}")
    if min_per_stratum < 0:
        raise SamplingError("min_per_stratum must be non-negative")

    keys = sorted(sizes)
    floor_min = {k: min(min_per_stratum, sizes[k]) for k in keys}
    reserved = sum(floor_min.values())
    if reserved > n:
        raise SamplingError(
            f"minimum of {min_per_stratum} per stratum needs {reserved} seats "
            f"but only {n} requested"
        )

    remaining = n - reserved
    capacity = {k: sizes[k] - floor_min[k] for k in keys}
    cap_total = sum(capacity.values())
    quotas = dict(floor_min)
    if remaining and cap_total:
        floors = {k: remaining * capacity[k] // cap_total for k in keys}
        remainders = {k: remaining * capacity[k] % cap_total for k in keys}
        floors = {k: min(floors[k], capacity[k]) for k in keys}
        leftover = remaining - sum(floors.values())
        for k in sorted(keys, key=lambda k: (-remainders[k], k)):
            if leftover == 0:
                break
            if floors[k] < capacity[k]:
                floors[k] += 1
                leftover -= 1
        if leftover:
            raise SamplingError("apportionment failed to place all seats")
        for k in keys:
            quotas[k] += floors[k]
    return quotas


def stratified_proportionate_sample(
    population: Sequence[MentionRecord],
    n: int,
    seed: int,
    stratum_key: str = "software_key",
    min_per_stratum: int = 0,
) -> SampleResult:
    """Proportionate stratified sample; output keeps population order.

    Each stratum draws from its own seeded substream derived from (seed,
    stratum key), so the records chosen inside one stratum do not depend on
    any other stratum.
    """
    if n < 0:
        raise SamplingError("sample size must be non-negative")
    members: dict[str, list[int]] = {}
    for pos, record in enumerate(population):
        members.setdefault(_stratum_of(record, stratum_key), []).append(pos)
    sizes = {k: len(v) for k, v in members.items()}
    quotas = allocate_largest_remainder(sizes, n, min_per_stratum)

    chosen: list[int] = []
    for key in sorted(members):
        quota = quotas[key]
        if quota == 0:
            continue
        rng = SplitMix64(stream_seed(seed, f"stratum:{key}"))
        local = sample_positions(len(members[key]), quota, rng)
        chosen.extend(members[key][i] for i in local)
    chosen.sort()
    records = tuple(population[i] for i in chosen)
    spec = SampleSpec(
        strategy=SampleStrategy.STRATIFIED_PROPORTIONATE,
        n=n,
        seed=seed,
        stratum_key=stratum_key,
        min_per_stratum=min_per_stratum,
    )
    return SampleResult(
        records=records,
        spec=spec,
        population_size=len(population),
        per_stratum_counts={k: q for k, q in sorted(quotas.items()) if q},
    )


def one_per_software(
    population: Sequence[MentionRecord], seed: int
) -> SampleResult:
    """One uniformly chosen mention per distinct software key."""
    members: dict[str, list[int]] = {}
    for pos, record in enumerate(population):
        members.setdefault(normalize_software_key(record.software_raw).key, []).append(pos)
    chosen: list[int] = []
    for key in sorted(members):
        rng = SplitMix64(stream_seed(seed, f"one-per-software:{key}"))
        pick = members[key][rng.randbelow(len(members[key]))]
        chosen.append(pick)
    chosen.sort()
    records = tuple(population[i] for i in chosen)
    spec = SampleSpec(strategy=SampleStrategy.ONE_PER_SOFTWARE, n=None, seed=seed)
    return SampleResult(
        records=records,
        spec=spec,
        population_size=len(population),
        per_stratum_counts={k: 1 for k in sorted(members)},
    )


class MentionCountSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_mentions: int
    n_software: int
    max_count: int
    share_single: float
    share_over_10: float
    share_over_50: float
    histogram: dict[int, int]


def mention_count_distribution(
    population: Iterable[MentionRecord],
) -> MentionCountSummary:
    """How skewed the mention counts per software are.

    The histogram maps a mention count to the number of distinct software
    names with exactly that count; shares are fractions of distinct names.
    """
    counts: Counter[str] = Counter(
        normalize_software_key(r.software_raw).key for r in population
    )
    histogram = Counter(counts.values())
    n_software = len(counts)
    if n_software == 0:
        return MentionCountSummary(
            n_mentions=0,
            n_software=0,
            max_count=0,
            share_single=0.0,
            share_over_10=0.0,
            share_over_50=0.0,
            histogram={},
        )
    return MentionCountSummary(
        n_mentions=sum(counts.values()),
        n_software=n_software,
        max_count=max(counts.values()),
        share_single=histogram.get(1, 0) / n_software,
        share_over_10=sum(v for c, v in histogram.items() if c > 10) / n_software,
        share_over_50=sum(v for c, v in histogram.items() if c > 50) / n_software,
        histogram=dict(sorted(histogram.items())),
    )
