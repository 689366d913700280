"""Deterministically regenerate the committed reference fixtures.

Run from anywhere:  python3 tests/fixtures/make_reference_samples.py

The annotated-sample fixtures are synthetic: rows are constructed so that
every aggregate the test suite asserts on (type counts by year, extraction
and not-software shares, link verdict tallies, license-by-type cells) is
carried exactly, while the row-level content (names, ids, years) is invented.
No randomness is involved; re-running the script reproduces the files byte
for byte, and a test asserts that property against the committed copies.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

FIXTURE_DIR = Path(__file__).resolve().parent

SHEET_COLUMNS = [
    "mention_id",
    "software_raw",
    "context",
    "pub_id",
    "pub_year",
    "pub_urls",
    "retrieval_quality",
    "mention_type",
    "mention_quality",
    "found_url",
    "link_quality",
    "license_spdx_or_name",
    "license_category",
    "is_preprint",
    "is_software_paper",
    "confidence",
    "notes",
    "annotator_id",
]

SOFTWARE_NAMES = [
    "SPSS", "ImageJ", "BLAST", "Bowtie2", "MATLAB", "GraphPad Prism", "R",
    "Python", "Excel", "Stata", "SAS", "Cytoscape", "FastQC", "samtools",
    "BWA", "GATK", "Trimmomatic", "Seurat", "limma", "DESeq2", "edgeR",
    "scikit-learn", "TensorFlow", "STAR", "HISAT2", "Salmon", "QIIME 2",
    "MEGA", "PyMOL", "Gromacs",
]

NOT_SOFTWARE_STRINGS = [
    "the software", "analysis", "2.0", "Figure 3", "custom scripts",
    "in-house pipeline", "Supplementary Table", "version 1.2", "data",
    "the authors", "methods", "software availability",
]


def _name(i: int) -> str:
    return SOFTWARE_NAMES[i % len(SOFTWARE_NAMES)]


def _junk(i: int) -> str:
    return NOT_SOFTWARE_STRINGS[i % len(NOT_SOFTWARE_STRINGS)]


def _confidence(i: int) -> str:
    return str((4, 5, 3, 5, 4)[i % 5])


def _write_sheet(path: Path, rows: list[dict]) -> None:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SHEET_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    path.write_text(buf.getvalue(), encoding="utf-8", newline="")


def _sheet_row(**kwargs) -> dict:
    row = {column: "" for column in SHEET_COLUMNS}
    row.update(kwargs)
    return row


# ---------------------------------------------------------------------------
# CSM annotated sample: 150 rows, one annotator
#   - mention types at year >= 2016: PUB 20, PRO 4, URL 11, INS 11, NAM 20 (66)
#   - 10 typed rows before 2016, 5 unclear (UN), 69 not-software (NA)
#   - retrieval quality N on 29 rows total
# ---------------------------------------------------------------------------

CSM_TYPED_RECENT = [("PUB", 20), ("PRO", 4), ("URL", 11), ("INS", 11), ("NAM", 20)]
CSM_TYPED_OLD = [("PUB", 4), ("NAM", 2), ("INS", 2), ("URL", 1), ("PRO", 1)]


def make_csm_sheet() -> list[dict]:
    rows = []
    serial = 0

    def add(**kwargs):
        nonlocal serial
        base = _sheet_row(
            mention_id=f"csm-{serial}-0",
            pub_id=f"10.1000/csm.{serial:04d}",
            annotator_id="a1",
            confidence=_confidence(serial),
        )
        base.update(kwargs)
        rows.append(base)
        serial += 1

    recent_year = 0
    typed_index = 0
    for mention_type, count in CSM_TYPED_RECENT:
        for _ in range(count):
            year = 2016 + recent_year % 6
            recent_year += 1
            quality = "SN"
            found_url = ""
            if mention_type == "URL" or typed_index % 11 == 3:
                quality = "SC" if typed_index % 2 else "SP"
                found_url = f"https://github.com/example/{_name(typed_index).lower().replace(' ', '-')}"
            add(
                software_raw=_name(typed_index),
                pub_year=str(year),
                retrieval_quality="Y",
                mention_type=mention_type,
                mention_quality=quality,
                found_url=found_url,
                is_preprint="Y" if typed_index % 7 == 0 else "N",
                is_software_paper="Y" if mention_type == "PUB" and typed_index % 3 == 0 else "N",
            )
            typed_index += 1

    old_index = 0
    for mention_type, count in CSM_TYPED_OLD:
        for _ in range(count):
            add(
                software_raw=_name(typed_index + old_index),
                pub_year=str(2012 + old_index % 4),
                retrieval_quality="N" if old_index < 2 else "Y",
                mention_type=mention_type,
                mention_quality="SN",
                is_preprint="N",
                is_software_paper="N",
            )
            old_index += 1

    for i in range(5):
        add(
            software_raw=f"{_name(i)} suite",
            pub_year=str(2016 + i % 3),
            retrieval_quality="N" if i < 2 else "Y",
            mention_quality="UN",
            notes="unclear whether this is software",
        )

    for i in range(69):
        add(
            software_raw=_junk(i),
            pub_year=str(2014 + i % 8),
            retrieval_quality="N" if i < 25 else "Y",
            mention_quality="NA",
        )
    assert len(rows) == 150
    return rows


# ---------------------------------------------------------------------------
# CZI annotated sample: 100 rows, plus the linked-repository table
#   - 77 software rows, all typed; at year >= 2016: PUB 19, MAN 1, PRO 3,
#     INS 4, URL 4, NAM 32 (63); 14 typed rows before 2016
#   - 23 not-software rows (one of which still has links in the link table)
#   - link verdicts over the 77: 6 multi-target, 36 wrong, 19 correct, 16 none
#   - retrieval quality N on 7 rows total
# ---------------------------------------------------------------------------

CZI_TYPED_RECENT = [
    ("PUB", 19), ("MAN", 1), ("PRO", 3), ("INS", 4), ("URL", 4), ("NAM", 32),
]
CZI_TYPED_OLD = [("PUB", 4), ("NAM", 6), ("INS", 2), ("URL", 1), ("PRO", 1)]


def make_czi_sheet_and_links() -> tuple[list[dict], list[dict]]:
    typed: list[tuple[str, int]] = []
    year_cycle = 0
    for mention_type, count in CZI_TYPED_RECENT:
        for _ in range(count):
            typed.append((mention_type, 2016 + year_cycle % 7))
            year_cycle += 1
    for mention_type, count in CZI_TYPED_OLD:
        for _ in range(count):
            typed.append((mention_type, 2012 + year_cycle % 4))
            year_cycle += 1
    assert len(typed) == 77

    link_plan = (
        ["MULTIPLE_CONFLICT"] * 6 + ["WRONG"] * 36 + ["CORRECT"] * 19 + ["NONE"] * 16
    )
    assert len(link_plan) == 77

    rows = []
    links = []
    for i, ((mention_type, year), verdict) in enumerate(zip(typed, link_plan)):
        mention_id = f"czi-{i:04d}"
        name = _name(i)
        slug = name.lower().replace(" ", "-")
        retrieval = "N" if i in (40, 41) else "Y"
        rows.append(
            _sheet_row(
                mention_id=mention_id,
                software_raw=name,
                context=f"... data were processed with {name} (v{1 + i % 9}.{i % 10}) ...",
                pub_id=f"PMC{700000 + i}",
                pub_year=str(year),
                retrieval_quality=retrieval,
                mention_type=mention_type,
                mention_quality="SN" if verdict == "NONE" else "SP",
                link_quality=verdict,
                confidence=_confidence(i),
                annotator_id="a1",
            )
        )
        if verdict == "MULTIPLE_CONFLICT":
            links.append(
                {"mention_id": mention_id, "source": "GITHUB",
                 "url": f"https://github.com/example/{slug}", "match_basis": ""}
            )
            links.append(
                {"mention_id": mention_id, "source": "PYPI",
                 "url": f"https://pypi.org/project/{slug}-toolkit/", "match_basis": ""}
            )
        elif verdict == "WRONG":
            links.append(
                {"mention_id": mention_id, "source": "GITHUB",
                 "url": f"https://github.com/unrelated/project-{i:03d}",
                 "match_basis": "EXACT_STRING" if i % 4 == 0 else ""}
            )
        elif verdict == "CORRECT":
            links.append(
                {"mention_id": mention_id, "source": "CRAN" if i % 2 else "GITHUB",
                 "url": f"https://github.com/example/{slug}", "match_basis": "EXACT_STRING"}
            )

    for i in range(23):
        mention_id = f"czi-na-{i:02d}"
        rows.append(
            _sheet_row(
                mention_id=mention_id,
                software_raw=_junk(i),
                context=f"... {_junk(i)} was applied as described ...",
                pub_id=f"PMC{800000 + i}",
                pub_year=str(2014 + i % 2),
                retrieval_quality="N" if i < 5 else "Y",
                mention_quality="NA",
                confidence=_confidence(i),
                annotator_id="a1",
            )
        )
    # one not-software mention still has (conflicting) entries in the link table
    links.append(
        {"mention_id": "czi-na-00", "source": "GITHUB",
         "url": "https://github.com/unrelated/alpha", "match_basis": ""}
    )
    links.append(
        {"mention_id": "czi-na-00", "source": "SCICRUNCH",
         "url": "https://scicrunch.org/resolver/SCR_000001", "match_basis": ""}
    )
    # stray link rows whose mention ids are outside the sample
    links.append(
        {"mention_id": "czi-9998", "source": "GITHUB",
         "url": "https://github.com/example/orphan", "match_basis": ""}
    )
    links.append(
        {"mention_id": "czi-9999", "source": "BIOCONDUCTOR",
         "url": "https://bioconductor.org/packages/orphan", "match_basis": ""}
    )
    assert len(rows) == 100
    return rows, links


# ---------------------------------------------------------------------------
# License-by-type annotated sample: 163 counted records + 6 excluded ones
#   cells (license x type) as in the reference table; two of the
#   Unknown x NAM records use the SaaS code, which reports fold into Unknown
# ---------------------------------------------------------------------------

LICENSE_CELLS = {
    "CLOSED": [("PUB", 3), ("PRO", 1), ("INS", 23), ("URL", 6), ("NAM", 24)],
    "ACADEMIC": [("PUB", 4), ("INS", 1), ("URL", 2), ("NAM", 4)],
    "PERMISSIVE": [("PUB", 16), ("PRO", 2), ("URL", 4), ("NAM", 12)],
    "COPYLEFT": [("PUB", 17), ("PRO", 3), ("INS", 1), ("URL", 2), ("NAM", 9)],
    "UNKNOWN": [("PUB", 10), ("PRO", 4), ("URL", 5), ("NAM", 10)],
}

LICENSE_NAMES = {
    "CLOSED": "Proprietary",
    "ACADEMIC": "Academic use only",
    "PERMISSIVE": "MIT",
    "COPYLEFT": "GPL-3.0",
    "UNKNOWN": "",
}


def make_license_sheet() -> list[dict]:
    rows = []
    serial = 0

    def add(**kwargs):
        nonlocal serial
        base = _sheet_row(
            mention_id=f"lic-{serial:04d}",
            software_raw=_name(serial),
            pub_id=f"10.2000/lic.{serial:04d}",
            pub_year=str(2016 + serial % 6),
            retrieval_quality="Y",
            annotator_id="a2",
            confidence=_confidence(serial),
        )
        base.update(kwargs)
        rows.append(base)
        serial += 1

    for license_category, cells in LICENSE_CELLS.items():
        emitted_nam = 0
        for mention_type, count in cells:
            for _ in range(count):
                category = license_category
                if license_category == "UNKNOWN" and mention_type == "NAM":
                    # two of these ten are services with no license at all
                    if emitted_nam in (0, 1):
                        category = "UNKNOWN_SAAS"
                    emitted_nam += 1
                add(
                    mention_type=mention_type,
                    mention_quality="SN",
                    license_spdx_or_name=LICENSE_NAMES[license_category],
                    license_category=category,
                )

    for i in range(4):
        add(software_raw=_junk(i), mention_quality="NA")
    for _ in range(2):
        add(
            mention_type="PUB",
            mention_quality="UN",
            license_spdx_or_name="Proprietary",
            license_category="CLOSED",
            notes="couldn't determine whether software",
        )
    assert len(rows) == 169
    return rows


# ---------------------------------------------------------------------------
# CSM publication-row ingest fixture: 50 rows, 3 of them malformed
# ---------------------------------------------------------------------------


def make_csm_pubs() -> str:
    header = "doi,title,source,license,publish_time,journal,url,software\n"
    out = [header]
    valid_lists = []
    for i in range(50):
        doi = f"10.3000/pub.{i:03d}"
        title = f"Study {i} of computational methods"
        year = 2015 + i % 8
        urls = f"https://doi.org/{doi}"
        if i == 10:
            software = "['SPSS', 'ImageJ'"  # unclosed bracket
        elif i == 25:
            software = "['Bowtie2, 'BLAST']"  # unterminated quote pairing
        elif i == 40:
            software = "['R'] trailing"  # junk after the list
        else:
            k = i % 5  # 0..4 mentions per publication
            names = [SOFTWARE_NAMES[(i + j) % len(SOFTWARE_NAMES)] for j in range(k)]
            if i % 7 == 3 and names:
                names[0] = "O''Brien toolkit"  # doubled-quote escape
            quoted = ", ".join("'" + n + "'" for n in names)
            software = f"[{quoted}]"
            valid_lists.append(k)
        row = [doi, title, "PMC", "cc-by", f"{year}-03-0{1 + i % 9}", "J Comp Bio", urls, software]
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerow(row)
        out.append(buf.getvalue())
    return "".join(out)


def main() -> None:
    _write_sheet(FIXTURE_DIR / "csm_sample_annotated.csv", make_csm_sheet())
    czi_rows, czi_links = make_czi_sheet_and_links()
    _write_sheet(FIXTURE_DIR / "czi_sample_annotated.csv", czi_rows)
    buf = io.StringIO()
    writer = csv.DictWriter(
        buf, fieldnames=["mention_id", "source", "url", "match_basis"],
        lineterminator="\n",
    )
    writer.writeheader()
    for link in czi_links:
        writer.writerow(link)
    (FIXTURE_DIR / "czi_links.csv").write_text(buf.getvalue(), "utf-8")
    _write_sheet(FIXTURE_DIR / "license_sample_annotated.csv", make_license_sheet())
    (FIXTURE_DIR / "csm_pubs_50.csv").write_text(make_csm_pubs(), "utf-8")
    print(f"fixtures written to {FIXTURE_DIR}")


if __name__ == "__main__":
    main()
