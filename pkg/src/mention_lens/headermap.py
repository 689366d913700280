"""Header-map configuration: adapts dataset-release column names to canon.

Dataset dumps rename columns between releases, so the mapping is configuration
rather than code. The file format is plain key-value text::

    # comment
    csm.software = software_terms
    czi-raw.mention_id = ID

Keys are ``<format>.<canonical-field>``; values are the column names actually
present in the input. Unmapped fields fall back to the canonical name itself.
"""

from __future__ import annotations

from pathlib import Path


class HeaderMapError(ValueError):
    pass


def parse_header_map(text: str) -> dict[str, str]:
    mapping: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise HeaderMapError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise HeaderMapError(f"line {lineno}: empty key or value in {raw!r}")
        if key in mapping:
            raise HeaderMapError(f"line {lineno}: duplicate key {key!r}")
        mapping[key] = value
    return mapping


def load_header_map(path: str | Path) -> dict[str, str]:
    return parse_header_map(Path(path).read_text(encoding="utf-8"))


def resolve(mapping: dict[str, str], fmt: str, field: str) -> str:
    """Column name to use for ``field`` of ``fmt`` (canonical name if unmapped)."""
    return mapping.get(f"{fmt}.{field}", field)
