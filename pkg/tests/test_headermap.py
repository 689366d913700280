"""Header-map configuration parsing and column resolution."""

import pytest

from mention_lens.headermap import (
    HeaderMapError,
    load_header_map,
    parse_header_map,
    resolve,
)


class TestParse:
    def test_basic_pairs(self):
        mapping = parse_header_map("csm.software = mentions\nczi-raw.text = snippet\n")
        assert mapping == {"csm.software": "mentions", "czi-raw.text": "snippet"}

    def test_comments_and_blanks_ignored(self):
        text = "# a comment\n\ncsm.doi = DOI\n   # indented comment\n"
        assert parse_header_map(text) == {"csm.doi": "DOI"}

    def test_whitespace_trimmed(self):
        assert parse_header_map("  csm.url =  link_col  \n") == {"csm.url": "link_col"}

    def test_missing_equals_reports_line(self):
        with pytest.raises(HeaderMapError) as excinfo:
            parse_header_map("csm.doi = DOI\nbroken line\n")
        assert "line 2" in str(excinfo.value)

    def test_empty_key_rejected(self):
        with pytest.raises(HeaderMapError):
            parse_header_map(" = value\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(HeaderMapError) as excinfo:
            parse_header_map("csm.doi = a\ncsm.doi = b\n")
        assert "duplicate" in str(excinfo.value)


class TestResolve:
    def test_mapped_column(self):
        mapping = {"csm.software": "mentions"}
        assert resolve(mapping, "csm", "software") == "mentions"

    def test_default_is_field_name(self):
        assert resolve({}, "csm", "software") == "software"

    def test_format_scoping(self):
        mapping = {"csm.software": "mentions"}
        assert resolve(mapping, "czi-raw", "software") == "software"


def test_load_from_file(tmp_path):
    path = tmp_path / "map.txt"
    path.write_text("# remap\ncsm.software = software_list\n", "utf-8")
    assert load_header_map(path) == {"csm.software": "software_list"}
