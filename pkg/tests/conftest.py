import sys
from pathlib import Path

import pytest

FIXTURES = Path(__file__).resolve().parent / "fixtures"

sys.path.insert(0, str(FIXTURES))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance suite's one-line-per-criterion results."""
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "ACCEPTANCE_LINES", None) if module else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def csm_sheet_path() -> Path:
    return FIXTURES / "csm_sample_annotated.csv"


@pytest.fixture(scope="session")
def czi_sheet_path() -> Path:
    return FIXTURES / "czi_sample_annotated.csv"


@pytest.fixture(scope="session")
def czi_links_path() -> Path:
    return FIXTURES / "czi_links.csv"


@pytest.fixture(scope="session")
def license_sheet_path() -> Path:
    return FIXTURES / "license_sample_annotated.csv"


@pytest.fixture(scope="session")
def csm_pubs_path() -> Path:
    return FIXTURES / "csm_pubs_50.csv"
