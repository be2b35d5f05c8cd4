from pathlib import Path

import pytest

from idxdict.dictionary import Dictionary

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def poem() -> bytes:
    return (FIXTURES / "poem.txt").read_bytes()


@pytest.fixture
def figures_dict() -> Dictionary:
    """Main bucket (1,3) pre-filled with 51 words, b/4 ending in 'beam', and Figure-3's special words."""
    return Dictionary.load(FIXTURES / "figures.dict")


def pytest_terminal_summary(terminalreporter):
    from tests import _acceptance_log

    if _acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_log.LINES:
            terminalreporter.write_line(line)
