import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qmpc import get_device  # noqa: E402


@pytest.fixture(scope="session")
def toronto():
    return get_device("toronto-27")


@pytest.fixture(scope="session")
def manhattan():
    return get_device("manhattan-65")


@pytest.fixture(scope="session")
def melbourne():
    return get_device("melbourne-15")


_CRITERIA: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA[report.nodeid.split("::")[-1]] = "PASS" if report.outcome == "passed" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA):
        number, _, title = name[len("test_criterion_"):].partition("_")
        terminalreporter.write_line(f"criterion {int(number):2d} {title.replace('_', ' '):<28} {_CRITERIA[name]}")
