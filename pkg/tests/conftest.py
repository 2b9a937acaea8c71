from pathlib import Path

import pytest
from hypothesis import strategies as st

from sftkit.groups import get_model

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"

SHIPPED = ["z", "z2", "z3", "z4", "free1", "free2", "free3", "heisenberg", "product:z:free2", "product:heisenberg:z"]


@pytest.fixture
def data_dir() -> Path:
    return DATA


def words(model_name: str, max_size: int = 8):
    letters = get_model(model_name).letters()
    return st.lists(st.sampled_from(letters), max_size=max_size)


def elements(model_name: str, max_size: int = 8):
    model = get_model(model_name)
    return words(model_name, max_size).map(model.evaluate_word)


# -- acceptance summary ------------------------------------------------------------

_ACCEPTANCE: list = []


def pytest_runtest_logreport(report):
    if report.when == "call" and report.nodeid.startswith("tests/test_acceptance.py::"):
        _ACCEPTANCE.append((report.nodeid.split("::")[-1], report.passed, report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, passed, duration in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  ({duration:.2f}s)")
