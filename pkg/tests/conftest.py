from pathlib import Path

import pytest

from slrhammer.parser import parse_problem

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"

RUNNING_CLAUSES = """\
clause 0 <= x, x <= 2 || !P(x), Q(x).
clause x <= 1 || P(x).
clause x > 1 || !P(x).
"""

IGNITION = """\
clause x1 <= x2, z2 >= z1 || !IgnTable(x1, x2, y1, y2, z1), R(z2).
fact IgnTable(0, 13, 880, 1100, 2200).
"""


def running(conjecture: str = "", allow_negative: bool = False):
    return parse_problem(RUNNING_CLAUSES + conjecture, allow_negative=allow_negative)


@pytest.fixture
def running_clauses():
    return running().clauses


@pytest.fixture
def phi3():
    return running("conjecture forall x. (0 <= x, x <= 1 || Q(x)).\n")


@pytest.fixture
def phi4():
    return running("conjecture forall x. (0 <= x, x <= 2 || Q(x)).\n")


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
