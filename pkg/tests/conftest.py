import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from comeasuring.scalars import ScalarField


@pytest.fixture
def QQ():
    return ScalarField.from_string("rational")


@pytest.fixture
def Fq():
    return ScalarField.from_string("q")


@pytest.fixture
def q(Fq):
    return Fq.q()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "CRITERIA_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda x: int(x.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
