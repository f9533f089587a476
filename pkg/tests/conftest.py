import os

import pytest

DATA = os.path.join(os.path.dirname(__file__), "data")

ACCEPTANCE_LINES = []


def data(name):
    return os.path.join(DATA, name)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def gamma_sig():
    from artifact.syntax import Signature
    return Signature.make(actions=["a", "b", "c"], gamma=[("a", "b", "c")])
