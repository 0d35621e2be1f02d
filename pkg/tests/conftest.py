import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from primeomega.weights import build_pair  # noqa: E402


@pytest.fixture(scope="session")
def tables():
    """(little_omega, big_omega) up to 2**20, enough for every sweep in the suite."""
    return build_pair(2**20)


@pytest.fixture(scope="session")
def little(tables):
    return tables[0]


@pytest.fixture(scope="session")
def big(tables):
    return tables[1]


@pytest.fixture(scope="session")
def oracle_1e5():
    from oracles import omega_pair

    return omega_pair(10**5)


def _criterion_key(line):
    label = line.split("criterion ")[1].split(":")[0]
    digits = label.rstrip("abcdefghijklmnopqrstuvwxyz")
    return int(digits), label[len(digits):]


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(LINES, key=_criterion_key):
            terminalreporter.write_line(line)
