import sys
import numpy as np
import pytest

from qwalk import new_localized, spin_vector

INITIAL_NAMES = ("zero", "one", "symmetric", "antisymmetric")


@pytest.fixture
def symmetric_origin():
    return new_localized(0, spin_vector("symmetric"))


@pytest.fixture
def rng():
    return np.random.default_rng(20091014)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
