import sys

import numpy as np
import pytest

from monodromy.families import sparse_family
from monodromy.polysys import ParametricSystem, Term


def univariate(degree: int) -> ParametricSystem:
    """Generic degree-``degree`` polynomial with one parameter per coefficient."""
    return sparse_family([[(k,) for k in range(degree + 1)]])


def square_root_family() -> ParametricSystem:
    """x**2 - p."""
    return ParametricSystem.from_equations([[Term((2,), 1.0), Term((0,), 0j, {0: -1.0})]], 1, 1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance.summary_lines():
        terminalreporter.write_line(line)
