import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from latticedg import BoxConstraint, TabularObjective  # noqa: E402


def table(values, bounds=None):
    values = np.asarray(values, dtype=float)
    if bounds is None:
        bounds = [values.size - 1]
    return TabularObjective(BoxConstraint(bounds), values)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
