import numpy as np
import pytest
from hypothesis import settings

from fracrearr import assemble, build_grid

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


@pytest.fixture
def unit_op():
    """D = (0, 1), 14 cells, s = 1/2."""
    return assemble(build_grid([(0, 1)], 1 / 14), 0.5)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS):
            terminalreporter.write_line(line)
