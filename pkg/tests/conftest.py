import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from johnspace import build_grid_space
from johnspace import fixtures as fx


@pytest.fixture(scope="session")
def disk():
    return fx.unit_disk()


@pytest.fixture(scope="session")
def square():
    return fx.unit_square()


@pytest.fixture(scope="session")
def disk_space_005(disk):
    return build_grid_space(disk, 0.05)


@pytest.fixture(scope="session")
def disk_space_002(disk):
    return build_grid_space(disk, 0.02)


@pytest.fixture(scope="session")
def square_space_005(square):
    return build_grid_space(square, 0.05)


@pytest.fixture(scope="session")
def lshape_space(tmp_path_factory):
    return build_grid_space(fx.l_shape(), 0.05)


@pytest.fixture(scope="session")
def slit_space():
    return build_grid_space(fx.slit_rectangle(), 0.02)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
