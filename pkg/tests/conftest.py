import os
import sys

import pytest

PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if PROJECT_ROOT not in sys.path:
    sys.path.insert(0, PROJECT_ROOT)

from project.src import catalog  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-size reproductions (deselect with -m 'not slow')")


@pytest.fixture
def xy():
    return catalog.make_xy()


@pytest.fixture
def f1():
    return catalog.make_f1()


@pytest.fixture
def f2():
    return catalog.make_f2()


@pytest.fixture
def w():
    return catalog.make_w()


@pytest.fixture(scope="session")
def composite():
    return catalog.make_composite2d()
