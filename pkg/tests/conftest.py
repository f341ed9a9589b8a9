## conftest.py
# test configuration.  This is run before running any of the test files

import pytest

# read in the .env file at the root of the project for all tests
from dotenv import load_dotenv
load_dotenv()

from src.mengerknot import energies

# allow command line options
#   pytest --runslow          include the long relaxation runs
#   pytest --workers 1,2,4    worker counts for the determinism tests


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help='run tests marked slow')
    parser.addoption("--workers", action="store", default=None,
                     help='comma separated worker counts for determinism tests.  Default = 1,4,8')


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long relaxation runs, enabled with --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def pytest_generate_tests(metafunc):
    """parameterize command line options to inject into every test, specifically the worker count.
    If worker counts are passed on the command line use those, else 1, 4 and 8 (clamped to the
    numba thread pool, duplicates dropped)."""
    if "workers" in metafunc.fixturenames:
        option = metafunc.config.getoption("workers")
        requested = [int(w) for w in option.split(',')] if option else [1, 4, 8]
        counts = []
        for w in requested:
            clamped = energies.set_workers(w)
            if clamped not in counts:
                counts.append(clamped)
        metafunc.parametrize('workers', counts)


@pytest.fixture(autouse=True)
def restore_workers():
    """every test starts and ends with the full thread pool"""
    energies.set_workers()
    yield
    energies.set_workers()
