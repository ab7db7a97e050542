import pytest
from hypothesis import settings

# Exact factorisation of large radicands can exceed Hypothesis' default 200 ms wall-clock deadline on a cold call.
settings.register_profile('fockop', deadline=None)
settings.load_profile('fockop')


def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False, help='run the full-size verification grids')


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: full-size verification grid, needs --runslow')


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip = pytest.mark.skip(reason='needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip)
