import pytest
from dtqw_cycle_qnn import utils


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="run long training reproductions")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long training reproduction")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def verbose_output():
    """ Commands run with --quiet must not silence later tests """
    utils.set_verbosity(True)
    yield
    utils.set_verbosity(True)
