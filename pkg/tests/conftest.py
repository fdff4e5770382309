import sys
import warnings

import numpy as np
import pytest

from uwbpowergame.channel import ChannelConfig, db_to_linear
from uwbpowergame.game import GameParams


@pytest.fixture
def table1():
    return GameParams()


@pytest.fixture
def fig2_channel():
    return ChannelConfig(num_users=10, num_paths=200, pdp_ratio=db_to_linear(20.0), seed=0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(autouse=True)
def _quiet_large_k():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message=r"K/N")
        yield


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
