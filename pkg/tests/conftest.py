import random

import pytest

from npsim.coding import SessionSourceData, units_per_source
from npsim.core import DataUnit, StrategyKind

STRATEGY_CASES = [
    (StrategyKind.NPS1_EXTRA, None),
    (StrategyKind.NPS1_DEDICATED, "n"),
    (StrategyKind.NPS2_ROTATING, None),
]


def random_source_data(strategy, n, width=8, seed=0):
    rng = random.Random(seed)
    per = units_per_source(strategy, n)
    units = {
        (i, d): DataUnit(bytes(rng.randrange(256) for _ in range(width)))
        for i in range(1, n + 1)
        for d in range(1, per + 1)
    }
    return SessionSourceData(n, strategy, units)


@pytest.fixture
def make_data():
    return random_source_data


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
