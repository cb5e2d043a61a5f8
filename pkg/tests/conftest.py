import os
import sys
import time

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from helpers import lottery_desk, ticket_structure  # noqa: E402

SESSION_START = time.perf_counter()


def pytest_collection_modifyitems(items):
    # the whole-suite runtime check must run after everything else
    last = [i for i in items if i.get_closest_marker("run_last")]
    rest = [i for i in items if not i.get_closest_marker("run_last")]
    items[:] = rest + last


def pytest_configure(config):
    config.addinivalue_line("markers", "run_last: run after every other test")


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance.summary_lines():
        terminalreporter.write_line(line)


@pytest.fixture
def tickets():
    return ticket_structure()


@pytest.fixture
def desk():
    return lottery_desk()
