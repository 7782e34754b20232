from __future__ import annotations

import sys

import pytest

from genoptics.cli import load_schema
from genoptics.value import parse_value
from genoptics.schema import parse_type


@pytest.fixture(scope="session")
def shop():
    return load_schema(None)


@pytest.fixture(scope="session")
def bourbon(shop):
    return parse_value(BOURBON, parse_type("Item"), shop)


BOURBON = 'Item "Bourbon" (Cost 100)'
ORDERS_TEXT = (
    f'Orders [Invoice ({BOURBON}) "Earl" 1 0, Invoice ({BOURBON}) "Johnny" 2 2] '
    f'[Invoice ({BOURBON}) "George" 2 (0, 3)]'
)


@pytest.fixture(scope="session")
def orders(shop):
    return parse_value(ORDERS_TEXT, parse_type("Orders"), shop)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
