import math

import pytest

from sparse_rates import ChannelParams, memoryless_law


@pytest.fixture
def ref_params():
    return ChannelParams.from_snr_db(0.2, 10.0, 0.5)


@pytest.fixture
def ref_law():
    return memoryless_law(0.2)


LN10 = math.log(10.0)


ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def acceptance():
    """Record one summary line per acceptance criterion."""

    def record(number: int, passed: bool, detail: str):
        ACCEPTANCE_LINES[number] = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        print(ACCEPTANCE_LINES[number])
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
