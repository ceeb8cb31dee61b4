import math

import pytest

from nullity_forge.config import spec_from_dict
from nullity_forge.nk import registry_by_name


@pytest.fixture(scope="session")
def registry():
    return registry_by_name()


@pytest.fixture(scope="session")
def sphere2():
    return spec_from_dict({
        "name": "s2", "dimension": 2,
        "metric": {"0,0": "1", "1,1": "sin(x0)^2"},
        "chart_box": [[0.3, math.pi - 0.3], [0, 1]],
    })


@pytest.fixture(scope="session")
def h3_flat_chart():
    return spec_from_dict({
        "name": "h3", "dimension": 3,
        "metric": {"0,0": "1", "1,1": "exp(2*x0)", "2,2": "exp(2*x0)"},
        "chart_box": [[-0.5, 0.5], [0, 1], [0, 1]],
    })


# acceptance criteria record their outcome here; printed once per session
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
