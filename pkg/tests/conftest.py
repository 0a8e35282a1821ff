import math

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from peristaltic import FlowParameters

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ANCHOR = FlowParameters(15.0, 0.25, 0.9, 1000.0, 0.0001, 0.1)
FIG3 = FlowParameters(1.0, 0.4, 0.99, 10000.0, 0.00001, 0.1)
FIG4 = FlowParameters(10.0, 0.25, 0.9, 1000.0, 0.00001, 0.1)
FIG9 = FlowParameters(15.0, 0.25, 0.9, 1000.0, 0.0001, 0.1, -2.5)


@st.composite
def flow_params(draw, max_R=30.0):
    """Valid parameter sets over the oracle ranges; k log-uniform."""
    R = draw(st.floats(0.5, max_R))
    alpha = draw(st.floats(0.05, 0.6))
    e = draw(st.floats(0.3, 1.0))
    k = 10 ** draw(st.floats(math.log10(0.05), 4.0))
    s = draw(st.floats(0.0, 0.05))
    dp2 = draw(st.floats(-3.0, 3.0))
    return FlowParameters(R, alpha, e, k, s, 0.1, dp2)


# acceptance lines are collected here and echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_line():
    def record(number: int, title: str, passed: bool, detail: str = ""):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
