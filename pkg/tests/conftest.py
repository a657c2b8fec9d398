import math

import pytest

from kerrline.circuit import CircuitSpec, JunctionSpec, LineSegmentSpec, PortSpec

VELOCITY = 119987783.31377363
HALF = 6e-3
LINE = LineSegmentSpec.from_impedance_velocity(50.0, VELOCITY)
TWO_PI = 2 * math.pi

_ACCEPTANCE = []


def make_spec(junction, position=0.0, c_ports=10e-15, half=HALF, left=LINE, right=LINE):
    return CircuitSpec(half, position, left, right, PortSpec(c_ports, c_ports), junction)


@pytest.fixture
def centered_spec():
    return make_spec(JunctionSpec.single(636e9), 0.0)


@pytest.fixture
def bare_spec():
    return make_spec(JunctionSpec.short(), 0.0)


@pytest.fixture
def cat_spec():
    return make_spec(JunctionSpec.squid(622e9, 0.05), 0.75 * HALF, c_ports=2.5e-15)


@pytest.fixture
def jpc_spec():
    return make_spec(JunctionSpec.squid(636e9, 0.0), 0.5 * HALF)


@pytest.fixture
def ultrastrong_spec():
    return make_spec(JunctionSpec.squid(19e9, 0.05, cj=5e-15), HALF - 260e-6)


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""

    def record(number, passed, detail):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        print(line)
        _ACCEPTANCE.append((number, line))
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_ACCEPTANCE):
        terminalreporter.write_line(line)
