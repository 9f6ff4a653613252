import numpy as np
import pytest

from mclight.medium import ChannelSpec, MediumSpec, constant_schedule, step_schedule

_ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_ACCEPTANCE):
        terminalreporter.write_line(line)


@pytest.fixture
def report():
    """Record one pass/fail line per acceptance criterion for the terminal summary."""

    def _record(number: int, ok: bool, detail: str):
        line = f"ACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} | {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        return ok

    return _record


@pytest.fixture
def resonant_pair():
    """Symmetric forward/backward pair, xi = 100, per-channel v = 0.01."""
    medium = MediumSpec(n_line=100.0, length=40.0)
    channels = [ChannelSpec("l", "forward", 1.0, 1.0), ChannelSpec("n", "backward", 1.0, 1.0)]
    return medium, channels


def travel_then_stop(t_switch=100.0, t_end=5000.0, om_l=1.0, om_n=1.0):
    return step_schedule([0.0, t_switch, t_end], {"l": [om_l, om_l], "n": [0.0, om_n]})


def single_channel(n_line=100.0, length=40.0, om=1.0, t_end=5000.0):
    medium = MediumSpec(n_line=n_line, length=length)
    channels = [ChannelSpec("l", "forward", 1.0, 1.0)]
    return medium, channels, constant_schedule({"l": om}, 0.0, t_end)


def rel_l2(a, b):
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))
