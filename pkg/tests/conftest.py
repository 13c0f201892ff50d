import numpy as np
import pytest

from srs_ranging.nr_config import CarrierConfig, SrsConfig, centered_comb_offset, slot_timing
from srs_ranging.ofdm_modem import modulate
from srs_ranging.srs_sequence import generate_srs_grid


@pytest.fixture
def carrier():
    return CarrierConfig()


@pytest.fixture
def timing():
    return slot_timing(3)


@pytest.fixture
def srs():
    return SrsConfig(k_tc=2, comb_offset=centered_comb_offset(2, 833, 3276), m_sc=833,
                     n_symb_srs=1, start_symbol=8)


@pytest.fixture
def grid(srs, carrier):
    return generate_srs_grid(srs, carrier)


@pytest.fixture
def tx(grid, timing, carrier):
    return modulate(grid, timing, carrier)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_ACCEPTANCE = []


@pytest.fixture
def report():
    """Record one acceptance line; printed together at the end of the run."""
    def _report(number, title, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title} ({detail})"
        _ACCEPTANCE.append((number, line))
        print(line)
        return passed
    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
