import numpy as np
import pytest

from risdepth.channel import AntennaPattern, ElementPattern, feed_channel
from risdepth.geometry import RisGeometry
from risdepth.waveform import RadarConfig


def dft_oracle(x):
    """Direct O(n^2) unitary DFT of one column."""
    n = len(x)
    k = np.arange(n)
    kernel = np.exp(-2j * np.pi * np.outer(k, k) / n)
    return kernel @ x / np.sqrt(n)


@pytest.fixture
def table_cfg():
    return RadarConfig(f0=60e9, slope=300e12, t_active=13.47e-6, t_pri=13.47e-6,
                       fs=38e6, m_sample=512, tx_power_dbm=20, noise_figure_db=10)


@pytest.fixture
def noiseless_cfg(table_cfg):
    from dataclasses import replace
    return replace(table_cfg, thermal_noise=False)


@pytest.fixture
def small_geom():
    return RisGeometry.half_wavelength(8, 8, 60e9, feed_position=(0.01, -0.3, 0.02))


@pytest.fixture
def patterns():
    return AntennaPattern.from_dbi(25), ElementPattern()


@pytest.fixture
def small_fc(small_geom, patterns):
    return feed_channel(small_geom, *patterns)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n): acceptance criterion number n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    n = marker.args[0]
    if report.failed:
        _ACCEPTANCE[n] = "FAIL"
    elif report.when == "call" and report.passed:
        _ACCEPTANCE.setdefault(n, "PASS")
    elif report.skipped:
        _ACCEPTANCE.setdefault(n, "SKIP")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"criterion {n:2d}: {_ACCEPTANCE[n]}")
