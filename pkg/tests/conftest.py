from collections import defaultdict

import numpy as np
import pytest

from regdyn.spectral import make_spectrum

_CRITERIA = defaultdict(lambda: [0, 0])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def spec4():
    return make_spectrum("shifted_integer", (1.0,), 4)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    _CRITERIA[crit][0] += 1
    if not report.passed:
        _CRITERIA[crit][1] += 1


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_setup(item):
    m = item.get_closest_marker("criterion")
    if m is not None:
        item.user_properties.append(("criterion", m.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_CRITERIA):
        total, failed = _CRITERIA[crit]
        status = "PASS" if failed == 0 else "FAIL"
        terminalreporter.write_line(
            f"criterion {crit:2d}: {status} ({total - failed}/{total} checks passed)")
