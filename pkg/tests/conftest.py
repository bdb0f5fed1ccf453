import pytest

from shorlab.ecgroup import default_encoding
from shorlab.simulator import calibrate_conventions


@pytest.fixture(scope="session")
def enc32():
    return default_encoding(5)


@pytest.fixture(scope="session")
def calibrated():
    return calibrate_conventions(3)


@pytest.fixture(scope="session")
def compat(calibrated):
    return calibrated.with_main_script_halves()


_CRITERIA: dict[str, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion this test gates")


def pytest_runtest_logreport(report):
    label = getattr(report, "criterion_label", None)
    if label is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        prev = _CRITERIA.get(label, "PASS")
        _CRITERIA[label] = "PASS" if prev == "PASS" and report.outcome == "passed" else "FAIL"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion_label = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_CRITERIA, key=lambda s: int(s.split(".")[0])):
        terminalreporter.write_line(f"[{_CRITERIA[label]}] {label}")
