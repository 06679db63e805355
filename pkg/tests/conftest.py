import numpy as np
import pytest

from sincftn import SequenceSpec, make_mux

_criteria: dict[str, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported in the summary")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    label = getattr(report, "criterion", None)
    if label is None:
        return
    notes = [v for k, v in report.user_properties if k == "criterion_note"]
    _criteria.setdefault(label, []).append((report.outcome, report.test_name, notes))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        report.criterion = marker.args[0]
        report.test_name = item.name


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_criteria):
        runs = _criteria[label]
        failed = [name for o, name, _ in runs if o != "passed"]
        line = f"{'FAIL' if failed else 'PASS'}  {label}  [{len(runs) - len(failed)}/{len(runs)} tests]"
        notes = "; ".join(n for _, _, ns in runs for n in ns)
        if notes:
            line += f"  {notes}"
        if failed:
            line += "  failing: " + ", ".join(failed)
        terminalreporter.write_line(line)


@pytest.fixture
def note(record_property):
    """Attach a measured value to the acceptance summary line."""

    def _note(text):
        record_property("criterion_note", text)
        print(text)

    return _note


@pytest.fixture
def spec4():
    return SequenceSpec(4, 10e9)


@pytest.fixture
def spec5():
    return SequenceSpec(5, 10e9)


@pytest.fixture
def otdm4(spec4):
    return make_mux(spec4, 1.0, 4)


@pytest.fixture
def notdm4(spec4):
    return make_mux(spec4, 0.8, 5)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
