import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

ROOT = Path(__file__).resolve().parent.parent
_results: dict[int, dict] = {}


@pytest.fixture
def protocols_dir() -> Path:
    return ROOT / "protocols"


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = report.user_properties and dict(report.user_properties).get("acceptance")
    if not marker:
        return
    number, description = marker
    entry = _results.setdefault(number, {"description": description, "passed": True, "seconds": 0.0})
    entry["passed"] &= report.outcome == "passed"
    entry["seconds"] += report.duration


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_setup(item):
    m = item.get_closest_marker("acceptance")
    if m:
        item.user_properties.append(("acceptance", (m.args[0], m.args[1])))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_results):
        r = _results[number]
        status = "PASS" if r["passed"] else "FAIL"
        tr.write_line(f"criterion {number:2d}: {status}  {r['description']}  ({r['seconds']:.1f} s)")
