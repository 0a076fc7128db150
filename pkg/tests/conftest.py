from collections import OrderedDict

import numpy as np
import pytest

from fatcost import dataset

_criteria = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, title): acceptance criterion this test checks")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not (rep.when == "setup" and rep.failed):
        return
    cid, title = mark.args
    entry = _criteria.setdefault(cid, {"title": title, "failed": [], "passed": 0})
    if rep.passed:
        entry["passed"] += 1
    else:
        entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid, e in sorted(_criteria.items(), key=lambda kv: [int(p) if p.isdigit() else p for p in kv[0].split(".")]):
        status = "FAIL" if e["failed"] else "PASS"
        line = f"{status}  criterion {cid:<3} {e['title']}"
        if e["failed"]:
            line += f"  [failing: {', '.join(e['failed'])}]"
        tr.write_line(line)


@pytest.fixture(scope="session")
def table():
    return dataset.load_bundled()


@pytest.fixture(scope="session")
def ratios(table):
    return np.asarray(dataset.overrun_ratios(table))
