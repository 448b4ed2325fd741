import os
import sys
from collections import OrderedDict

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if os.path.join(ROOT, "src") not in sys.path:
    sys.path.insert(0, os.path.join(ROOT, "src"))

_criteria: "OrderedDict[int, list]" = OrderedDict()

CRITERIA = {
    1: "Dirichlet kernel: cosine sum = sine ratio, exactly 1 at integers",
    2: "Exact hat-switch and adjoint pairing on Z^2 and F2",
    3: "Formal inverse of 2e-g on Z at R=40 by all three solvers",
    4: "Harmonic model on F2: solver agreement and residual refinement",
    5: "Negative control e-g on Z fails explicitly",
    6: "Finite-model brute force equals the product formula",
    7: "Monte Carlo pushforward consistent with the exact value",
    8: "Two-case limit for 2e-g on Z",
    9: "Homoclinic pairings vanish and profiles decay beyond radius 2",
    10: "Same seed gives byte-identical output files",
}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_collection_modifyitems(config, items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            _criteria.setdefault(mark.args[0], [])


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if call.when == "call" or (call.when == "setup" and call.excinfo is not None):
        ok = call.excinfo is None
        _criteria.setdefault(mark.args[0], []).append((item.name, ok))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_criteria):
        results = _criteria[n]
        if not results:
            status = "NOT RUN"
        else:
            status = "PASS" if all(ok for _, ok in results) else "FAIL"
        failed = [name for name, ok in results if not ok]
        extra = f"  (failing: {', '.join(failed)})" if failed else ""
        tr.write_line(f"criterion {n:2d}: {status:7s} {CRITERIA.get(n, '')}{extra}")
