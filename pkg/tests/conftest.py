import re

import numpy as np
import pytest

_AC_RE = re.compile(r"test_ac(\d+)_")


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def pytest_terminal_summary(terminalreporter):
    """One pass/fail line per acceptance criterion, with the recorded details."""
    rows = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py" not in nodeid or getattr(rep, "when", "call") != "call":
                continue
            m = _AC_RE.search(nodeid)
            if not m:
                continue
            props = dict(getattr(rep, "user_properties", []))
            rows.append((int(m.group(1)), outcome, props.get("title", nodeid), props.get("detail", "")))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for n, outcome, title, detail in sorted(rows):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"AC{n:<3}{status}  {title}  [{detail}]")
