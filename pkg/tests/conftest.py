from __future__ import annotations

import pytest

from hotpie import load_default_catalog, load_default_profiles, load_example_project


@pytest.fixture(scope="session")
def catalog():
    return load_default_catalog()


@pytest.fixture(scope="session")
def modaf():
    return load_default_profiles()


@pytest.fixture()
def arp():
    """Fresh copy of the bundled aircraft example for each test."""
    return load_example_project()


# One visible pass/fail line per acceptance criterion at the end of the run.

def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" in nodeid and getattr(report, "when", "call") == "call":
                status = "PASS" if outcome == "passed" else "FAIL"
                name = nodeid.split("::")[-1]
                lines.append(f"{status}  {name}")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: s.split()[-1]):
            terminalreporter.write_line(line)
