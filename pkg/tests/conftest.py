"""Shared fixtures plus the acceptance-criterion summary lines."""

import re

import pytest

from mmfuse.seeding import make_rng

_CRITERION = re.compile(r"test_criterion_(\d+)_(\w+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    rows = {}
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            match = _CRITERION.search(getattr(report, "nodeid", ""))
            if not match:
                continue
            if getattr(report, "when", "call") != "call" and outcome != "error":
                continue
            number = int(match.group(1))
            label = match.group(2).replace("_", " ")
            rows[number] = (label, "PASS" if outcome == "passed" else "FAIL")
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(rows):
        label, verdict = rows[number]
        terminalreporter.write_line(f"criterion {number} {verdict}: {label}")


@pytest.fixture
def rng():
    """Fresh deterministic generator per test."""
    return make_rng(12345)


@pytest.fixture
def rng_factory():
    """Callable producing independent generators from explicit seeds."""
    return make_rng
