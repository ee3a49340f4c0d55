"""Shared fixtures: a session-wide oracle cache and the acceptance report.

The oracle cache computes brute-force metrics for the standard comparison
grid once per session; acceptance tests record per-criterion outcomes into
a collector that is printed as one line per criterion at the end of the
run, independently of how many tests back each criterion.
"""

from __future__ import annotations

import pytest

from heraldnet.heralding import Metrics, compute_metrics
from heraldnet.schemes import build_scheme

GRID_PARTIES = (2, 3, 4)
GRID_ETAS = (1.0, 0.9, 0.7, 0.5)
GRID_SCHEMES = ("bc", "sc", "sd")

_oracle_cache: dict[tuple[str, int, float], Metrics] = {}

# criterion number -> (title, [(label, passed, detail), ...])
_acceptance: dict[int, tuple[str, list[tuple[str, bool, str]]]] = {}


@pytest.fixture(scope="session")
def oracle():
    """Callable (scheme, n, eta) -> Metrics, cached across the session."""

    def run(scheme: str, n: int, eta: float) -> Metrics:
        key = (scheme, n, eta)
        if key not in _oracle_cache:
            _oracle_cache[key] = compute_metrics(build_scheme(scheme, n, eta))
        return _oracle_cache[key]

    return run


@pytest.fixture(scope="session")
def record_acceptance():
    """Record one sub-check of an acceptance criterion for the summary."""

    def record(criterion: int, title: str, label: str, passed: bool, detail: str = "") -> None:
        entry = _acceptance.setdefault(criterion, (title, []))
        entry[1].append((label, passed, detail))

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for criterion in sorted(_acceptance):
        title, checks = _acceptance[criterion]
        ok = sum(1 for _, passed, _ in checks if passed)
        status = "PASS" if ok == len(checks) else "FAIL"
        line = f"criterion {criterion} [{title}]: {status} ({ok}/{len(checks)} checks)"
        failures = [f"{label}: {detail}" if detail else label
                    for label, passed, detail in checks if not passed]
        if failures:
            shown = "; ".join(failures[:4])
            if len(failures) > 4:
                shown += f"; and {len(failures) - 4} more"
            line += f" -- {shown}"
        tr.write_line(line)
