from __future__ import annotations

import re

import pytest

from helpers import wine_base, wine_repo

ACCEPTANCE_CRITERIA = {
    1: "wine walkthrough golden file",
    2: "instance-before-schema gate",
    3: "replay soundness",
    4: "round-trip identity",
    5: "payload exclusivity and chain linearity",
    6: "retrieval soundness",
    7: "propagation contract",
    8: "impact correctness",
}


def pytest_terminal_summary(terminalreporter):
    """One pass/fail line per acceptance criterion, when any of them ran."""
    results: dict[int, bool] = {}
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance" not in nodeid:
                continue
            matched = re.search(r"test_c(\d+)_", nodeid)
            if not matched:
                continue
            number = int(matched.group(1))
            results[number] = results.get(number, True) and status == "passed"
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        verdict = "PASS" if results[number] else "FAIL"
        name = ACCEPTANCE_CRITERIA.get(number, "?")
        terminalreporter.write_line(f"criterion {number} ({name}): {verdict}")


@pytest.fixture
def base():
    """Fresh wine base ontology."""
    return wine_base()


@pytest.fixture
def repo():
    """In-memory repository with both wine versions committed."""
    return wine_repo()


@pytest.fixture
def repo_dir(tmp_path):
    """Directory holding an initialized on-disk wine repository."""
    from ontovcs import store
    from ontovcs.versioning import init_repository

    store.save_repository(init_repository(wine_base()), tmp_path)
    return tmp_path
