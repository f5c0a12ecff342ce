import json
from pathlib import Path

import numpy as np
import pytest

DATA = Path(__file__).parent / "data"

# (criterion, passed, detail) lines collected by the acceptance suite
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def golden():
    return json.loads((DATA / "pyphi_golden.json").read_text())


@pytest.fixture(scope="session")
def relabel_pairs():
    return json.loads((DATA / "pyphi_relabel.json").read_text())["pairs"]


@pytest.fixture(scope="session")
def derived():
    return json.loads((DATA / "derived_values.json").read_text())


@pytest.fixture
def record():
    def _record(criterion, passed, detail, soft=False):
        if soft:
            tag = "SOFT-MET" if passed else "SOFT-MISS"
        else:
            tag = "PASS" if passed else "FAIL"
        line = f"[{tag}] {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

