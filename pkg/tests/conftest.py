from pathlib import Path

import numpy as np
import pytest

DATA = Path(__file__).parent / "data"

# (criterion id, passed, message) collected by test_acceptance.py
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def golden():
    g = np.load(DATA / "golden_expm.npz")
    return {k: g[k] for k in g.files}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for cid, ok, msg in sorted(ACCEPTANCE_LINES, key=lambda x: int(x[0][1:])):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {cid}: {msg}")
