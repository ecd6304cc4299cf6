import numpy as np
import pytest

# (criterion id, status, detail) recorded by tests/test_acceptance.py
ACCEPTANCE_RESULTS = []


@pytest.fixture
def rng():
    return np.random.default_rng(20140611)


@pytest.fixture
def record():
    def _record(cid, ok, detail):
        ACCEPTANCE_RESULTS.append((cid, "PASS" if ok else "FAIL", detail))
        assert ok, f"{cid}: {detail}"

    def _skip(cid, reason):
        ACCEPTANCE_RESULTS.append((cid, "SKIP", reason))
        pytest.skip(reason)

    _record.skip = _skip
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid, status, detail in sorted(ACCEPTANCE_RESULTS, key=lambda r: int(r[0][1:])):
        terminalreporter.write_line(f"{status} {cid}: {detail}")
