import pytest

# criterion id -> (passed, detail); filled in by test_acceptance.py
ACCEPTANCE = {}


def record(cid, title, ok, detail):
    line = f"criterion {cid} [{title}]: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[cid] = line
    print(line)
    return ok


@pytest.fixture
def acceptance():
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[cid])
