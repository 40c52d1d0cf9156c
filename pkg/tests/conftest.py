import pytest

from pendsim.model import derive_constants, default_controller_params, default_physical_params

# filled by test_acceptance.py, printed at the end of the session
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def phys():
    return default_physical_params()


@pytest.fixture(scope="session")
def ctrl():
    return default_controller_params()


@pytest.fixture(scope="session")
def consts(phys, ctrl):
    return derive_constants(phys, ctrl)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
