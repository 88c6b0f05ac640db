import pytest

from rbcphase.dressed import DressedSolver


@pytest.fixture(scope="session")
def coarse_solver():
    """Reduced radial resolution; adequate for structural checks."""
    return DressedSolver(n_radial=1500)


@pytest.fixture(scope="session")
def solver():
    return DressedSolver()


ACCEPTANCE_LINES: dict = {}


@pytest.fixture(scope="session")
def acceptance_report():
    def report(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES[number] = line
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
