import pytest

from poisson_order_k.sweep_fit import sweep

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def desk_sweep():
    """Threshold sets for every k in [2, 2000] (about 20 s on one core)."""
    return sweep(2, 2000, rel_tol=1e-12, jobs=None)


@pytest.fixture(scope="session")
def record_criterion():
    def record(number: int, title: str, passed: bool, detail: str = "") -> None:
        status = "PASS" if passed else "FAIL"
        ACCEPTANCE_LINES.append(f"[{status}] criterion {number}: {title}" + (f" ({detail})" if detail else ""))

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
