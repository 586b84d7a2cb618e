import pytest

from sextics.classify import enumerate_all


@pytest.fixture(scope="session")
def ns_reports():
    """Realized non-special reports for mu <= 18, keyed by set string."""
    return {str(r.S): r for r in enumerate_all(18, "ns", include_empty=True)}


@pytest.fixture(scope="session")
def torus_reports():
    return {str(r.S.plain()): r for r in enumerate_all(18, "3")}


CRITERIA: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA):
            terminalreporter.write_line(line)
