import pytest

from mmwsscm import ModelParams, RngStream
from mmwsscm.ensemble import iter_realizations

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def params():
    return ModelParams().validate()


@pytest.fixture
def rng():
    return RngStream(12345)


@pytest.fixture(scope="session")
def small_ensemble():
    """300 default channels, shared by the property-style tests."""
    return list(iter_realizations(ModelParams(), seed=7, size=300))


@pytest.fixture
def acceptance_log():
    def record(criterion: str, passed: bool, detail: str) -> None:
        ACCEPTANCE_LINES.append(f"{'PASS' if passed else 'FAIL'}  [{criterion}] {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
