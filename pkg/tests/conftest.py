import pytest
from hypothesis import HealthCheck, settings

from streamdict.krhash import FpParams

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def params():
    return FpParams.create(seed=2024)


@pytest.fixture(scope="session")
def tiny():
    """p = 101, r = 7: small enough to check by hand."""
    return FpParams.create(p=101, r=7, max_stream_len=4, table_size=64, check_bound=False)


ACCEPTANCE: dict[int, str] = {}


@pytest.fixture(scope="session")
def acceptance():
    """record(n, title, ok, detail): one PASS/FAIL line per acceptance criterion."""

    def record(n: int, title: str, ok: bool, detail: str = "") -> bool:
        line = f"criterion {n:>2} {'PASS' if ok else 'FAIL'}  {title}" + (f"  [{detail}]" if detail else "")
        ACCEPTANCE[n] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
