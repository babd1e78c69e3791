import warnings

import pytest

from striph.errors import ToleranceNotReached

# (number, title, passed, detail) rows filled by test_acceptance.py
ACCEPTANCE: list[tuple[int, str, bool, str]] = []


@pytest.fixture(autouse=True)
def _quadrature_caps_are_errors():
    """Hitting the adaptive cap in a test means the oracle was not reached."""
    with warnings.catch_warnings():
        warnings.simplefilter("error", ToleranceNotReached)
        yield


@pytest.fixture
def criterion():
    """Record one acceptance line, then fail the test if the criterion failed."""

    def record(number: int, title: str, passed: bool, detail: str) -> None:
        ACCEPTANCE.append((number, title, bool(passed), detail))
        print(f"criterion {number:2d} {'PASS' if passed else 'FAIL'}: {title}: {detail}")
        assert passed, f"criterion {number} ({title}) failed: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {number:2d} {'PASS' if passed else 'FAIL'}: {title}: {detail}")
