import pytest

from icsketch import _backend

BACKENDS = _backend.available()

#: (criterion, passed, detail) lines reported by the acceptance suite
ACCEPTANCE: list[tuple[str, bool, str]] = []


def record(name: str, passed: bool, detail: str) -> None:
    ACCEPTANCE.append((name, bool(passed), detail))
    print(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
