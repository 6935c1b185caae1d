from __future__ import annotations

import pytest

_LINES: list[str] = []


class Verdicts:
    """Collects one PASS/FAIL line per acceptance criterion."""

    def record(self, label: str, passed: bool, detail: str) -> None:
        line = f"{'PASS' if passed else 'FAIL'} {label}: {detail}"
        _LINES.append(line)
        print(line)


@pytest.fixture
def verdict() -> Verdicts:
    return Verdicts()


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES):
            terminalreporter.write_line(line)
