from __future__ import annotations

import pytest

_VERDICTS: list[str] = []


class CriterionLog:
    """Records one pass/fail line per acceptance criterion."""

    def record(self, number: int, title: str, ok: bool, detail: str = "") -> None:
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}: {title}"
        if detail:
            line += f" ({detail})"
        _VERDICTS.append(line)
        print(line)
        assert ok, line


@pytest.fixture(scope="session")
def criterion() -> CriterionLog:
    return CriterionLog()


def pytest_terminal_summary(terminalreporter) -> None:
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_VERDICTS, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
