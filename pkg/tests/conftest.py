import pytest

from shelfmix import config


@pytest.fixture(autouse=True)
def _reset_config(monkeypatch):
    for name in ("SHELFMIX_MAX_N", "SHELFMIX_ENUM_BUDGET", "SHELFMIX_MAX_SHELVES"):
        monkeypatch.delenv(name, raising=False)
    config.clear_overrides()
    yield
    config.clear_overrides()


ACCEPTANCE_LINES = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    """Record one PASS/FAIL line per acceptance criterion for the run summary."""
    lines = request.config.stash.setdefault(ACCEPTANCE_LINES, [])

    def log(number: int, title: str, ok: bool, detail: str = "") -> None:
        lines.append(f"[{number:>2}] {'PASS' if ok else 'FAIL'}  {title}" + (f"  ({detail})" if detail else ""))

    return log


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
