import pytest


def pytest_configure(config):
    config._acceptance_lines = {}


@pytest.fixture(scope="session")
def acceptance_log(request):
    """Record one ``PASS``/``FAIL`` line per acceptance criterion."""
    lines = request.config._acceptance_lines

    def record(number: int, ok: bool, text: str) -> None:
        lines[number] = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {text}"

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", {})
    if not lines:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(lines):
        terminalreporter.write_line(lines[number])
