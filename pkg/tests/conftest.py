import sys


def pytest_terminal_summary(terminalreporter):
    """Echo the one-line-per-criterion acceptance checklist after the run."""
    lines = getattr(sys, "_acceptance_report_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
