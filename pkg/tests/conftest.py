"""Shared pytest wiring.

The acceptance tests register one summary line each; printing them from a
terminal-summary hook keeps the checklist visible even though pytest
captures stdout of passing tests.
"""

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance checklist")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
