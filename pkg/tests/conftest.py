"""Shared pytest hooks.

The acceptance tests record one summary line per criterion.  Printing
those from inside a passing test gets swallowed by output capture, so a
terminal-summary hook replays them after the run.
"""

import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "ANNOUNCED", None) if module else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
