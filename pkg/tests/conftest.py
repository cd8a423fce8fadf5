"""Shared test configuration: surfaces acceptance-criterion results.

The acceptance module registers one line per criterion; they are printed
in the terminal summary so every run shows them regardless of capture.
"""

acceptance_lines = []


def pytest_terminal_summary(terminalreporter):
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
