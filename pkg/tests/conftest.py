import support


def pytest_terminal_summary(terminalreporter):
    lines = support.ACCEPTANCE_LINES
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
