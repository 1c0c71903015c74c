from pathlib import Path

CAMERA = Path(__file__).parent / "data" / "camera.pgm"

# PASS/FAIL lines collected by the acceptance suite.
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
