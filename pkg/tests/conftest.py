import pathlib

import pytest

from rm2mp import parse_program

ROOT = pathlib.Path(__file__).resolve().parent.parent
MAX_PROGRAM_PATH = ROOT / "programs" / "max.rm"


@pytest.fixture(scope="session")
def max_text():
    return MAX_PROGRAM_PATH.read_text()


@pytest.fixture(scope="session")
def max_program(max_text):
    return parse_program(max_text)


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
