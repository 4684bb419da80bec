import pytest

from sceneforge.assets import load_default_manifest

# pass/fail lines recorded by the acceptance tests, replayed after the
# run so they survive output capture
VERDICTS: list[str] = []


@pytest.fixture(scope="session")
def catalog():
    return load_default_manifest()


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance verdicts")
        for line in VERDICTS:
            terminalreporter.write_line(line)
