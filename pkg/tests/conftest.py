import functools

import pytest

from poissonbv import fixture as _fixture


@functools.lru_cache(maxsize=None)
def structure(name):
    return _fixture(name)


@pytest.fixture(params=["F0", "F1", "F2", "F3", "F4"])
def any_fixture(request):
    return structure(request.param)


# Lines recorded by the acceptance tests, echoed at the end of the run.
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
