import pytest

_VERDICTS = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_VERDICTS] = {}


@pytest.fixture
def verdict(request):
    """Record one acceptance criterion and fail the test when it does not hold."""
    table = request.config.stash[_VERDICTS]

    def record(number: int, passed: bool, detail: str) -> None:
        table[number] = (passed, detail)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'} | {detail}")
        assert passed, detail

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    table = config.stash[_VERDICTS]
    if not table:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(table):
        passed, detail = table[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'} | {detail}")
