import pytest

_RESULTS_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_RESULTS_KEY] = []


@pytest.fixture
def acceptance(request):
    """Record one acceptance line: ``acceptance(label, passed, detail)``; ``passed=None`` means skipped."""
    results = request.config.stash[_RESULTS_KEY]

    def record(label: str, passed, detail: str) -> bool:
        status = "SKIP" if passed is None else ("PASS" if passed else "FAIL")
        line = f"{status}  {label}: {detail}"
        results.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_RESULTS_KEY, [])
    if results:
        terminalreporter.section("acceptance criteria")
        for line in results:
            terminalreporter.write_line(line)
