import pytest

from normord.euler import constant_A, constant_B
from normord.sieve import build_table

_CRITERIA = []


@pytest.fixture(scope="session")
def table_1e4():
    return build_table(10**4)


@pytest.fixture(scope="session")
def table_1e7():
    return build_table(10**7)


@pytest.fixture(scope="session")
def A7():
    return constant_A(10**7)


@pytest.fixture(scope="session")
def B7():
    return constant_B(10**7)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _CRITERIA.append((mark.args[0], mark.args[1], rep.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num, text, outcome in sorted(_CRITERIA):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {num:2d}: {text}")
