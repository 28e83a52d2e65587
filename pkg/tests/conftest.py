import re

import pytest

from catbn.fixtures import chain_bn, collider_bn, five_node_bn, independent_bn, survey_bn
from catbn.params import forward_sample

_CRITERION = re.compile(r"test_criterion_(\d+)")
_results: dict[int, list] = {}


@pytest.fixture(scope="session")
def chain_10k():
    return forward_sample(chain_bn(), 10_000, seed=0)


@pytest.fixture(scope="session")
def collider_10k():
    return forward_sample(collider_bn(), 10_000, seed=0)


@pytest.fixture(scope="session")
def independent_10k():
    return forward_sample(independent_bn(), 10_000, seed=0)


@pytest.fixture(scope="session")
def chain_50k():
    return forward_sample(chain_bn(), 50_000, seed=0)


@pytest.fixture(scope="session")
def five_50k():
    return forward_sample(five_node_bn(), 50_000, seed=0)


@pytest.fixture(scope="session")
def survey_50k():
    return forward_sample(survey_bn(), 50_000, seed=0)


@pytest.fixture(scope="session")
def survey_2k():
    return forward_sample(survey_bn(), 2_000, seed=3)


@pytest.fixture
def criterion_note(request):
    """Attach a one-line detail to the acceptance summary line of this test."""
    m = _CRITERION.search(request.node.name)

    def note(text):
        if m:
            entry = _results.setdefault(int(m.group(1)), [None, ""])
            entry[1] = f"{entry[1]}; {text}" if entry[1] else text

    return note


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = _CRITERION.search(item.name)
    if not m:
        return
    entry = _results.setdefault(int(m.group(1)), [None, ""])
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        entry[0] = rep.passed and entry[0] is not False


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_results):
        ok, detail = _results[num]
        verdict = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {num:2d}: {verdict}  {detail}".rstrip())
