import pytest
from hypothesis import settings

from stepfourier import build, fixture_names

from _helpers import criteria, load

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")


def pytest_terminal_summary(terminalreporter):
    if not criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(criteria, key=lambda c: c[0]):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture
def ex33():
    return build(load("ex3_3").problem)


@pytest.fixture(params=fixture_names())
def fixture_name(request):
    return request.param
