import pytest

from geaoi import simulate as sim


@pytest.fixture(params=sim.available_backends())
def backend(request):
    previous = sim.get_backend()
    sim.set_backend(request.param)
    yield request.param
    sim.set_backend(previous)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
