import pytest

from freemaps.parsing import parse_endomorphism

# the two standard example maps
GROWTH_MAP = "a->abbaB; b->baBab"
ORBIT_MAP = "a->abc; b->cAba; c->ACab"


@pytest.fixture
def growth_map():
    return parse_endomorphism(GROWTH_MAP)


@pytest.fixture
def orbit_map():
    return parse_endomorphism(ORBIT_MAP)


_acceptance: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and "::test_criterion_" in report.nodeid:
        if report.when == "call" or report.outcome != "passed":
            name = report.nodeid.split("::test_")[-1]
            _acceptance.setdefault(name, "PASS" if report.passed else "FAIL")
            if report.failed:
                _acceptance[name] = "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance, key=lambda s: int(s.split("_")[1])):
        terminalreporter.write_line(f"{_acceptance[name]}  {name}")
