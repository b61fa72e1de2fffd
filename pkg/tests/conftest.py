import pytest

from declat.forest import all_forests, chain_forest, satellite_forest


@pytest.fixture(scope="session")
def forests5():
    return all_forests(5)


@pytest.fixture
def chain():
    return chain_forest()


@pytest.fixture
def sat():
    return satellite_forest()


def pytest_terminal_summary(terminalreporter):
    rows = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            if rep.when == "call" and "test_acceptance.py::test_criterion" in rep.nodeid:
                rows.append((rep.nodeid.split("::")[-1], key.upper()))
    if rows:
        terminalreporter.section("acceptance criteria")
        for name, status in sorted(rows, key=lambda r: int(r[0].split("_")[2])):
            terminalreporter.write_line(f"{status:6}  {name}")
