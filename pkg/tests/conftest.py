import pytest

from photon_sim import preset


@pytest.fixture(scope="session")
def ba():
    return preset("BA_BA")


@pytest.fixture(scope="session")
def nv():
    return preset("NV_NV")


@pytest.fixture(scope="session")
def qd():
    return preset("QD_YB")


_ACCEPTANCE: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
