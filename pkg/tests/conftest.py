import pytest

from dihedral.quadfield import make_field_context
from dihedral.waveform import form_for_height, l2_norm_numeric


@pytest.fixture(scope="session")
def ctx13():
    return make_field_context(13)


@pytest.fixture(scope="session")
def form6(ctx13):
    return form_for_height(ctx13, 6, 0.004)


@pytest.fixture(scope="session")
def norm6(form6):
    return l2_norm_numeric(form6).norm


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
