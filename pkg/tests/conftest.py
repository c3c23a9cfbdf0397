import numpy as np
import pytest

from morawetz.evolve import gaussian
from morawetz.grid import ComplexField, make_grid


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance-criterion lines even when output is captured."""
    from tests import acceptance_log

    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def grid2():
    return make_grid(2, 32, 12.0)


@pytest.fixture
def grid3():
    return make_grid(3, 16, 10.0)


@pytest.fixture
def moving_gaussian2(grid2):
    return gaussian(grid2, 1.2, 1.0, (0.4, -0.3), (0.7, -0.4))


def chirped(field: ComplexField, rate: float = 0.3) -> ComplexField:
    """Multiply by ``exp(i rate |x|^2)`` so the momentum is not a uniform boost."""
    r2 = sum(x**2 for x in field.grid.coords)
    return ComplexField(field.grid, field.values * np.exp(1j * rate * r2))
