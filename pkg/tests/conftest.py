import pytest

from dwnls.grid_solver import DiscreteProblem, linear_doublet


@pytest.fixture(scope="session")
def gaussian_problem():
    return DiscreteProblem(half_width=5.0, n_points=2001, hbar=0.1, sigma=1.0)


@pytest.fixture(scope="session")
def gaussian_doublet(gaussian_problem):
    return linear_doublet(gaussian_problem)
