import pytest

from eftqc import AlgorithmCostModel, ReachProblem, ScalabilityModel, SurfaceCodeModel


@pytest.fixture
def default_code():
    return SurfaceCodeModel()


@pytest.fixture
def default_cost():
    return AlgorithmCostModel()


@pytest.fixture
def default_problem(default_code, default_cost):
    # the operating point behind the headline reach numbers
    return ReachProblem(
        scalability=ScalabilityModel.power_law(1e-4, 3.5),
        code=default_code,
        cost=default_cost,
    )
