import pytest

from odegeom.geom import metric_from_frame
from odegeom.jet import builtin
from odegeom.pentad import solve_pentad
from odegeom.so3 import build_G


@pytest.fixture(scope="session")
def conics5():
    return builtin("conics5")


@pytest.fixture(scope="session")
def gn5():
    return builtin("gn5")


@pytest.fixture(scope="session")
def conics4():
    return builtin("conics4")


@pytest.fixture(scope="session")
def pd_conics5(conics5):
    return solve_pentad(conics5)


@pytest.fixture(scope="session")
def pd_gn5(gn5):
    return solve_pentad(gn5)


@pytest.fixture(scope="session")
def pd_conics4(conics4):
    return solve_pentad(conics4)


@pytest.fixture(scope="session")
def metric_conics5(pd_conics5):
    return metric_from_frame(pd_conics5)


@pytest.fixture(scope="session")
def metric_gn5(pd_gn5):
    return metric_from_frame(pd_gn5)


@pytest.fixture(scope="session")
def gtensor(pd_conics5, metric_conics5):
    return build_G(pd_conics5, metric_conics5)
