import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from renormlab.combinatorics import PERIOD_DOUBLING, OrderType
from renormlab.renorm import solve_fixed_point, sweep

PD_ELLS = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0]
PERIOD_THREE = OrderType((2, 3, 1))


@pytest.fixture(scope="session")
def pd_sweep():
    return sweep(PERIOD_DOUBLING, PD_ELLS, degree=64, tol=1e-11)


@pytest.fixture(scope="session")
def pd2(pd_sweep):
    return pd_sweep.solutions[0]


@pytest.fixture(scope="session")
def pd2_deg40():
    return solve_fixed_point(2.0, PERIOD_DOUBLING, degree=40, tol=1e-11)


@pytest.fixture(scope="session")
def pd128(pd_sweep):
    return pd_sweep.solutions[-1]


@pytest.fixture(scope="session")
def pd256(pd128):
    # degree 64 no longer resolves E at ell = 256
    s = solve_fixed_point(128.0, PERIOD_DOUBLING, degree=96, tol=1e-11, init=pd128)
    return solve_fixed_point(256.0, PERIOD_DOUBLING, degree=96, tol=1e-11, init=s)


@pytest.fixture(scope="session")
def p3():
    return solve_fixed_point(2.0, PERIOD_THREE, degree=64, tol=1e-11)


@pytest.fixture(scope="session")
def p3_ell4(p3):
    return solve_fixed_point(4.0, PERIOD_THREE, degree=64, tol=1e-11, init=p3)
