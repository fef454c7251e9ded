import numpy as np
import pytest

from rivernet.graph import BoundaryCondition, EdgeParams, build_network

DAY = 86400.0


def interval(L=100.0, D=1.0, v=0.1, r=0.02, m=0.005, K=1.0, A=1.0,
             upstream="zero-flux", downstream="free-flow"):
    """Single-edge network with the named boundary presets."""
    kinds = {
        "zero-flux": BoundaryCondition.zero_flux,
        "free-flow": BoundaryCondition.free_flow,
        "hostile": BoundaryCondition.hostile,
    }
    params = [EdgeParams(D=D, v=v, A=A, r=r, m=m, K=K)]
    bmap = {0: kinds[upstream](), 1: kinds[downstream]()}
    return build_network([0, 1], [(0, 1, L)], params, bmap)


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
