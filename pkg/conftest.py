import pytest

from src.plcore.piecewise import PiecewiseLinear
from src.weightlab.concrete_weights.expr_weight import ExprWeight


@pytest.fixture
def plateau_bump():
    """Площадки на уровнях 1 и 1.2, соединённые двумя рампами."""
    return PiecewiseLinear.from_points([(-1.0, 1.0), (-0.5, 1.0), (-0.3, 1.2), (0.3, 1.2), (0.5, 1.0), (1.0, 1.0)])


@pytest.fixture
def tent():
    return PiecewiseLinear.from_points([(-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)])


@pytest.fixture
def ramp():
    return PiecewiseLinear.from_points([(-1.0, 0.0), (1.0, 1.0)])


@pytest.fixture
def hat_weight():
    return ExprWeight("1 - abs(x)", (0.0, 2.0))


@pytest.fixture
def cfg():
    return {
        'LOG_LEVEL': 'INFO',
        'RR_THREADS': 2,
        'RR_QUAD_TOL': 1e-10,
        'RR_CONDITION_TOL': 1e-9,
        'RR_CHECK_X_NODES': 65,
        'RR_CHECK_V_SAMPLES': 17,
        'RR_DEDUP_TOL': 1e-12,
        'RR_MAX_DEPTH': 40,
        'RR_U_SAMPLES': 129,
        'RR_SWEEP_RESOLUTION_X': 33,
        'RR_SWEEP_RESOLUTION_V': 9,
    }
