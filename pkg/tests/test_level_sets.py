import numpy as np
import pytest
from hypothesis import given, settings

from src.errors import IrregularLevel
from src.plcore.level_sets import find_window, level_windows, rearranged_preimage, slope_identity
from src.plcore.piecewise import PiecewiseLinear
from src.plcore.rearrangement import monotone_rearrange
from strategies import pl_functions


def test_windows_of_tent(tent):
    windows = level_windows(tent)
    assert len(windows) == 1
    w = windows[0]
    assert (w.lo, w.hi, w.multiplicity) == (0.0, 1.0, 2)
    assert w.preimages(0.25).tolist() == pytest.approx([-0.75, 0.75])


def test_find_window_irregular(plateau_bump):
    with pytest.raises(IrregularLevel):
        find_window(plateau_bump, 1.0)
    with pytest.raises(IrregularLevel):
        find_window(plateau_bump, 1.2)
    with pytest.raises(IrregularLevel):
        find_window(plateau_bump, 2.0)


@pytest.mark.parametrize("v, expected", [(0.25, -0.5), (0.5, 0.0), (0.9, 0.8)])
def test_four_case_table_tent(tent, v, expected):
    # u(-1) < v, две ветви: y* = 1 - (y_2 - y_1)
    assert rearranged_preimage(tent, v) == pytest.approx(expected)


def test_four_case_table_decreasing():
    u = PiecewiseLinear.from_points([(-1.0, 1.0), (1.0, 0.0)])
    # u(-1) > v, одна ветвь: y* = S = -y_1
    assert rearranged_preimage(u, 0.25) == pytest.approx(-0.5)


def test_four_case_table_valley():
    u = PiecewiseLinear.from_points([(-1.0, 1.0), (0.0, 0.0), (1.0, 1.0)])
    # u(-1) > v, две ветви: y* = -1 + (y_2 - y_1)
    assert rearranged_preimage(u, 0.5) == pytest.approx(0.0)
    assert monotone_rearrange(u)(0.0) == pytest.approx(0.5)


def test_slope_identity_tent(tent):
    lhs, rhs = slope_identity(tent, 0.3)
    assert lhs == pytest.approx(2.0)
    assert rhs == pytest.approx(2.0)


@settings(deadline=None, max_examples=60)
@given(pl_functions())
def test_slope_identity_on_regular_levels(u):
    star = monotone_rearrange(u)
    for w in level_windows(u):
        v = w.midpoint
        if np.any(u.ys == v):
            continue
        lhs, rhs = slope_identity(u, v)
        assert lhs == pytest.approx(rhs, rel=1e-9)
        assert star(rearranged_preimage(u, v)) == pytest.approx(v, abs=1e-9)
