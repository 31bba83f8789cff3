import hypothesis.strategies as st
import numpy as np

from src.plcore.piecewise import PiecewiseLinear

GRID = 200


@st.composite
def pl_functions(draw, max_points: int = 16, max_value: int = 100, equal_ends: bool = False):
    """Неотрицательные PL-функции на [-1, 1] с узлами на сетке шага 1/100.

    Значения тоже берутся с шагом 1/100, поэтому площадки и совпадающие
    уровни встречаются часто.
    """
    inner = draw(st.lists(st.integers(1, GRID - 1), min_size=0, max_size=max_points - 2, unique=True))
    xs = np.array([0] + sorted(inner) + [GRID], dtype=np.float64) / 100.0 - 1.0
    values = draw(st.lists(st.integers(0, max_value), min_size=xs.size, max_size=xs.size))
    ys = np.array(values, dtype=np.float64) / 100.0
    if equal_ends:
        ys[-1] = ys[0]
    return PiecewiseLinear(xs, ys)
