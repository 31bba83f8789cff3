import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy.ndimage import maximum_filter1d, minimum_filter1d

from src.errors import EmptyU
from src.helpers import uniform_nodes
from src.plcore.piecewise import PiecewiseLinear
from src.weightlab.base_weight import IWeight
from src.weightlab.concrete_weights.expr_weight import ExprWeight
from src.weightlab.concrete_weights.mollified_weight import MollifiedWeight
from src.weightlab.value_set import ValueSet

logger = logging.getLogger(__name__)

DK_V_SAMPLES = 129
DK_POINTS_PER_WINDOW = 32


def lambda_weight(v_range: Tuple[float, float] = (0.0, 1.0)) -> ExprWeight:
    """Вспомогательный вес 1 - |x|: чётный, вогнутый, удовлетворяет a(s) + a(t) >= a(1 - t + s)."""
    return ExprWeight("1 - abs(x)", v_range)


def level_preimage(u: PiecewiseLinear, v: float) -> Tuple[np.ndarray, np.ndarray]:
    """u^{-1}(v): точки пересечения наклонных отрезков и площадки на уровне v.

    Returns:
        Tuple[np.ndarray, np.ndarray]: Точки и массив отрезков площадок формы (m, 2).
    """
    x0, x1 = u.xs[:-1], u.xs[1:]
    y0, y1 = u.ys[:-1], u.ys[1:]
    flat = (y0 == y1) & (y0 == v)
    sloped = (y0 != y1) & (np.minimum(y0, y1) <= v) & (np.maximum(y0, y1) >= v)
    crossings = x0[sloped] + (v - y0[sloped]) * (x1[sloped] - x0[sloped]) / (y1[sloped] - y0[sloped])
    plateaus = np.stack((x0[flat], x1[flat]), axis=1) if np.any(flat) else np.empty((0, 2))
    return crossings, plateaus


def compute_Dk(a: IWeight, u: PiecewiseLinear, k: int, nv: int = DK_V_SAMPLES,
               points_per_window: int = DK_POINTS_PER_WINDOW) -> float:
    """D_k(a, U): отношение колебания a(., v) на окнах ширины 2/k к минимуму a
    в (2/k)-окрестности прообраза u^{-1}(v), супремум по уровням из U(a).

    Уровни берутся равномерно на [min u, max u]; U(a) - уровни, где a(., v)
    не тождественный ноль. Нулевой знаменатель даёт +inf.

    Raises:
        EmptyU: Если a(., v) = 0 на всех просмотренных уровнях.
    """
    if k < 2:
        raise ValueError(f"k должно быть не меньше 2, получено {k}")
    if points_per_window % 2:
        points_per_window += 1

    n = k * points_per_window
    xs = uniform_nodes(n)
    width = 2.0 / k
    v_lo, v_hi = float(np.min(u.ys)), float(np.max(u.ys))
    vs = np.array([v_lo]) if v_lo == v_hi else np.linspace(v_lo, v_hi, nv)

    worst = 0.0
    seen = 0
    for v in vs.tolist():
        row = np.asarray(a(xs, v), dtype=np.float64)
        if not np.any(row > 0.0):
            continue
        seen += 1

        # окно из points_per_window шагов сетки имеет ширину ровно 2/k
        size = points_per_window + 1
        oscillation = float(np.max(maximum_filter1d(row, size, mode="nearest")
                                   - minimum_filter1d(row, size, mode="nearest")))

        crossings, plateaus = level_preimage(u, v)
        near = np.zeros(xs.size, dtype=bool)
        for c in crossings.tolist():
            near |= np.abs(xs - c) <= width
        for p0, p1 in plateaus.tolist():
            near |= (xs >= p0 - width) & (xs <= p1 + width)

        candidates = [row[near]]
        if crossings.size:
            candidates.append(np.asarray(a(crossings, v), dtype=np.float64))
        denominator = float(np.min(np.concatenate(candidates))) if any(c.size for c in candidates) else math.inf

        if denominator <= 0.0:
            logger.debug(f"D_k: zero denominator at v={v!r}")
            return math.inf
        worst = max(worst, oscillation / denominator)

    if seen == 0:
        raise EmptyU("Вес тождественно равен нулю на всех уровнях из диапазона u")
    return worst


def zero_mollify(a: IWeight, zero_set: ValueSet, ell: int) -> MollifiedWeight:
    """b_l = a * rho(l * dist(v, W) - 1): обнуление веса около множества уровней W."""
    return MollifiedWeight(a, zero_set, ell)


def lipschitz_envelope(t: np.ndarray, grid: np.ndarray, lipschitz: Optional[float] = 1.0) -> np.ndarray:
    """Нижняя L-липшицева огибающая: t~(v_i) = min_j { t(v_j) + L |v_i - v_j| }.

    Два прохода с накопленным минимумом вместо попарного перебора:
    слева min_{j<=i} (t_j - L v_j) + L v_i, справа min_{j>=i} (t_j + L v_j) - L v_i.
    """
    t = np.asarray(t, dtype=np.float64)
    grid = np.asarray(grid, dtype=np.float64)
    if t.shape != grid.shape or t.ndim != 1:
        raise ValueError("Значения и сетка должны быть одномерными массивами одной длины")
    if t.size == 0:
        return t.copy()
    lipschitz = 1.0 if lipschitz is None else float(lipschitz)
    if lipschitz < 0.0:
        raise ValueError(f"Константа Липшица должна быть неотрицательной, получено {lipschitz}")

    order = np.argsort(grid, kind="stable")
    g, tv = grid[order], t[order]
    forward = np.minimum.accumulate(tv - lipschitz * g) + lipschitz * g
    backward = np.minimum.accumulate((tv + lipschitz * g)[::-1])[::-1] - lipschitz * g

    out = np.empty_like(t)
    out[order] = np.minimum(forward, backward)
    return out
