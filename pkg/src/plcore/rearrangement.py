import logging
from enum import Enum
from typing import Union

import numpy as np

from src.helpers import DEDUP_TOL, dedup_breakpoints
from src.plcore.piecewise import (
    DistributionFn,
    PiecewiseLinear,
    require_canonical_domain,
    require_nonnegative,
)

logger = logging.getLogger(__name__)

LEVEL_BLOCK = 256


class RearrangementMode(str, Enum):
    """Виды перестановок"""
    MONOTONE = "monotone"
    SYMMETRIC = "symmetric"


def distribution(u: PiecewiseLinear) -> DistributionFn:
    """Функция распределения m(t) = |{x: u(x) > t}|.

    Между соседними значениями в узлах m линейна: её наклон равен
    -sum 1/|u'| по всем наклонным отрезкам, пересекающим полосу. На уровне
    площадки m имеет скачок на суммарную длину площадок; он хранится как два
    узла с равным t.

    Args:
        u (PiecewiseLinear): Неотрицательная функция.

    Returns:
        DistributionFn: m на [min u, max u].

    Raises:
        NegativeFunctionError: Если u принимает отрицательные значения.
    """
    require_nonnegative(u)

    levels = np.unique(u.ys)
    y0, y1 = u.ys[:-1], u.ys[1:]
    dx = np.diff(u.xs)
    lo = np.minimum(y0, y1)
    hi = np.maximum(y0, y1)
    flat = y0 == y1

    plateau = np.zeros(levels.size)
    np.add.at(plateau, np.searchsorted(levels, lo[flat]), dx[flat])

    sloped = ~flat
    density = dx[sloped] / (hi[sloped] - lo[sloped])
    seg_lo, seg_hi = lo[sloped], hi[sloped]
    # полоса [c_i, c_{i+1}] либо целиком внутри образа отрезка, либо не пересекает его;
    # суммируются только положительные слагаемые
    band_density = np.zeros(levels.size - 1)
    for start in range(0, levels.size - 1, LEVEL_BLOCK):
        stop = min(start + LEVEL_BLOCK, levels.size - 1)
        cover = (seg_lo[None, :] <= levels[start:stop, None]) & (seg_hi[None, :] >= levels[start + 1:stop + 1, None])
        band_density[start:stop] = cover.astype(np.float64) @ density

    # m(c_i) = m(c_{i+1}) + мера наклонных кусков в полосе + площадки на c_{i+1}
    increments = band_density * np.diff(levels) + plateau[1:]
    m_at = np.zeros(levels.size)
    m_at[:-1] = np.cumsum(increments[::-1])[::-1]

    ts, ms = [], []
    for c, m, p in zip(levels.tolist(), m_at.tolist(), plateau.tolist()):
        if p > 0.0:
            ts.extend((c, c))
            ms.extend((m + p, m))
        else:
            ts.append(c)
            ms.append(m)

    return DistributionFn(np.array(ts), np.array(ms), total=u.hi - u.lo)


def monotone_rearrange(u: PiecewiseLinear, dedup_tol: float = DEDUP_TOL) -> PiecewiseLinear:
    """Монотонная перестановка u*: {u* > t} = [1 - m(t), 1].

    Узлы u* - это точки (1 - m_i, t_i) функции распределения; скачок m
    превращается в площадку u* у правого края соответствующего диапазона.
    """
    require_canonical_domain(u)
    m = distribution(u)

    xs = np.maximum.accumulate(np.clip(u.hi - m.ms, u.lo, u.hi))
    xs[0], xs[-1] = u.lo, u.hi
    xs, ys = dedup_breakpoints(xs, m.ts, dedup_tol)
    if xs.size < 2:
        return PiecewiseLinear.constant(float(m.ts[-1]), u.lo, u.hi)
    return PiecewiseLinear(xs, ys)


def symmetric_rearrange(u: PiecewiseLinear, dedup_tol: float = DEDUP_TOL) -> PiecewiseLinear:
    """Симметризация: чётная функция, невозрастающая по |x|.

    Строится из u* заменой переменной y = (x - 1) / 2 на [-1, 0] и
    отражением на [0, 1], так что u_bar(y) = u*(2y + 1) при y <= 0.
    """
    star = monotone_rearrange(u, dedup_tol)

    left_x = 0.5 * (star.xs - 1.0)
    left_x[0], left_x[-1] = -1.0, 0.0
    xs = np.concatenate((left_x, -left_x[::-1][1:]))
    ys = np.concatenate((star.ys, star.ys[::-1][1:]))
    xs, ys = dedup_breakpoints(xs, ys, dedup_tol)
    return PiecewiseLinear(xs, ys)


def rearrange_by_mode(mode: Union[RearrangementMode, str], u: PiecewiseLinear,
                      dedup_tol: float = DEDUP_TOL) -> PiecewiseLinear:
    mode = RearrangementMode(mode)
    if mode is RearrangementMode.MONOTONE:
        return monotone_rearrange(u, dedup_tol)
    elif mode is RearrangementMode.SYMMETRIC:
        return symmetric_rearrange(u, dedup_tol)

    raise ValueError(f"Неизвестный вид перестановки: {mode}")
