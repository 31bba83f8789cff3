from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from src.errors import IrregularLevel
from src.helpers import readonly
from src.plcore.piecewise import PiecewiseLinear, require_nonnegative
from src.plcore.rearrangement import monotone_rearrange


@dataclass(frozen=True, eq=False)
class LevelWindow:
    """Интервал значений (lo, hi), на котором число прообразов постоянно.

    Ветви y_k(v) = anchors[k] + (v - lo) * inverse_slopes[k] упорядочены
    по возрастанию x; каждая ветвь - это обращение одного наклонного отрезка u.
    """
    lo: float
    hi: float
    anchors: np.ndarray
    inverse_slopes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "anchors", readonly(self.anchors))
        object.__setattr__(self, "inverse_slopes", readonly(self.inverse_slopes))
        if not self.lo < self.hi:
            raise ValueError(f"Пустое окно уровней [{self.lo}, {self.hi}]")
        if self.anchors.size != self.inverse_slopes.size:
            raise ValueError("Число якорей не совпадает с числом наклонов")
        if np.any(self.inverse_slopes == 0.0):
            raise ValueError("Ветвь с нулевым наклоном")

    @property
    def multiplicity(self) -> int:
        return int(self.anchors.size)

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, v: float) -> bool:
        return self.lo < v < self.hi

    def preimages(self, v: float) -> np.ndarray:
        return self.anchors + (v - self.lo) * self.inverse_slopes


def level_windows(u: PiecewiseLinear) -> List[LevelWindow]:
    """Разбивает диапазон значений u на окна между соседними значениями в узлах.

    Наклонный отрезок либо целиком пересекает полосу между соседними
    значениями, либо не задевает её, поэтому внутри окна набор ветвей
    не меняется.
    """
    levels = np.unique(u.ys)
    y0, y1 = u.ys[:-1], u.ys[1:]
    x0 = u.xs[:-1]
    lo_seg = np.minimum(y0, y1)
    hi_seg = np.maximum(y0, y1)
    inv = np.diff(u.xs) / np.where(y1 != y0, y1 - y0, 1.0)

    windows = []
    for lo, hi in zip(levels[:-1].tolist(), levels[1:].tolist()):
        crossing = (y0 != y1) & (lo_seg <= lo) & (hi_seg >= hi)
        # x-порядок ветвей совпадает с порядком отрезков
        anchors = x0[crossing] + (lo - y0[crossing]) * inv[crossing]
        windows.append(LevelWindow(lo, hi, anchors, inv[crossing]))
    return windows


def find_window(u: PiecewiseLinear, v: float) -> LevelWindow:
    if np.any(u.ys == v):
        raise IrregularLevel(f"Уровень v={v!r} совпадает со значением u в узле или с уровнем площадки")
    for window in level_windows(u):
        if window.contains(v):
            return window
    raise IrregularLevel(f"Уровень v={v!r} лежит вне диапазона значений u [{u.ys.min()}, {u.ys.max()}]")


def rearranged_preimage(u: PiecewiseLinear, v: float) -> float:
    """Прообраз уровня v под u*, выраженный через упорядоченные прообразы u.

    С S = sum_k (-1)^k y_k:
      u(-1) < v: y* = 1 - S при чётном m, y* = -S при нечётном;
      u(-1) > v: y* = -1 + S при чётном m, y* = S при нечётном.

    Raises:
        IrregularLevel: Если v - значение u в узле или вне диапазона u.
    """
    require_nonnegative(u)
    window = find_window(u, v)
    ys = window.preimages(v)
    signs = np.where(np.arange(1, ys.size + 1) % 2 == 0, 1.0, -1.0)
    s = float(np.sum(signs * ys))
    even = ys.size % 2 == 0

    if float(u.ys[0]) < v:
        return u.hi - s if even else -s
    return u.lo + s if even else s


def slope_identity(u: PiecewiseLinear, v: float) -> Tuple[float, float]:
    """Обе стороны тождества 1/|u*'(y*)| = sum_k 1/|u'(y_k)| на уровне v."""
    window = find_window(u, v)
    star = monotone_rearrange(u)
    y_star = rearranged_preimage(u, v)
    idx = int(np.clip(np.searchsorted(star.xs, y_star, side="right") - 1, 0, star.xs.size - 2))
    lhs = 1.0 / abs(float(star.slopes[idx]))
    rhs = float(np.sum(np.abs(window.inverse_slopes)))
    return lhs, rhs
