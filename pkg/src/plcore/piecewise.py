from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, Tuple, Union

import numpy as np

from src.errors import NegativeFunctionError
from src.helpers import readonly, uniform_nodes

ArrayLike = Union[float, np.ndarray, Sequence[float]]

CANONICAL_DOMAIN = (-1.0, 1.0)


@dataclass(frozen=True, eq=False)
class PiecewiseLinear:
    """Непрерывная кусочно-линейная функция, заданная узлами и значениями.

    Обычно область определения - [-1, 1]; функции на других отрезках
    (например, на [0, 1] в конструкции аппроксимации) тоже допускаются,
    проверка канонической области делается там, где она нужна.

    Attributes:
        xs (np.ndarray): Строго возрастающие абсциссы узлов.
        ys (np.ndarray): Значения в узлах.
    """
    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = readonly(self.xs)
        ys = readonly(self.ys)
        if xs.ndim != 1 or ys.ndim != 1:
            raise ValueError("Узлы и значения должны быть одномерными массивами")
        if xs.size != ys.size:
            raise ValueError(f"Число узлов ({xs.size}) не совпадает с числом значений ({ys.size})")
        if xs.size < 2:
            raise ValueError("Нужно хотя бы два узла")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise ValueError("Узлы и значения должны быть конечными")
        if np.any(np.diff(xs) <= 0.0):
            raise ValueError("Абсциссы узлов должны строго возрастать")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @classmethod
    def from_points(cls, points: Iterable[Tuple[float, float]]) -> "PiecewiseLinear":
        pts = list(points)
        return cls(np.array([p[0] for p in pts]), np.array([p[1] for p in pts]))

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray], np.ndarray], n: int,
                      lo: float = -1.0, hi: float = 1.0) -> "PiecewiseLinear":
        """Кусочно-линейная интерполяция fn по n равномерным узлам."""
        if n < 2:
            raise ValueError("Нужно хотя бы два узла выборки")
        xs = uniform_nodes(n - 1, lo, hi)
        ys = np.broadcast_to(np.asarray(fn(xs), dtype=np.float64), xs.shape)
        return cls(xs, ys)

    @classmethod
    def constant(cls, c: float, lo: float = -1.0, hi: float = 1.0) -> "PiecewiseLinear":
        return cls(np.array([lo, hi]), np.array([c, c]))

    def __call__(self, x: ArrayLike) -> np.ndarray:
        return np.interp(x, self.xs, self.ys)

    @property
    def lo(self) -> float:
        return float(self.xs[0])

    @property
    def hi(self) -> float:
        return float(self.xs[-1])

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.ys) / np.diff(self.xs)

    @property
    def on_canonical_domain(self) -> bool:
        return self.lo == CANONICAL_DOMAIN[0] and self.hi == CANONICAL_DOMAIN[1]

    def segments(self):
        """Итератор по отрезкам (x0, x1, y0, y1)."""
        for i in range(self.xs.size - 1):
            yield float(self.xs[i]), float(self.xs[i + 1]), float(self.ys[i]), float(self.ys[i + 1])

    def with_breakpoints(self, extra: ArrayLike) -> "PiecewiseLinear":
        """Та же функция с добавленными узлами внутри области."""
        extra = np.atleast_1d(np.asarray(extra, dtype=np.float64))
        extra = extra[(extra > self.lo) & (extra < self.hi)]
        xs = np.union1d(self.xs, extra)
        return PiecewiseLinear(xs, self(xs))

    def restrict(self, lo: float, hi: float) -> "PiecewiseLinear":
        if not (self.lo <= lo < hi <= self.hi):
            raise ValueError(f"Отрезок [{lo}, {hi}] не лежит в [{self.lo}, {self.hi}]")
        inner = self.xs[(self.xs > lo) & (self.xs < hi)]
        xs = np.concatenate(([lo], inner, [hi]))
        return PiecewiseLinear(xs, self(xs))

    def reflect(self) -> "PiecewiseLinear":
        """x -> -x: функция u(-x) на отрезке [-hi, -lo]."""
        return PiecewiseLinear(-self.xs[::-1], self.ys[::-1])

    def to_literal(self) -> str:
        """Запись в формате `pl:x0:y0,x1:y1,...`."""
        return "pl:" + ",".join(f"{x!r}:{y!r}" for x, y in zip(self.xs.tolist(), self.ys.tolist()))


@dataclass(frozen=True)
class PLMetrics:
    integral: float
    total_variation: float
    min: float
    max: float
    max_slope: float

    def to_dict(self) -> dict:
        return {
            'integral': self.integral,
            'total_variation': self.total_variation,
            'min': self.min,
            'max': self.max,
            'max_slope': self.max_slope,
        }


@dataclass(frozen=True, eq=False)
class DistributionFn:
    """Функция распределения m(t) = |{u > t}|.

    Узлы ts неубывают: пара соседних узлов с одинаковым t и разными m
    описывает скачок на уровне площадки ("вертикальный отрезок").
    В точке скачка берётся правое (меньшее) значение.
    """
    ts: np.ndarray
    ms: np.ndarray
    total: float = field(default=2.0)

    def __post_init__(self):
        ts = readonly(self.ts)
        ms = readonly(self.ms)
        if ts.size != ms.size or ts.size < 1:
            raise ValueError("Некорректная функция распределения")
        if np.any(np.diff(ts) < 0.0):
            raise ValueError("Уровни функции распределения должны неубывать")
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "ms", ms)

    def __call__(self, t: ArrayLike) -> np.ndarray:
        t_in = np.asarray(t, dtype=np.float64)
        t = np.atleast_1d(t_in)
        idx = np.searchsorted(self.ts, t, side="right") - 1
        out = np.empty(t.shape, dtype=np.float64)

        below = idx < 0
        above = idx >= self.ts.size - 1
        inner = ~(below | above)
        out[below] = self.total
        out[above] = self.ms[-1]

        i = idx[inner]
        t0, t1 = self.ts[i], self.ts[i + 1]
        m0, m1 = self.ms[i], self.ms[i + 1]
        width = t1 - t0
        # ширина нулевая только у вертикальных отрезков, а туда searchsorted(right) не попадает
        out[inner] = m0 + (m1 - m0) * (t[inner] - t0) / np.where(width > 0.0, width, 1.0)
        return out.reshape(t_in.shape)


def require_nonnegative(u: PiecewiseLinear) -> None:
    if float(np.min(u.ys)) < 0.0:
        i = int(np.argmin(u.ys))
        raise NegativeFunctionError(
            f"Функция отрицательна в узле x={u.xs[i]!r}: u={u.ys[i]!r}; требуется u >= 0")


def require_canonical_domain(u: PiecewiseLinear) -> None:
    if not u.on_canonical_domain:
        raise ValueError(f"Ожидалась функция на [-1, 1], получен отрезок [{u.lo}, {u.hi}]")


def pl_metrics(u: PiecewiseLinear) -> PLMetrics:
    dx = np.diff(u.xs)
    dy = np.diff(u.ys)
    return PLMetrics(
        integral=float(np.sum(0.5 * (u.ys[:-1] + u.ys[1:]) * dx)),
        total_variation=float(np.sum(np.abs(dy))),
        min=float(np.min(u.ys)),
        max=float(np.max(u.ys)),
        max_slope=float(np.max(np.abs(dy / dx))),
    )


def functions_close(u: PiecewiseLinear, w: PiecewiseLinear, tol: float = 1e-12) -> bool:
    """Совпадение двух функций на объединении их узлов (с точностью tol)."""
    if abs(u.lo - w.lo) > tol or abs(u.hi - w.hi) > tol:
        return False
    xs = np.union1d(u.xs, w.xs)
    xs = xs[(xs >= max(u.lo, w.lo)) & (xs <= min(u.hi, w.hi))]
    return bool(np.all(np.abs(u(xs) - w(xs)) <= tol))


def l1_distance(u: PiecewiseLinear, w: PiecewiseLinear) -> float:
    """Точная норма ||u - w|| в L1 на общем отрезке."""
    xs = np.union1d(u.xs, w.xs)
    xs = xs[(xs >= max(u.lo, w.lo)) & (xs <= min(u.hi, w.hi))]
    d = u(xs) - w(xs)
    return _abs_integral(xs, d)


def derivative_l1_distance(u: PiecewiseLinear, w: PiecewiseLinear) -> float:
    """Точная норма ||u' - w'|| в L1: производные кусочно-постоянны на общем разбиении."""
    xs = np.union1d(u.xs, w.xs)
    xs = xs[(xs >= max(u.lo, w.lo)) & (xs <= min(u.hi, w.hi))]
    mid = 0.5 * (xs[:-1] + xs[1:])
    du = _slope_at(u, mid)
    dw = _slope_at(w, mid)
    return float(np.sum(np.abs(du - dw) * np.diff(xs)))


def _slope_at(u: PiecewiseLinear, points: np.ndarray) -> np.ndarray:
    idx = np.clip(np.searchsorted(u.xs, points, side="right") - 1, 0, u.xs.size - 2)
    return u.slopes[idx]


def _abs_integral(xs: np.ndarray, d: np.ndarray) -> float:
    """∫|d| для кусочно-линейной d с учётом смены знака внутри отрезка."""
    d0, d1 = d[:-1], d[1:]
    dx = np.diff(xs)
    same = d0 * d1 >= 0.0
    out = np.where(same, 0.5 * np.abs(d0 + d1) * dx, 0.0)
    cross = ~same
    if np.any(cross):
        a, b, w = np.abs(d0[cross]), np.abs(d1[cross]), dx[cross]
        out[cross] = 0.5 * (a * a + b * b) / (a + b) * w
    return float(np.sum(out))
