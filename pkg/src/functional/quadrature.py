import logging
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from src.errors import NonConvergent

logger = logging.getLogger(__name__)

QUAD_TOL = 1e-10
MAX_DEPTH = 40

# Узлы и веса пары Гаусса-Кронрода 7/15 (таблицы QUADPACK); узлы G7 - нечётные узлы K15.
_XK_POS = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK_POS = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG_POS = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_XK15 = np.concatenate((-_XK_POS[:-1], _XK_POS[::-1]))
_WK15 = np.concatenate((_WK_POS[:-1], _WK_POS[::-1]))
_WG7 = np.zeros(15)
_WG7[1:7:2] = _WG_POS[:3]
_WG7[7] = _WG_POS[3]
_WG7[8:] = _WG7[:7][::-1]


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    intervals: int


def _gauss_kronrod(fn: Callable[[np.ndarray], np.ndarray], mid: np.ndarray,
                   half: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """K15 и вложенная G7 по одному набору из 15 значений на отрезок."""
    pts = mid[:, None] + half[:, None] * _XK15[None, :]
    vals = np.asarray(fn(pts.ravel()), dtype=np.float64).reshape(pts.shape)
    return half * (vals @ _WK15), half * (vals @ _WG7)


def integrate(fn: Callable[[np.ndarray], np.ndarray], breakpoints: np.ndarray,
              tol: float = QUAD_TOL, max_depth: int = MAX_DEPTH) -> QuadResult:
    """Адаптивная квадратура Гаусса-Кронрода 7/15 по отрезкам между breakpoints.

    Все ещё не принятые отрезки обрабатываются одним векторным вызовом fn.
    Оценка ошибки отрезка - |K15 - G7|; отрезок принимается, если она не
    больше max(tol * длина / 2, tol * |K15|), иначе делится пополам.
    Итог суммируется в порядке возрастания левых концов.

    Args:
        fn: Векторизованная подынтегральная функция одной переменной.
        breakpoints: Возрастающие точки разбиения (включая концы).
        tol: Допуск.
        max_depth: Предельная глубина деления отрезка.

    Raises:
        NonConvergent: Если отрезок пришлось делить глубже max_depth.
    """
    if not tol > 0.0:
        raise ValueError(f"Допуск должен быть положительным, получено {tol}")
    breakpoints = np.asarray(breakpoints, dtype=np.float64)
    lo = breakpoints[:-1]
    hi = breakpoints[1:]
    keep = hi > lo
    lo, hi = lo[keep], hi[keep]
    depth = np.zeros(lo.size, dtype=np.int64)

    done_lo, done_val, done_err = [], [], []
    rounds = 0
    while lo.size:
        rounds += 1
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        k15, g7 = _gauss_kronrod(fn, mid, half)
        err = np.abs(k15 - g7)
        if not (np.all(np.isfinite(k15)) and np.all(np.isfinite(err))):
            bad = int(np.flatnonzero(~np.isfinite(k15) | ~np.isfinite(err))[0])
            raise NonConvergent(f"Подынтегральная функция не конечна на [{lo[bad]!r}, {hi[bad]!r}]")

        accept = err <= np.maximum(tol * half, tol * np.abs(k15))
        done_lo.append(lo[accept])
        done_val.append(k15[accept])
        done_err.append(err[accept])

        rest = ~accept
        if np.any(depth[rest] >= max_depth):
            bad = int(np.flatnonzero(rest & (depth >= max_depth))[0])
            raise NonConvergent(
                f"Адаптивное деление превысило глубину {max_depth} на [{lo[bad]!r}, {hi[bad]!r}], "
                f"оценка ошибки {err[bad]:.3e}")

        lo, mid, hi, depth = lo[rest], mid[rest], hi[rest], depth[rest] + 1
        lo, hi = np.concatenate((lo, mid)), np.concatenate((mid, hi))
        depth = np.concatenate((depth, depth))

    starts = np.concatenate(done_lo) if done_lo else np.empty(0)
    order = np.argsort(starts, kind="stable")
    values = np.concatenate(done_val)[order] if done_val else np.empty(0)
    errors = np.concatenate(done_err)[order] if done_err else np.empty(0)
    logger.debug(f"quadrature: {starts.size} intervals accepted in {rounds} rounds")
    return QuadResult(float(np.sum(values)), float(np.sum(errors)), int(starts.size))
