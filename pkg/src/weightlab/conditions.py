import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from src.errors import NegativeWeight
from src.helpers import uniform_nodes
from src.weightlab.base_weight import IWeight

logger = logging.getLogger(__name__)

CHECK_X_NODES = 257
CHECK_V_SAMPLES = 129
CONDITION_TOL = 1e-9

EXACT_NODE = "exact-node"
GRID_SAMPLED = "grid-sampled"


@dataclass(frozen=True)
class Violation:
    """Точка, в которой условие нарушено сильнее всего."""
    point: Dict[str, float]
    magnitude: float

    def to_dict(self) -> dict:
        return {**self.point, 'magnitude': self.magnitude}


@dataclass(frozen=True)
class ConditionReport:
    """Вердикты по условиям на вес.

    Поля условия, которое не проверялось, равны None. Для проверенного
    условия нарушение задано тогда и только тогда, когда вердикт ложен.
    """
    even: bool
    even_violation: Optional[Violation]
    method: str
    resolution: Tuple[int, int]
    cond_c: Optional[bool] = None
    cond_c_violation: Optional[Violation] = None
    cond_sym: Optional[bool] = None
    cond_sym_violation: Optional[Violation] = None
    convex: Optional[bool] = None
    convex_violation: Optional[Violation] = None
    characterizations_agree: Optional[bool] = None

    @property
    def admissible(self) -> bool:
        return bool(self.even and self.cond_c)

    @property
    def pinned_admissible(self) -> bool:
        """Для u(-1) = 0 достаточно одного неравенства на сумму, без чётности."""
        return bool(self.cond_c)

    @property
    def symmetric_admissible(self) -> bool:
        return bool(self.cond_sym)

    def to_dict(self) -> dict:
        def viol(v: Optional[Violation]):
            return v.to_dict() if v is not None else None

        out = {
            'method': self.method,
            'resolution': list(self.resolution),
            'even': self.even,
            'even_violation': viol(self.even_violation),
        }
        if self.cond_c is not None:
            out.update({
                'cond_c': self.cond_c,
                'cond_c_violation': viol(self.cond_c_violation),
                'admissible': self.admissible,
                'pinned_admissible': self.pinned_admissible,
            })
        if self.cond_sym is not None:
            out.update({
                'cond_sym': self.cond_sym,
                'cond_sym_violation': viol(self.cond_sym_violation),
                'convex': self.convex,
                'convex_violation': viol(self.convex_violation),
                'characterizations_agree': self.characterizations_agree,
            })
        return out


def check_grid(a: IWeight, nx: int = CHECK_X_NODES, nv: int = CHECK_V_SAMPLES) -> Tuple[np.ndarray, np.ndarray, str]:
    """Сетка проверки: узлы веса для точных сеточных весов, иначе равномерная выборка.

    Для сеточного веса условия линейны по значениям, а значения при
    фиксированном v - выпуклая комбинация соседних строк, поэтому
    достаточно строк v_nodes внутри vRange и двух концов vRange.
    """
    lo, hi = a.v_range
    if a.grid_exact:
        vs = a.v_nodes[(a.v_nodes > lo) & (a.v_nodes < hi)]
        vs = np.unique(np.concatenate(([lo, hi], vs)))
        return np.asarray(a.x_nodes, dtype=np.float64), vs, EXACT_NODE

    if nx < 3 or nv < 1:
        raise ValueError(f"Сетка проверки слишком мала: {nx} x {nv}")
    if nx % 2 == 0:
        # нечётное число узлов, чтобы x = 0 было узлом
        nx += 1
    vs = np.array([lo]) if lo == hi else np.linspace(lo, hi, nv)
    return uniform_nodes(nx - 1), vs, GRID_SAMPLED


def weight_table(a: IWeight, xs: np.ndarray, vs: np.ndarray) -> np.ndarray:
    """Значения a на сетке (строки - уровни v); отрицательные значения - ошибка."""
    table = np.asarray(a(xs[None, :], vs[:, None]), dtype=np.float64)
    table = np.broadcast_to(table, (vs.size, xs.size))
    if np.any(table < 0.0):
        r, c = np.argwhere(table < 0.0)[0]
        raise NegativeWeight(f"Вес отрицателен в точке x={xs[c]!r}, v={vs[r]!r}: {table[r, c]!r}")
    return table


def require_nonnegative_weight(a: IWeight, nx: int = 33, nv: int = 17) -> None:
    xs, vs, _ = check_grid(a, nx, nv)
    weight_table(a, xs, vs)


def _evenness(table: np.ndarray, xs: np.ndarray, vs: np.ndarray, tol: float) -> Optional[Violation]:
    diff = np.abs(table - table[:, ::-1])
    r, c = np.unravel_index(int(np.argmax(diff)), diff.shape)
    if diff[r, c] <= tol:
        return None
    return Violation({'x': float(xs[c]), 'v': float(vs[r])}, float(diff[r, c]))


def _worst(deficit: np.ndarray, tol: float, point) -> Optional[Violation]:
    """deficit > 0 означает нарушение; point(r, c) строит свидетеля."""
    r, c = np.unravel_index(int(np.argmax(deficit)), deficit.shape)
    if deficit[r, c] <= tol:
        return None
    return Violation(point(r, c), float(deficit[r, c]))


def _worst_by_rows(n_rows: int, block, tol: float, point, rows_per_block: int = 16) -> Optional[Violation]:
    """То же, что _worst, но дефицит считается блоками строк block(slice)."""
    best_value, best_at = -np.inf, (0, 0)
    for start in range(0, n_rows, rows_per_block):
        deficit = block(slice(start, min(start + rows_per_block, n_rows)))
        r, c = np.unravel_index(int(np.argmax(deficit)), deficit.shape)
        if deficit[r, c] > best_value:
            best_value, best_at = float(deficit[r, c]), (start + int(r), int(c))
    if best_value <= tol:
        return None
    return Violation(point(*best_at), best_value)


def check_admissible(a: IWeight, nx: int = CHECK_X_NODES, nv: int = CHECK_V_SAMPLES,
                     tol: float = CONDITION_TOL) -> ConditionReport:
    """Чётность и неравенство на сумму: a(s, v) + a(t, v) >= a(1 - t + s, v) при s <= t.

    На равномерной сетке -1 + 2i/k точка 1 - t + s для узлов s <= t снова узел
    (индекс k + i - j), так что проверка идёт только по значениям в узлах.
    Для сеточных весов это точная проверка, для остальных - выборочная.

    Raises:
        NegativeWeight: Если вес отрицателен в узле сетки.
    """
    xs, vs, method = check_grid(a, nx, nv)
    table = weight_table(a, xs, vs)
    k = xs.size - 1

    i, j = np.triu_indices(xs.size)
    cond_c = _worst_by_rows(
        vs.size,
        lambda rows: table[rows, k + i - j] - table[rows, i] - table[rows, j],
        tol,
        lambda r, c: {'s': float(xs[i[c]]), 't': float(xs[j[c]]), 'v': float(vs[r])},
    )
    even = _evenness(table, xs, vs, tol)

    report = ConditionReport(
        even=even is None,
        even_violation=even,
        method=method,
        resolution=(int(xs.size), int(vs.size)),
        cond_c=cond_c is None,
        cond_c_violation=cond_c,
    )
    logger.debug(f"check_admissible: even={report.even} cond_c={report.cond_c} ({method}, {xs.size}x{vs.size})")
    return report


def check_symmetric_condition(a: IWeight, nx: int = CHECK_X_NODES, nv: int = CHECK_V_SAMPLES,
                              tol: float = CONDITION_TOL) -> ConditionReport:
    """Симметричное условие: a(s) + a(t) >= a((s - t)/2) + a((t - s)/2).

    Дополнительно проверяется равносильная форма: чётность и выпуклость по x
    (вторые разности на сетке неотрицательны). Расхождение вердиктов
    попадает в отчёт и в лог.
    """
    xs, vs, method = check_grid(a, nx, nv)
    table = weight_table(a, xs, vs)

    i, j = np.triu_indices(xs.size)
    half = 0.5 * (xs[i] - xs[j])

    def block(rows):
        v = vs[rows, None]
        shape = (v.shape[0], half.size)
        left = np.broadcast_to(np.asarray(a(half[None, :], v), dtype=np.float64), shape)
        right = np.broadcast_to(np.asarray(a(-half[None, :], v), dtype=np.float64), shape)
        return left + right - table[rows, i] - table[rows, j]

    cond_sym = _worst_by_rows(
        vs.size, block, tol,
        lambda r, c: {'s': float(xs[i[c]]), 't': float(xs[j[c]]), 'v': float(vs[r])},
    )

    even = _evenness(table, xs, vs, tol)
    second = table[:, :-2] - 2.0 * table[:, 1:-1] + table[:, 2:]
    convex = _worst(-second, tol, lambda r, c: {'x': float(xs[c + 1]), 'v': float(vs[r])})

    sym_ok = cond_sym is None
    char_ok = even is None and convex is None
    if sym_ok != char_ok:
        logger.warning(f"symmetric condition verdict {sym_ok} disagrees with even+convex verdict {char_ok} "
                       f"at resolution {xs.size}x{vs.size}")

    return ConditionReport(
        even=even is None,
        even_violation=even,
        method=method,
        resolution=(int(xs.size), int(vs.size)),
        cond_sym=sym_ok,
        cond_sym_violation=cond_sym,
        convex=convex is None,
        convex_violation=convex,
        characterizations_agree=sym_ok == char_ok,
    )
