import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Union

import numpy as np

from src.errors import ConditionNotPreserved
from src.helpers import uniform_nodes
from src.weightlab.base_weight import IWeight
from src.weightlab.conditions import (
    CHECK_V_SAMPLES,
    CONDITION_TOL,
    check_admissible,
    require_nonnegative_weight,
    weight_table,
)
from src.weightlab.concrete_weights.combined_weight import CombinedWeight, CombineMode
from src.weightlab.concrete_weights.grid_weight import GridWeight

logger = logging.getLogger(__name__)

ZERO_SCAN_NODES = 4097
SOURCE_CHECK_REFINE = 8


def interpolate_weight(a: IWeight, k: int, nv: int = CHECK_V_SAMPLES, verify: bool = True,
                       tol: float = CONDITION_TOL) -> GridWeight:
    """Кусочно-линейная интерполяция a по x в узлах -1 + 2i/k.

    По v берутся строки сеточного веса, если они есть, иначе nv равномерных
    уровней на vRange. Неравенство a(s) + a(t) >= a(1 - t + s) при этом сохраняется:
    при verify результат проходит точную проверку по узлам. Узлы замкнуты
    относительно s, t -> 1 - t + s, так что нарушение у интерполянта есть
    нарушение у самого a.

    Raises:
        NegativeWeight: Если вес отрицателен в узле.
        ConditionNotPreserved: Если a проходит проверку, а интерполянт нет.
    """
    if k < 2 or k % 2:
        raise ValueError(f"k должно быть чётным и не меньше 2, получено {k}")
    lo, hi = a.v_range
    if a.v_nodes is not None:
        vs = np.asarray(a.v_nodes, dtype=np.float64)
    elif lo == hi:
        vs = np.array([lo])
    else:
        vs = np.linspace(lo, hi, nv)

    nodes = uniform_nodes(k)
    values = weight_table(a, nodes, vs)
    weight = GridWeight(values, vs, v_range=(lo, hi))
    if verify:
        _verify_interpolant(a, weight, k, vs.size, tol)
    return weight


def _verify_interpolant(a: IWeight, weight: GridWeight, k: int, nv: int, tol: float) -> None:
    report = check_admissible(weight, tol=tol)
    if report.cond_c:
        return
    witness = report.cond_c_violation.to_dict()
    # сетка исходной проверки содержит узлы -1 + 2i/k
    source = check_admissible(a, SOURCE_CHECK_REFINE * k + 1, nv, tol)
    if source.cond_c:
        raise ConditionNotPreserved(
            f"Интерполянт при k={k} нарушает неравенство на сумму, хотя исходный вес его выполняет", witness)
    logger.info(f"interpolant at k={k} inherits the sum condition violation of the source weight: {witness}")


def combine_weights(a1: IWeight, a2: IWeight, mode: Union[CombineMode, str]) -> CombinedWeight:
    """max(a1, a2) или a1 + a2; обе операции сохраняют a(s) + a(t) >= a(1 - t + s)."""
    require_nonnegative_weight(a1)
    require_nonnegative_weight(a2)
    return CombinedWeight(a1, a2, mode)


@dataclass(frozen=True)
class ChainBound:
    """Обе стороны оценки sum a(t_k) >= a(y) для упорядоченного набора t_k.

    point - точка первой части (1 - S при чётном n, -S при нечётном),
    mirrored_point - точка второй части для чётных весов (-1 + S и S),
    где S = sum_k (-1)^k t_k.
    """
    lhs: float
    rhs: float
    point: float
    holds: bool
    in_domain: bool
    mirrored_rhs: float
    mirrored_point: float
    mirrored_holds: bool

    def to_dict(self) -> dict:
        return {
            'lhs': self.lhs,
            'rhs': self.rhs,
            'point': self.point,
            'holds': self.holds,
            'in_domain': self.in_domain,
            'mirrored_rhs': self.mirrored_rhs,
            'mirrored_point': self.mirrored_point,
            'mirrored_holds': self.mirrored_holds,
        }


def chain_bound_check(a: IWeight, v: float, ts: Sequence[float], tol: float = 1e-12) -> ChainBound:
    """Оценка суммы весов в точках t_1 <= ... <= t_n через значение в знакочередующейся точке.

    Точка, вышедшая за [-1, 1], не считается ошибкой: вес вычисляется в
    ближайшем конце отрезка, а in_domain = False.
    """
    ts = np.asarray(ts, dtype=np.float64)
    if ts.size == 0:
        raise ValueError("Нужен хотя бы один узел t_k")
    if np.any(np.diff(ts) < 0.0):
        raise ValueError("Узлы t_k должны быть упорядочены по возрастанию")
    if ts[0] < -1.0 or ts[-1] > 1.0:
        raise ValueError(f"Узлы t_k должны лежать в [-1, 1], получено [{ts[0]}, {ts[-1]}]")

    signs = np.where(np.arange(1, ts.size + 1) % 2 == 0, 1.0, -1.0)
    s = float(np.sum(signs * ts))
    even = ts.size % 2 == 0
    point = 1.0 - s if even else -s
    mirrored = -1.0 + s if even else s
    in_domain = -1.0 - tol <= point <= 1.0 + tol

    lhs = float(np.sum(a(ts, v)))
    rhs = float(a(np.clip(point, -1.0, 1.0), v))
    mirrored_rhs = float(a(np.clip(mirrored, -1.0, 1.0), v))
    if not in_domain:
        logger.warning(f"alternating-sum point {point!r} is outside [-1, 1]; clipped")

    return ChainBound(
        lhs=lhs,
        rhs=rhs,
        point=point,
        holds=lhs >= rhs - tol,
        in_domain=in_domain,
        mirrored_rhs=mirrored_rhs,
        mirrored_point=mirrored,
        mirrored_holds=lhs >= mirrored_rhs - tol,
    )


@dataclass(frozen=True)
class ZeroSetReport:
    """Классификация нулей a(., v): all-zero | periodic | no-zeros | violates."""
    verdict: str
    zeros: List[float] = field(default_factory=list)
    x0: Optional[float] = None
    period: Optional[float] = None
    periodicity_deviation: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            'verdict': self.verdict,
            'zeros': list(self.zeros),
            'x0': self.x0,
            'period': self.period,
            'periodicity_deviation': self.periodicity_deviation,
        }


def zero_set_analysis(a: IWeight, v: float, tol: float = 1e-12, n: int = ZERO_SCAN_NODES) -> ZeroSetReport:
    """Нули a(., v) на равномерной сетке из n узлов.

    Если a(x0, v) = 0, то либо a = 0 на [x0, 1], либо нули на [x0, 1]
    периодичны и период делит 1 - x0; в частности 1 - нуль. Для
    периодического вердикта в отчёт попадает max |a(x + T) - a(x)|:
    чётный допустимый вес сам T-периодичен.
    """
    xs = uniform_nodes(n - 1)
    step = 2.0 / (n - 1)
    values = np.asarray(a(xs, v), dtype=np.float64)
    zero = values <= tol

    if not np.any(zero):
        return ZeroSetReport("no-zeros")
    if np.all(zero):
        return ZeroSetReport("all-zero", zeros=[-1.0, 1.0], x0=-1.0)

    # серии подряд идущих нулевых узлов сжимаются в точки
    edges = np.diff(np.concatenate(([0], zero.astype(np.int8), [0])))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1
    zeros = [0.5 * (xs[s] + xs[e]) for s, e in zip(starts, ends)]
    x0 = float(xs[starts[0]])

    if np.all(zero[starts[0]:]):
        return ZeroSetReport("all-zero", zeros=zeros, x0=x0)
    if not zero[-1]:
        return ZeroSetReport("violates", zeros=zeros, x0=x0)
    if len(zeros) == 1:
        return ZeroSetReport("periodic", zeros=zeros, x0=x0, period=0.0)

    gaps = np.diff(zeros)
    period = float(np.mean(gaps))
    slack = 2.0 * step
    ratio = (1.0 - x0) / period
    if np.max(np.abs(gaps - period)) > slack or abs(ratio - round(ratio)) * period > slack:
        return ZeroSetReport("violates", zeros=zeros, x0=x0)

    shift = int(round(period / step))
    deviation = float(np.max(np.abs(values[shift:] - values[:-shift]))) if 0 < shift < xs.size else 0.0
    return ZeroSetReport("periodic", zeros=zeros, x0=x0, period=period, periodicity_deviation=deviation)
