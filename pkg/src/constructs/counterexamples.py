"""Явные контрпримеры к неравенствам для перестановок.

Каждый конструктор сначала проверяет своё строгое условие на сетке
(101 точка по сдвигу x 33 по уровню) и при нарушении сообщает конкретную
точку-свидетеля, затем строит функцию u и интегрант F, для которых
I(a, u) - I(a, u_rearranged) < 0.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np

from src.errors import AlphaOutOfRange, DegenerateBound, InfeasibleSpec, PreconditionFailed
from src.functional.base_integrand import IIntegrand
from src.functional.concrete_integrands.builtin_integrands import PowerAlpha, QuadraticGamma
from src.plcore.piecewise import PiecewiseLinear, functions_close
from src.plcore.rearrangement import monotone_rearrange, symmetric_rearrange
from src.weightlab.base_weight import IWeight

logger = logging.getLogger(__name__)

SHIFT_POINTS = 101
LEVEL_POINTS = 33
BOUND_X_NODES = 513
BOUND_V_SAMPLES = 129


class CounterexampleKind(str, Enum):
    ASYMMETRY = "asymmetry"
    NONCONCAVITY = "nonconcavity"
    NONCONVEXITY = "nonconvexity"


@dataclass(frozen=True)
class CounterexampleSpec:
    """Параметры построения.

    Attributes:
        s, t: Абсциссы ступенек (-1 <= s <= t <= 1); для asymmetry не используются.
        eps: Ширина рампы.
        delta: Запас в строгом неравенстве.
        v_bar: Базовый уровень.
        A: Верхняя граница веса; если None, вычисляется по сетке.
        x_bar: Точка асимметрии (только для asymmetry).
    """
    kind: CounterexampleKind
    eps: float
    s: Optional[float] = None
    t: Optional[float] = None
    delta: float = 0.0
    v_bar: float = 0.0
    A: Optional[float] = None
    x_bar: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", CounterexampleKind(self.kind))
        if not self.eps > 0.0:
            raise InfeasibleSpec(f"Ширина рампы должна быть положительной, получено eps={self.eps}")
        if self.v_bar < 0.0:
            raise InfeasibleSpec(f"Базовый уровень должен быть неотрицательным, получено {self.v_bar}")
        if self.kind is CounterexampleKind.ASYMMETRY:
            if self.x_bar is None:
                raise InfeasibleSpec("Для asymmetry нужна точка x_bar")
            if not (-1.0 <= self.x_bar - self.eps and self.x_bar <= 1.0):
                raise InfeasibleSpec(f"Рампа [{self.x_bar - self.eps}, {self.x_bar}] не лежит в [-1, 1]")
            return
        if self.s is None or self.t is None:
            raise InfeasibleSpec("Нужны абсциссы s и t")
        if not -1.0 <= self.s <= self.t <= 1.0:
            raise InfeasibleSpec(f"Нужно -1 <= s <= t <= 1, получено s={self.s}, t={self.t}")
        if self.delta < 0.0:
            raise InfeasibleSpec(f"Запас delta должен быть неотрицательным, получено {self.delta}")
        if self.A is not None and not self.A > 0.0:
            raise DegenerateBound(f"Граница веса A должна быть положительной, получено {self.A}")

    def to_dict(self) -> dict:
        return {
            'kind': self.kind.value,
            's': self.s,
            't': self.t,
            'eps': self.eps,
            'delta': self.delta,
            'v_bar': self.v_bar,
            'A': self.A,
            'x_bar': self.x_bar,
        }


@dataclass(frozen=True)
class Counterexample:
    spec: CounterexampleSpec
    u: PiecewiseLinear
    u_rearranged: PiecewiseLinear
    F: IIntegrand
    A: Optional[float] = None
    alpha_max: Optional[float] = None
    gamma: Optional[float] = None
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def mode(self) -> str:
        return "symmetric" if self.spec.kind is CounterexampleKind.NONCONVEXITY else "monotone"

    def to_dict(self) -> dict:
        return {
            'spec': self.spec.to_dict(),
            'mode': self.mode,
            'u': self.u.to_literal(),
            'u_rearranged': self.u_rearranged.to_literal(),
            'F': self.F.to_text(),
            'A': self.A,
            'alpha_max': self.alpha_max,
            'gamma': self.gamma,
        }


def _distinct_points(points) -> PiecewiseLinear:
    """Точки с совпавшими абсциссами (вырожденные куски) склеиваются."""
    xs, ys = [], []
    for x, y in points:
        if xs and x <= xs[-1]:
            continue
        xs.append(float(x))
        ys.append(float(y))
    return PiecewiseLinear(np.array(xs), np.array(ys))


def weight_bound(a: IWeight, v_lo: float, v_hi: float, nx: int = BOUND_X_NODES,
                 nv: int = BOUND_V_SAMPLES) -> float:
    """Верхняя граница A веса на [-1, 1] x [v_lo, v_hi].

    Для сеточного веса максимум достигается в узлах, и он точный. Для
    остальных к максимуму по сетке прибавляется наибольший скачок между
    соседними узлами сетки.

    Raises:
        DegenerateBound: Если граница не положительна.
    """
    if v_lo > v_hi:
        raise ValueError(f"Некорректный интервал уровней [{v_lo}, {v_hi}]")
    if a.grid_exact:
        inner = a.v_nodes[(a.v_nodes > v_lo) & (a.v_nodes < v_hi)]
        vs = np.unique(np.concatenate(([v_lo, v_hi], inner)))
        table = np.asarray(a(a.x_nodes[None, :], vs[:, None]), dtype=np.float64)
        bound = float(np.max(table))
    else:
        xs = np.linspace(-1.0, 1.0, nx)
        vs = np.array([v_lo]) if v_lo == v_hi else np.linspace(v_lo, v_hi, nv)
        table = np.broadcast_to(np.asarray(a(xs[None, :], vs[:, None]), dtype=np.float64), (vs.size, xs.size))
        step = float(np.max(np.abs(np.diff(table, axis=1))))
        if vs.size > 1:
            step = max(step, float(np.max(np.abs(np.diff(table, axis=0)))))
        bound = float(np.max(table)) + step

    if not bound > 0.0:
        raise DegenerateBound(f"Граница веса A = {bound!r} не положительна")
    return bound


def _levels(v_bar: float, eps: float) -> np.ndarray:
    return np.linspace(v_bar, v_bar + eps, LEVEL_POINTS)


def build_asymmetry_counterexample(a: IWeight, x_bar: float, v_bar: float, eps: float) -> Counterexample:
    """Ступенька с убывающей рампой единичного наклона на [x_bar - eps, x_bar].

    Требуется a(x, v) < a(-x, v) при x в [x_bar - eps, x_bar], v в [v_bar, v_bar + eps].
    F = p; u* - зеркальное отражение u.

    Raises:
        PreconditionFailed: Первая точка (x, v), где строгое неравенство нарушено.
    """
    spec = CounterexampleSpec(kind=CounterexampleKind.ASYMMETRY, eps=eps, v_bar=v_bar, x_bar=x_bar)
    xs = np.linspace(x_bar - eps, x_bar, SHIFT_POINTS)
    vs = _levels(v_bar, eps)
    lhs = np.broadcast_to(np.asarray(a(xs[None, :], vs[:, None]), dtype=np.float64), (vs.size, xs.size))
    rhs = np.broadcast_to(np.asarray(a(-xs[None, :], vs[:, None]), dtype=np.float64), (vs.size, xs.size))
    failed = np.argwhere(~(lhs < rhs))
    if failed.size:
        r, c = failed[0]
        witness = {'x': float(xs[c]), 'v': float(vs[r]), 'lhs': float(lhs[r, c]), 'rhs': float(rhs[r, c])}
        raise PreconditionFailed(
            f"a(x, v) < a(-x, v) нарушено при x={xs[c]!r}, v={vs[r]!r}: {lhs[r, c]!r} >= {rhs[r, c]!r}", witness)

    u = _distinct_points([(-1.0, v_bar + eps), (x_bar - eps, v_bar + eps), (x_bar, v_bar), (1.0, v_bar)])
    return Counterexample(spec=spec, u=u, u_rearranged=monotone_rearrange(u), F=PowerAlpha(1.0))


def build_plateau_pair(spec: CounterexampleSpec) -> Dict[str, PiecewiseLinear]:
    """Функция с двумя рампами высоты eps вокруг площадки на [s + eps, t - eps]
    и её монотонная перестановка в замкнутом виде.

    Raises:
        InfeasibleSpec: Если s + eps > t - eps.
    """
    s, t, eps, v = spec.s, spec.t, spec.eps, spec.v_bar
    if s is None or t is None:
        raise InfeasibleSpec("Нужны абсциссы s и t")
    if s + eps > t - eps:
        raise InfeasibleSpec(f"Рампы не помещаются: s + eps = {s + eps} > t - eps = {t - eps}")

    u = _distinct_points([(-1.0, v), (s, v), (s + eps, v + eps), (t - eps, v + eps), (t, v), (1.0, v)])
    start = 1.0 - t + s
    u_star = _distinct_points([(-1.0, v), (start, v), (start + 2.0 * eps, v + eps), (1.0, v + eps)])

    computed = monotone_rearrange(u)
    if not functions_close(computed, u_star, tol=1e-9):
        raise RuntimeError(f"Перестановка {computed.to_literal()} не совпала с формулой {u_star.to_literal()}")
    return {'u': u, 'u_star': u_star}


def counterexample_alpha(A: float, delta: float) -> float:
    """alpha_max = 1 / log2(2A / (A + delta)).

    Raises:
        DegenerateBound: Если 2A <= A + delta.
    """
    if not A > 0.0:
        raise DegenerateBound(f"Граница веса A должна быть положительной, получено {A}")
    if not delta > 0.0:
        raise ValueError(f"Запас delta должен быть положительным, получено {delta}")
    if 2.0 * A <= A + delta:
        raise DegenerateBound(f"Граница не определена: 2A = {2.0 * A} <= A + delta = {A + delta}")
    return 1.0 / math.log2(2.0 * A / (A + delta))


def _check_shift_inequality(lhs_fn, rhs_fn, shifts: np.ndarray, vs: np.ndarray, name: str) -> None:
    lhs = lhs_fn(shifts[None, :], vs[:, None])
    rhs = rhs_fn(shifts[None, :], vs[:, None])
    lhs, rhs = np.broadcast_arrays(lhs, rhs)
    failed = np.argwhere(~(lhs < rhs))
    if failed.size:
        r, c = failed[0]
        witness = {name: float(shifts[c]), 'v': float(vs[r]), 'lhs': float(lhs[r, c]), 'rhs': float(rhs[r, c])}
        raise PreconditionFailed(
            f"Строгое неравенство нарушено при {name}={shifts[c]!r}, v={vs[r]!r}: {lhs[r, c]!r} >= {rhs[r, c]!r}",
            witness)


def build_nonconcavity_counterexample(a: IWeight, spec: CounterexampleSpec, alpha: float) -> Counterexample:
    """Контрпример к необходимости неравенства a(s) + a(t) >= a(1 - t + s), F = p^alpha.

    Требуется a(s + y, v) + a(t - y, v) + delta < a(1 - t + s + 2y, v)
    при y в [0, eps], v в [v_bar, v_bar + eps] и 1 < alpha < alpha_max(A, delta).

    Raises:
        AlphaOutOfRange: alpha <= 1 или alpha >= alpha_max.
        PreconditionFailed: Свидетель (y, v).
        InfeasibleSpec: Геометрия не допускает построения.
    """
    if not alpha > 1.0:
        raise AlphaOutOfRange(f"Нужно alpha > 1, получено {alpha}")
    pair = build_plateau_pair(spec)
    s, t, eps, delta = spec.s, spec.t, spec.eps, spec.delta

    ys = np.linspace(0.0, eps, SHIFT_POINTS)
    _check_shift_inequality(
        lambda y, v: a(s + y, v) + a(t - y, v) + delta,
        lambda y, v: a(1.0 - t + s + 2.0 * y, v),
        ys, _levels(spec.v_bar, eps), "y",
    )

    A = spec.A if spec.A is not None else weight_bound(a, spec.v_bar, spec.v_bar + eps)
    alpha_max = counterexample_alpha(A, delta)
    if alpha >= alpha_max:
        raise AlphaOutOfRange(f"Нужно alpha < alpha_max = {alpha_max!r} (A = {A!r}), получено {alpha}")

    logger.debug(f"nonconcavity counterexample: A={A!r} alpha_max={alpha_max!r}")
    return Counterexample(spec=spec, u=pair['u'], u_rearranged=pair['u_star'], F=PowerAlpha(alpha),
                          A=A, alpha_max=alpha_max)


def build_symmetric_counterexample(a: IWeight, spec: CounterexampleSpec) -> Counterexample:
    """Контрпример для симметризации, F = p + gamma p^2, gamma = (delta/eps) / (A/eps)^2.

    Требуется a(s + z) + a(t - z) + 2 delta < a((s - t)/2 + z) + a((t - s)/2 - z)
    при z в [0, eps], v в [0, eps]; 2 eps < t - s; v_bar = 0.

    Raises:
        InfeasibleSpec: 2 eps >= t - s или v_bar != 0.
        PreconditionFailed: Свидетель (z, v).
    """
    s, t, eps, delta = spec.s, spec.t, spec.eps, spec.delta
    if not 2.0 * eps < t - s:
        raise InfeasibleSpec(f"Нужно 2 eps < t - s, получено eps={eps}, t - s={t - s}")
    if spec.v_bar != 0.0:
        raise InfeasibleSpec(f"Для симметризации нужен нулевой след: v_bar = 0, получено {spec.v_bar}")

    zs = np.linspace(0.0, eps, SHIFT_POINTS)
    _check_shift_inequality(
        lambda z, v: a(s + z, v) + a(t - z, v) + 2.0 * delta,
        lambda z, v: a(0.5 * (s - t) + z, v) + a(0.5 * (t - s) - z, v),
        zs, _levels(0.0, eps), "z",
    )

    pair = build_plateau_pair(spec)
    A = spec.A if spec.A is not None else weight_bound(a, 0.0, eps)
    gamma = (delta / eps) / (A / eps) ** 2
    u = pair['u']
    return Counterexample(spec=spec, u=u, u_rearranged=symmetric_rearrange(u), F=QuadraticGamma(gamma),
                          A=A, gamma=gamma)
