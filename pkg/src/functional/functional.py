import logging
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from src.errors import NegativeWeight
from src.functional.base_integrand import IIntegrand
from src.functional.quadrature import MAX_DEPTH, QUAD_TOL, integrate
from src.plcore.level_sets import find_window, rearranged_preimage
from src.plcore.piecewise import PiecewiseLinear, require_nonnegative
from src.plcore.rearrangement import RearrangementMode, rearrange_by_mode
from src.weightlab.base_weight import IWeight
from src.weightlab.conditions import (
    CHECK_V_SAMPLES,
    CHECK_X_NODES,
    CONDITION_TOL,
    ConditionReport,
    check_admissible,
    check_symmetric_condition,
)

logger = logging.getLogger(__name__)

GAP_SLACK = 1e-9
PINNED_TOL = 1e-12
CERT_P_POINTS = 64
CERT_V_POINTS = 16
CERT_TOL = -1e-9
CERT_SEGMENT_POINTS = 17


@dataclass(frozen=True)
class FunctionalValue:
    """I(a, u) и её разложение.

    baseline = int F(u(x), 0) dx, normalized = value - baseline
    (значение при нормировке F(., 0) = 0).
    """
    value: float
    err_estimate: float
    baseline: float
    normalized: float

    def to_dict(self) -> dict:
        return {
            'value': self.value,
            'err_estimate': self.err_estimate,
            'baseline': self.baseline,
            'normalized': self.normalized,
        }


def _breakpoints(a: IWeight, u: PiecewiseLinear) -> np.ndarray:
    extra = [np.array([0.0])]
    if a.x_nodes is not None:
        extra.append(np.asarray(a.x_nodes, dtype=np.float64))
    pts = np.concatenate([u.xs] + extra)
    return np.unique(pts[(pts >= u.lo) & (pts <= u.hi)])


def evaluate_functional(F: IIntegrand, a: IWeight, u: PiecewiseLinear, tol: float = QUAD_TOL,
                        max_depth: int = MAX_DEPTH) -> FunctionalValue:
    """I(a, u) = int F(u(x), a(x, u(x)) |u'(x)|) dx.

    Интегрирование идёт по отрезкам линейности u, дополнительно разбитым
    в x = 0 и в узлах веса. На площадках подынтегральное выражение равно
    F(u(x), 0) и учитывается.

    Raises:
        NegativeFunctionError: Если u < 0.
        NegativeWeight: Если a < 0 в узле квадратуры.
        NonConvergent: Если квадратура не сошлась.
    """
    require_nonnegative(u)
    if not tol > 0.0:
        raise ValueError(f"Допуск должен быть положительным, получено {tol}")
    slopes = np.abs(u.slopes)
    last = u.xs.size - 2

    def integrand(x: np.ndarray) -> np.ndarray:
        idx = np.clip(np.searchsorted(u.xs, x, side="right") - 1, 0, last)
        v = u(x)
        w = np.broadcast_to(np.asarray(a(x, v), dtype=np.float64), x.shape)
        if np.any(w < 0.0):
            i = int(np.argmax(w < 0.0))
            raise NegativeWeight(f"Вес отрицателен в точке x={float(x[i])!r}, v={float(v[i])!r}: {float(w[i])!r}")
        return F(v, w * slopes[idx])

    breakpoints = _breakpoints(a, u)
    main = integrate(integrand, breakpoints, tol, max_depth)

    if F.vanishes_at_zero:
        baseline, base_err = 0.0, 0.0
    else:
        base = integrate(lambda x: F(u(x), np.zeros_like(x)), breakpoints, tol, max_depth)
        baseline, base_err = base.value, base.error

    logger.debug(f"I(a, u) = {main.value!r} +- {main.error:.2e} over {main.intervals} intervals")
    return FunctionalValue(main.value, main.error + base_err, baseline, main.value - baseline)


@dataclass(frozen=True)
class IntegrandCertificate:
    """Выборочная проверка выпуклости, монотонности и неотрицательности F по p."""
    convex: bool
    monotone: bool
    nonnegative: bool
    worst_second_difference: float
    worst_first_difference: float

    @property
    def certified(self) -> bool:
        return self.convex and self.monotone and self.nonnegative

    def to_dict(self) -> dict:
        return {
            'certified': self.certified,
            'convex': self.convex,
            'monotone': self.monotone,
            'nonnegative': self.nonnegative,
            'worst_second_difference': self.worst_second_difference,
            'worst_first_difference': self.worst_first_difference,
        }


def certify_integrand(F: IIntegrand, v_range: Tuple[float, float], p_max: float = 1.0,
                      n_p: int = CERT_P_POINTS, n_v: int = CERT_V_POINTS,
                      tol: float = CERT_TOL) -> IntegrandCertificate:
    """Вторые и первые разности F(v, .) на сетке n_p x n_v; порог tol."""
    ps = np.linspace(0.0, max(p_max, 1.0), n_p)
    lo, hi = v_range
    vs = np.array([lo]) if lo == hi else np.linspace(lo, hi, n_v)
    table = np.asarray(F(vs[:, None], ps[None, :]), dtype=np.float64)
    first = np.diff(table, axis=1)
    second = np.diff(table, n=2, axis=1)
    worst_second = float(np.min(second))
    worst_first = float(np.min(first))
    return IntegrandCertificate(
        convex=worst_second >= tol,
        monotone=worst_first >= tol,
        nonnegative=bool(np.min(table) >= 0.0),
        worst_second_difference=worst_second,
        worst_first_difference=worst_first,
    )


def slope_bound(a: IWeight, u: PiecewiseLinear, per_segment: int = CERT_SEGMENT_POINTS) -> float:
    """Выборочная оценка max a(x, u(x)) |u'(x)| по точкам внутри каждого отрезка u.

    Узлы веса внутри отрезка добавляются к выборке.
    """
    t = np.linspace(0.0, 1.0, per_segment)
    xs = (u.xs[:-1, None] + (u.xs[1:] - u.xs[:-1])[:, None] * t[None, :]).ravel()
    slopes = np.repeat(np.abs(u.slopes), per_segment)
    if a.x_nodes is not None:
        nodes = np.asarray(a.x_nodes, dtype=np.float64)
        nodes = nodes[(nodes >= u.lo) & (nodes <= u.hi)]
        idx = np.clip(np.searchsorted(u.xs, nodes, side="right") - 1, 0, u.xs.size - 2)
        xs = np.concatenate((xs, nodes))
        slopes = np.concatenate((slopes, np.abs(u.slopes)[idx]))
    w = np.asarray(a(xs, u(xs)), dtype=np.float64)
    return float(np.max(w * slopes))


@dataclass(frozen=True)
class VerifyReport:
    """Обе стороны неравенства I(a, u_rearranged) <= I(a, u)."""
    I_u: float
    I_rearranged: float
    gap: float
    quad_err: float
    mode: str
    conditions: Optional[ConditionReport]
    certificate: IntegrandCertificate
    pinned: bool
    baseline_u: float
    baseline_rearranged: float

    @property
    def normalized_gap(self) -> float:
        return (self.I_u - self.baseline_u) - (self.I_rearranged - self.baseline_rearranged)

    @property
    def holds(self) -> bool:
        return self.gap >= -(self.quad_err + GAP_SLACK)

    @property
    def guaranteed(self) -> bool:
        """Неравенство гарантировано условиями на вес и сертификатом F."""
        if self.conditions is None or not self.certificate.certified:
            return False
        if self.mode == RearrangementMode.SYMMETRIC.value:
            return self.conditions.symmetric_admissible
        if self.pinned:
            return self.conditions.pinned_admissible
        return self.conditions.admissible

    def to_dict(self) -> dict:
        return {
            'mode': self.mode,
            'I_u': self.I_u,
            'I_rearranged': self.I_rearranged,
            'gap': self.gap,
            'quad_err': self.quad_err,
            'normalized_gap': self.normalized_gap,
            'baseline_u': self.baseline_u,
            'baseline_rearranged': self.baseline_rearranged,
            'pinned': self.pinned,
            'holds': self.holds,
            'guaranteed': self.guaranteed,
            'certificate': self.certificate.to_dict(),
            'conditions': self.conditions.to_dict() if self.conditions is not None else None,
        }


def verify_rearrangement(F: IIntegrand, a: IWeight, u: PiecewiseLinear,
                         mode: Union[RearrangementMode, str] = RearrangementMode.MONOTONE,
                         tol: float = QUAD_TOL, check_conditions: bool = True,
                         nx: int = CHECK_X_NODES, nv: int = CHECK_V_SAMPLES,
                         condition_tol: float = CONDITION_TOL,
                         conditions: Optional[ConditionReport] = None) -> VerifyReport:
    """Считает I(a, u) и I(a, u*) (или I(a, u_bar)) и прикладывает вердикты по весу.

    Готовый отчёт по условиям можно передать через conditions, тогда
    повторная проверка не выполняется.
    """
    mode = RearrangementMode(mode)
    require_nonnegative(u)
    if mode is RearrangementMode.SYMMETRIC and abs(float(u.ys[0]) - float(u.ys[-1])) > PINNED_TOL:
        logger.warning(f"symmetric mode expects u(-1) == u(1), got {u.ys[0]!r} and {u.ys[-1]!r}")

    rearranged = rearrange_by_mode(mode, u)
    side_u = evaluate_functional(F, a, u, tol)
    side_r = evaluate_functional(F, a, rearranged, tol)

    if conditions is None and check_conditions:
        if mode is RearrangementMode.SYMMETRIC:
            conditions = check_symmetric_condition(a, nx, nv, condition_tol)
        else:
            conditions = check_admissible(a, nx, nv, condition_tol)

    p_max = slope_bound(a, u)
    certificate = certify_integrand(F, (float(np.min(u.ys)), float(np.max(u.ys))), p_max)
    if not certificate.certified:
        logger.warning("integrand failed the convexity/monotonicity certificate; inequality not guaranteed")

    report = VerifyReport(
        I_u=side_u.value,
        I_rearranged=side_r.value,
        gap=side_u.value - side_r.value,
        quad_err=side_u.err_estimate + side_r.err_estimate,
        mode=mode.value,
        conditions=conditions,
        certificate=certificate,
        pinned=abs(float(u.ys[0])) <= PINNED_TOL,
        baseline_u=side_u.baseline,
        baseline_rearranged=side_r.baseline,
    )
    logger.debug(f"verify {mode.value}: gap={report.gap!r} quad_err={report.quad_err:.2e}")
    return report


@dataclass(frozen=True)
class JensenLevel:
    """Сравнение на одном регулярном уровне v, b_k = 1/|u'(y_k)|:

    total = sum_k b_k F(v, a(y_k, v) / b_k),
    jensen_bound = F(v, sum_k a(y_k, v) / sum b_k) * sum b_k,
    rearranged_term = F(v, a(y*, v) / sum b_k) * sum b_k.
    """
    v: float
    total: float
    jensen_bound: float
    rearranged_term: float

    def holds(self, tol: float = 1e-12) -> bool:
        scale = max(1.0, abs(self.total))
        return (self.total >= self.jensen_bound - tol * scale
                and self.jensen_bound >= self.rearranged_term - tol * scale)

    def to_dict(self) -> dict:
        return {
            'v': self.v,
            'total': self.total,
            'jensen_bound': self.jensen_bound,
            'rearranged_term': self.rearranged_term,
            'holds': self.holds(),
        }


def jensen_level_check(F: IIntegrand, a: IWeight, u: PiecewiseLinear, v: float) -> JensenLevel:
    window = find_window(u, v)
    ys = window.preimages(v)
    b = np.abs(window.inverse_slopes)
    weights_at = np.asarray(a(ys, v), dtype=np.float64)
    b_sum = float(np.sum(b))
    y_star = rearranged_preimage(u, v)

    total = float(np.sum(b * np.asarray(F(v, weights_at / b), dtype=np.float64)))
    bound = float(F(v, float(np.sum(weights_at)) / b_sum)) * b_sum
    rearranged = float(F(v, float(a(y_star, v)) / b_sum)) * b_sum
    return JensenLevel(float(v), total, bound, rearranged)
