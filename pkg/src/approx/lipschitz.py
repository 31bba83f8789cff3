import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Sequence, Union

import numpy as np

from src.errors import ThresholdTooSmall
from src.functional.base_integrand import IIntegrand
from src.functional.functional import evaluate_functional
from src.functional.quadrature import QUAD_TOL
from src.helpers import DEDUP_TOL, uniform_nodes
from src.plcore.piecewise import (
    PiecewiseLinear,
    derivative_l1_distance,
    l1_distance,
    pl_metrics,
    require_canonical_domain,
)
from src.weightlab.base_weight import IWeight

logger = logging.getLogger(__name__)

MONOTONICITY_X_NODES = 65
MONOTONICITY_V_SAMPLES = 17


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"
    BOTH = "both"


@dataclass(frozen=True, eq=False)
class ApproxStage:
    """Одна ступень построения при пороге h.

    intervals - отрезки [a_k, b_k] покрытия A_h (в исходных координатах),
    alphas = b_k - a_k, betas = u(b_k) - u(a_k). Для side=left функция phi_h
    задана в отражённой переменной -x; для side=both она склеена нечётно в 0.
    p1, p2, p3 - слагаемые оценки ||u_h' - u'||_1: вне phi_h(A_h),
    |u_h'| и |u'| на phi_h(A_h).
    """
    h: float
    side: str
    intervals: np.ndarray
    alphas: np.ndarray
    betas: np.ndarray
    v_h: PiecewiseLinear
    phi_h: PiecewiseLinear
    u_h: PiecewiseLinear
    p1: float
    p2: float
    p3: float

    @property
    def measure(self) -> float:
        return float(np.sum(self.alphas))

    @property
    def beta_sum(self) -> float:
        return float(np.sum(np.abs(self.betas)))

    @property
    def image_measure(self) -> float:
        """|phi_h(A_h)| = sum_k max(|beta_k|, alpha_k)."""
        return float(np.sum(np.maximum(np.abs(self.betas), self.alphas)))

    def to_dict(self) -> dict:
        return {
            'h': self.h,
            'side': self.side,
            'intervals': self.intervals.tolist(),
            'measure': self.measure,
            'beta_sum': self.beta_sum,
            'image_measure': self.image_measure,
            'p1': self.p1,
            'p2': self.p2,
            'p3': self.p3,
            'u_h': self.u_h.to_literal(),
        }


@dataclass(frozen=True, eq=False)
class _UnitStage:
    intervals: np.ndarray
    alphas: np.ndarray
    betas: np.ndarray
    v_h: PiecewiseLinear
    phi_h: PiecewiseLinear
    u_h: PiecewiseLinear
    p1: float
    p2: float
    p3: float


def _steep_runs(w: PiecewiseLinear, h: float) -> np.ndarray:
    """Максимальные серии подряд идущих отрезков с |u'| > h: пары индексов узлов."""
    steep = np.abs(w.slopes) > h
    edges = np.diff(np.concatenate(([0], steep.astype(np.int8), [0])))
    starts = np.flatnonzero(edges == 1)
    stops = np.flatnonzero(edges == -1)
    return np.stack((starts, stops), axis=1) if starts.size else np.empty((0, 2), dtype=np.int64)


def _approximate_unit(w: PiecewiseLinear, h: float) -> _UnitStage:
    """Построение на [0, 1] с закреплением phi_h(0) = 0."""
    runs = _steep_runs(w, h)
    if runs.shape[0] == 1 and runs[0, 0] == 0 and runs[0, 1] == w.xs.size - 1:
        raise ThresholdTooSmall(f"Порог h={h!r} меньше наклона u на всём отрезке [{w.lo}, {w.hi}]")

    keep = np.ones(w.xs.size, dtype=bool)
    for start, stop in runs.tolist():
        keep[start + 1:stop] = False
    xs = w.xs[keep]
    ys = w.ys[keep]
    v_h = PiecewiseLinear(xs, ys)

    intervals = np.array([[w.xs[a], w.xs[b]] for a, b in runs.tolist()]).reshape(-1, 2)
    alphas = intervals[:, 1] - intervals[:, 0]
    betas = np.array([w.ys[b] - w.ys[a] for a, b in runs.tolist()])

    dx = np.diff(xs)
    stretch = np.ones(dx.size)
    run_starts = {float(a): (alpha, beta) for (a, _), alpha, beta in zip(intervals.tolist(), alphas, betas)}
    for i, x in enumerate(xs[:-1].tolist()):
        if x in run_starts:
            alpha, beta = run_starts[x]
            stretch[i] = max(abs(beta) / alpha, 1.0)
    phi_vals = np.concatenate(([0.0], np.cumsum(stretch * dx)))
    phi_h = PiecewiseLinear(xs, phi_vals)

    # u_h = v_h(phi_h^{-1}) на [0, 1]; то, что phi_h унесла за 1, отбрасывается
    inside = phi_vals < 1.0 - DEDUP_TOL
    end_value = float(np.interp(1.0, phi_vals, ys))
    u_h = PiecewiseLinear(np.concatenate((phi_vals[inside], [1.0])), np.concatenate((ys[inside], [end_value])))

    images = np.array([[phi_h(a), phi_h(b)] for a, b in intervals.tolist()]).reshape(-1, 2)
    p1, p2, p3 = _error_split(w, u_h, images)
    return _UnitStage(intervals, alphas, betas, v_h, phi_h, u_h, p1, p2, p3)


def _slopes_at(f: PiecewiseLinear, points: np.ndarray) -> np.ndarray:
    idx = np.clip(np.searchsorted(f.xs, points, side="right") - 1, 0, f.xs.size - 2)
    return f.slopes[idx]


def _error_split(w: PiecewiseLinear, u_h: PiecewiseLinear, images: np.ndarray):
    """Точные интегралы по общему разбиению [0, 1]: производные кусочно-постоянны."""
    cuts = [w.xs, u_h.xs, np.clip(images.ravel(), 0.0, 1.0)]
    xs = np.unique(np.concatenate(cuts))
    xs = xs[(xs >= 0.0) & (xs <= 1.0)]
    mid = 0.5 * (xs[:-1] + xs[1:])
    dx = np.diff(xs)
    in_image = np.zeros(mid.size, dtype=bool)
    for lo, hi in images.tolist():
        in_image |= (mid > lo) & (mid < hi)

    du_h = _slopes_at(u_h, mid)
    du = _slopes_at(w, mid)
    p1 = float(np.sum((np.abs(du_h - du) * dx)[~in_image]))
    p2 = float(np.sum((np.abs(du_h) * dx)[in_image]))
    p3 = float(np.sum((np.abs(du) * dx)[in_image]))
    return p1, p2, p3


def _reflect_intervals(intervals: np.ndarray) -> np.ndarray:
    return np.stack((-intervals[:, 1], -intervals[:, 0]), axis=1)[::-1].reshape(-1, 2)


def _glue(left: PiecewiseLinear, right: PiecewiseLinear) -> PiecewiseLinear:
    return PiecewiseLinear(np.concatenate((left.xs, right.xs[1:])), np.concatenate((left.ys, right.ys[1:])))


def lipschitz_approximate(u: PiecewiseLinear, h: float, side: Union[Side, str] = Side.RIGHT) -> ApproxStage:
    """Липшицево приближение u_h = v_h(phi_h^{-1}) при пороге наклона h.

    side=right работает на [0, 1] с закреплением в 0, side=left - на [-1, 0]
    через замену x -> -x, side=both склеивает обе половины в x = 0
    (u_h(0) = u(0) с обеих сторон).

    Raises:
        ThresholdTooSmall: Если весь рабочий отрезок круче h.
    """
    side = Side(side)
    if not h > 0.0:
        raise ValueError(f"Порог h должен быть положительным, получено {h}")
    require_canonical_domain(u)

    right = _approximate_unit(u.restrict(0.0, 1.0), h) if side is not Side.LEFT else None
    left = _approximate_unit(u.restrict(-1.0, 0.0).reflect(), h) if side is not Side.RIGHT else None

    if side is Side.RIGHT:
        stage = right
        return ApproxStage(h, side.value, stage.intervals, stage.alphas, stage.betas,
                           stage.v_h, stage.phi_h, stage.u_h, stage.p1, stage.p2, stage.p3)
    if side is Side.LEFT:
        stage = left
        return ApproxStage(h, side.value, _reflect_intervals(stage.intervals), stage.alphas[::-1],
                           -stage.betas[::-1], stage.v_h.reflect(), stage.phi_h, stage.u_h.reflect(),
                           stage.p1, stage.p2, stage.p3)

    phi = PiecewiseLinear(np.concatenate((-left.phi_h.xs[::-1], right.phi_h.xs[1:])),
                          np.concatenate((-left.phi_h.ys[::-1], right.phi_h.ys[1:])))
    return ApproxStage(
        h, side.value,
        np.concatenate((_reflect_intervals(left.intervals), right.intervals)).reshape(-1, 2),
        np.concatenate((left.alphas[::-1], right.alphas)),
        np.concatenate((-left.betas[::-1], right.betas)),
        _glue(left.v_h.reflect(), right.v_h),
        phi,
        _glue(left.u_h.reflect(), right.u_h),
        left.p1 + right.p1, left.p2 + right.p2, left.p3 + right.p3,
    )


@dataclass(frozen=True)
class ConvergenceRow:
    h: float
    l1: float
    derivative_l1: float
    functional: float
    functional_error: float
    relative_error: float
    measure: float
    beta_sum: float
    p1: float
    p2: float
    p3: float

    def to_dict(self) -> dict:
        return {
            'h': self.h,
            'l1': self.l1,
            'derivative_l1': self.derivative_l1,
            'functional': self.functional,
            'functional_error': self.functional_error,
            'relative_error': self.relative_error,
            'measure': self.measure,
            'beta_sum': self.beta_sum,
            'p1': self.p1,
            'p2': self.p2,
            'p3': self.p3,
        }


@dataclass(frozen=True)
class ConvergenceReport:
    side: str
    functional: float
    total_variation: float
    hypothesis_holds: bool
    rows: List[ConvergenceRow]

    def to_dict(self) -> dict:
        return {
            'side': self.side,
            'functional': self.functional,
            'total_variation': self.total_variation,
            'hypothesis_holds': self.hypothesis_holds,
            'rows': [r.to_dict() for r in self.rows],
        }


def weight_monotone_about_zero(a: IWeight, v_lo: float, v_hi: float,
                               nx: int = MONOTONICITY_X_NODES, nv: int = MONOTONICITY_V_SAMPLES,
                               tol: float = 1e-12) -> bool:
    """a(., v) не убывает на [-1, 0] и не возрастает на [0, 1] для v из [v_lo, v_hi]."""
    if nx % 2 == 0:
        nx += 1
    xs = uniform_nodes(nx - 1)
    vs = np.array([v_lo]) if v_lo == v_hi else np.linspace(v_lo, v_hi, nv)
    table = np.broadcast_to(np.asarray(a(xs[None, :], vs[:, None]), dtype=np.float64), (vs.size, xs.size))
    centre = nx // 2
    rising = np.diff(table[:, :centre + 1], axis=1)
    falling = np.diff(table[:, centre:], axis=1)
    return bool(np.all(rising >= -tol) and np.all(falling <= tol))


def convergence_report(F: IIntegrand, a: IWeight, u: PiecewiseLinear, ladder: Sequence[float],
                       side: Union[Side, str] = Side.BOTH, tol: float = QUAD_TOL) -> ConvergenceReport:
    """Таблица сходимости u_h -> u по лестнице порогов h."""
    side = Side(side)
    if side is Side.RIGHT:
        base = u.restrict(0.0, 1.0)
    elif side is Side.LEFT:
        base = u.restrict(-1.0, 0.0)
    else:
        base = u

    hypothesis = weight_monotone_about_zero(a, float(np.min(u.ys)), float(np.max(u.ys)))
    if not hypothesis:
        logger.warning("weight is not increasing on [-1, 0] and decreasing on [0, 1]; convergence not guaranteed")

    reference = evaluate_functional(F, a, base, tol).value
    rows = []
    for h in ladder:
        stage = lipschitz_approximate(u, float(h), side)
        value = evaluate_functional(F, a, stage.u_h, tol).value
        error = abs(value - reference)
        rows.append(ConvergenceRow(
            h=float(h),
            l1=l1_distance(stage.u_h, base),
            derivative_l1=derivative_l1_distance(stage.u_h, base),
            functional=value,
            functional_error=error,
            relative_error=error / abs(reference) if reference else (0.0 if error == 0.0 else float("inf")),
            measure=stage.measure,
            beta_sum=stage.beta_sum,
            p1=stage.p1,
            p2=stage.p2,
            p3=stage.p3,
        ))
        logger.info(f"approx h={h}: |A_h|={stage.measure:.3e} ||u_h' - u'||={rows[-1].derivative_l1:.3e}")

    return ConvergenceReport(
        side=side.value,
        functional=reference,
        total_variation=pl_metrics(base).total_variation,
        hypothesis_holds=hypothesis,
        rows=rows,
    )
