from typing import Any, Dict, Tuple

import numpy as np

from src.errors import ExprSyntaxError, NegativeFunctionError, UnboundVariable
from src.exprlang.evaluator import eval_expr
from src.exprlang.expr_nodes import free_variables
from src.exprlang.parser import parse_expr
from src.functional.base_integrand import IIntegrand
from src.functional.builder_integrand import IntegrandFactory
from src.plcore.piecewise import CANONICAL_DOMAIN, PiecewiseLinear
from src.weightlab.base_weight import IWeight
from src.weightlab.builder_weight import WeightFactory

PL_PREFIX = "pl:"
EXPR_PREFIX = "expr:"


def _parse_pl_literal(text: str) -> PiecewiseLinear:
    """`pl:x0:y0,x1:y1,...`: x строго возрастают, x0 = -1, x_last = 1."""
    body = text[len(PL_PREFIX):]
    offset = len(PL_PREFIX)
    xs, ys = [], []
    for chunk in body.split(","):
        parts = chunk.split(":")
        if len(parts) != 2:
            raise ExprSyntaxError(f"Ожидалась пара x:y, получено {chunk!r}", offset)
        try:
            x, y = float(parts[0]), float(parts[1])
        except ValueError:
            raise ExprSyntaxError(f"Пара {chunk!r} не состоит из двух чисел", offset) from None
        if not (np.isfinite(x) and np.isfinite(y)):
            raise ExprSyntaxError(f"Пара {chunk!r} содержит не конечное число", offset)
        if xs and x <= xs[-1]:
            raise ExprSyntaxError(f"Абсциссы должны строго возрастать: {x!r} после {xs[-1]!r}", offset)
        xs.append(x)
        ys.append(y)
        offset += len(chunk.encode("utf-8")) + 1

    if len(xs) < 2:
        raise ExprSyntaxError("Нужно хотя бы две точки", len(text))
    if (xs[0], xs[-1]) != CANONICAL_DOMAIN:
        raise ExprSyntaxError(f"Функция должна быть задана на [-1, 1], получено [{xs[0]}, {xs[-1]}]", len(PL_PREFIX))
    return PiecewiseLinear(np.array(xs), np.array(ys))


def _sample_expr(text: str, samples: int) -> PiecewiseLinear:
    expr = parse_expr(text)
    extra = free_variables(expr) - {"x"}
    if extra:
        raise UnboundVariable(f"Функция может зависеть только от x, найдено: {sorted(extra)}")
    u = PiecewiseLinear.from_function(lambda x: eval_expr(expr, {"x": x}), samples)
    if float(np.min(u.ys)) < 0.0:
        i = int(np.argmin(u.ys))
        raise NegativeFunctionError(f"Функция {text!r} отрицательна в x={u.xs[i]!r}: {u.ys[i]!r}")
    return u


def init_function(text: str, cfg: Dict[str, Any]) -> PiecewiseLinear:
    """Функция u из строки `pl:...` или `expr:...` (выборка по RR_U_SAMPLES узлам)."""
    text = text.strip()
    if text.startswith(PL_PREFIX):
        return _parse_pl_literal(text)
    if text.startswith(EXPR_PREFIX):
        return _sample_expr(text[len(EXPR_PREFIX):], cfg['RR_U_SAMPLES'])
    raise ExprSyntaxError(f"Функция задаётся как `pl:x0:y0,...` или `expr:<выражение от x>`, получено {text!r}", 0)


def parse_range(text: str) -> Tuple[float, float]:
    """`lo:hi` -> (lo, hi)."""
    parts = text.split(":")
    if len(parts) != 2:
        raise ExprSyntaxError(f"Ожидался интервал lo:hi, получено {text!r}", 0)
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise ExprSyntaxError(f"Интервал {text!r} не состоит из двух чисел", 0) from None
    if lo > hi:
        raise ValueError(f"Пустой интервал {text!r}")
    return lo, hi


def init_weight(text: str, v_range: Tuple[float, float] = (0.0, 1.0)) -> IWeight:
    return WeightFactory.from_text(text, v_range)


def init_integrand(text: str) -> IIntegrand:
    return IntegrandFactory.from_text(text)
