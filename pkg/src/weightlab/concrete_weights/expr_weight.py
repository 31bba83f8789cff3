from typing import Any, Dict, Tuple, Union

import numpy as np

from src.errors import UnboundVariable
from src.exprlang.evaluator import eval_expr
from src.exprlang.expr_nodes import Expr, free_variables, to_text
from src.exprlang.parser import parse_expr
from src.weightlab.base_weight import ArrayLike, IWeight

WEIGHT_VARIABLES = frozenset(("x", "v"))


class ExprWeight(IWeight):
    """Вес, заданный выражением от x и v."""

    def __init__(self, expr: Union[str, Expr], v_range: Tuple[float, float] = (0.0, 1.0)):
        self.text = expr if isinstance(expr, str) else to_text(expr)
        self.expr = parse_expr(expr) if isinstance(expr, str) else expr
        extra = free_variables(self.expr) - WEIGHT_VARIABLES
        if extra:
            raise UnboundVariable(f"Вес может зависеть только от x и v, найдено: {sorted(extra)}")
        lo, hi = float(v_range[0]), float(v_range[1])
        if lo > hi:
            raise ValueError(f"Некорректный интервал уровней [{lo}, {hi}]")
        self._v_range = (lo, hi)

    @classmethod
    def create_weight(cls, expr: Union[str, Expr], v_range: Tuple[float, float] = (0.0, 1.0), **_) -> IWeight:
        return cls(expr, v_range)

    def __call__(self, x: ArrayLike, v: ArrayLike) -> np.ndarray:
        x, v = np.broadcast_arrays(np.asarray(x, dtype=np.float64), np.asarray(v, dtype=np.float64))
        return np.asarray(eval_expr(self.expr, {"x": x, "v": v}), dtype=np.float64)

    @property
    def v_range(self) -> Tuple[float, float]:
        return self._v_range

    def get_weight_info(self) -> Dict[str, Any]:
        return {
            'type': 'expr',
            'expr': self.text,
            'v_range': list(self._v_range),
        }
