from typing import Any, Dict, Union

import numpy as np

from src.errors import UnboundVariable
from src.exprlang.evaluator import eval_expr
from src.exprlang.expr_nodes import Expr, free_variables, to_text
from src.exprlang.parser import parse_expr
from src.functional.base_integrand import ArrayLike, IIntegrand

INTEGRAND_VARIABLES = frozenset(("v", "p"))


class ExprIntegrand(IIntegrand):
    """Интегрант, заданный выражением от v и p."""

    def __init__(self, expr: Union[str, Expr]):
        self.expr = parse_expr(expr) if isinstance(expr, str) else expr
        self.text = expr if isinstance(expr, str) else to_text(expr)
        extra = free_variables(self.expr) - INTEGRAND_VARIABLES
        if extra:
            raise UnboundVariable(f"Интегрант может зависеть только от v и p, найдено: {sorted(extra)}")

    @classmethod
    def create_integrand(cls, expr: Union[str, Expr], **_) -> IIntegrand:
        return cls(expr)

    def __call__(self, v: ArrayLike, p: ArrayLike) -> np.ndarray:
        v, p = np.broadcast_arrays(np.asarray(v, dtype=np.float64), np.asarray(p, dtype=np.float64))
        return np.asarray(eval_expr(self.expr, {"v": v, "p": p}), dtype=np.float64)

    def to_text(self) -> str:
        return self.text

    def get_integrand_info(self) -> Dict[str, Any]:
        return {'type': 'expr', 'expr': self.text}
