from typing import Callable, Dict, Mapping, Union

import numpy as np

from src.errors import DomainError, UnboundVariable
from src.exprlang.expr_nodes import BinOp, Call, Expr, Neg, Num, Var, is_integer_literal

Value = Union[float, np.ndarray]

_UNARY: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "abs": np.abs,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "cos": np.cos,
    "sin": np.sin,
}


def eval_expr(e: Expr, bindings: Mapping[str, Value]) -> Value:
    """Вычисляет выражение; привязки могут быть массивами одинаковой формы.

    Вычисление поэлементное (numpy), так что одно дерево можно применять
    сразу к сетке точек. Скаляры на входе дают скаляр на выходе.

    Raises:
        UnboundVariable: Переменная выражения не привязана.
        DomainError: log/sqrt вне области, деление на ноль, 0 в отрицательной
            степени, отрицательное основание с нецелым показателем.
    """
    arrays = {k: np.asarray(v, dtype=np.float64) for k, v in bindings.items()}
    scalar = all(a.ndim == 0 for a in arrays.values())
    with np.errstate(all="ignore"):
        out = _eval(e, arrays)
    if scalar and np.ndim(out) == 0:
        return float(out)
    shape = np.broadcast_shapes(*(a.shape for a in arrays.values())) if arrays else ()
    return np.broadcast_to(out, shape).copy() if np.shape(out) != shape else out


def _eval(e: Expr, env: Mapping[str, np.ndarray]) -> np.ndarray:
    if isinstance(e, Num):
        return np.float64(e.value)
    if isinstance(e, Var):
        if e.name not in env:
            raise UnboundVariable(f"Переменная {e.name!r} не привязана")
        return env[e.name]
    if isinstance(e, Neg):
        return -_eval(e.operand, env)
    if isinstance(e, BinOp):
        return _binop(e, env)
    if isinstance(e, Call):
        args = [_eval(a, env) for a in e.args]
        if e.name == "min":
            return _reduce(np.minimum, args)
        if e.name == "max":
            return _reduce(np.maximum, args)
        arg = args[0]
        if e.name == "log" and np.any(arg <= 0.0):
            raise DomainError(f"log от неположительного аргумента: {_first(arg, arg <= 0.0)!r}")
        if e.name == "sqrt" and np.any(arg < 0.0):
            raise DomainError(f"sqrt от отрицательного аргумента: {_first(arg, arg < 0.0)!r}")
        return _UNARY[e.name](arg)
    raise TypeError(f"Неизвестный узел выражения: {e!r}")


def _binop(e: BinOp, env: Mapping[str, np.ndarray]) -> np.ndarray:
    left = _eval(e.left, env)
    right = _eval(e.right, env)
    if e.op == "+":
        return left + right
    if e.op == "-":
        return left - right
    if e.op == "*":
        return left * right
    if e.op == "/":
        if np.any(right == 0.0):
            raise DomainError("Деление на ноль")
        return left / right
    if e.op == "^":
        if np.any((left == 0.0) & (right < 0.0)):
            raise DomainError("Ноль в отрицательной степени")
        if np.any(left < 0.0) and not is_integer_literal(e.right):
            raise DomainError(
                f"Отрицательное основание {_first(left, left < 0.0)!r} допускает только целый показатель-литерал")
        return np.power(left, right)
    raise TypeError(f"Неизвестная операция {e.op!r}")


def _reduce(fn, args):
    out = args[0]
    for a in args[1:]:
        out = fn(out, a)
    return out


def _first(arr: np.ndarray, mask: np.ndarray) -> float:
    return float(np.asarray(arr)[np.asarray(mask)].flat[0]) if np.ndim(arr) else float(arr)
