from dataclasses import dataclass
from typing import FrozenSet, Tuple, Union

VARIABLES = ("x", "v", "p")

UNARY_FUNCTIONS = ("abs", "exp", "log", "sqrt", "cos", "sin")
VARIADIC_FUNCTIONS = ("min", "max")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    args: Tuple["Expr", ...]


Expr = Union[Num, Var, Neg, BinOp, Call]


def to_text(e: Expr) -> str:
    """Печать с полной расстановкой скобок; повторный разбор даёт то же дерево."""
    if isinstance(e, Num):
        return repr(float(e.value))
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_text(e.operand)})"
    if isinstance(e, BinOp):
        return f"({to_text(e.left)} {e.op} {to_text(e.right)})"
    if isinstance(e, Call):
        return f"{e.name}({', '.join(to_text(a) for a in e.args)})"
    raise TypeError(f"Неизвестный узел выражения: {e!r}")


def free_variables(e: Expr) -> FrozenSet[str]:
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, Num):
        return frozenset()
    if isinstance(e, Neg):
        return free_variables(e.operand)
    if isinstance(e, BinOp):
        return free_variables(e.left) | free_variables(e.right)
    if isinstance(e, Call):
        out = frozenset()
        for a in e.args:
            out |= free_variables(a)
        return out
    raise TypeError(f"Неизвестный узел выражения: {e!r}")


def is_integer_literal(e: Expr) -> bool:
    """Целочисленный литерал, возможно с унарным минусом (x^2, x^-1)."""
    if isinstance(e, Neg):
        return is_integer_literal(e.operand)
    return isinstance(e, Num) and float(e.value).is_integer()
