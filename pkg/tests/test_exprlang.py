import math

import numpy as np
import pytest

from src.errors import ArityError, DomainError, ExprSyntaxError, UnboundVariable, UnknownIdentifier
from src.exprlang.evaluator import eval_expr
from src.exprlang.expr_nodes import BinOp, Call, Neg, Num, Var, free_variables, to_text
from src.exprlang.parser import parse_expr


def test_precedence():
    assert parse_expr("1 + 2 * x") == BinOp("+", Num(1.0), BinOp("*", Num(2.0), Var("x")))
    assert parse_expr("-x^2") == Neg(BinOp("^", Var("x"), Num(2.0)))
    assert parse_expr("x^y^z".replace("y", "v").replace("z", "p")) == \
        BinOp("^", Var("x"), BinOp("^", Var("v"), Var("p")))
    assert parse_expr("2^-1") == BinOp("^", Num(2.0), Neg(Num(1.0)))


def test_left_associative_minus():
    assert eval_expr(parse_expr("5 - 3 - 1"), {}) == 1.0
    assert eval_expr(parse_expr("8 / 4 / 2"), {}) == 1.0


def test_functions_and_constant():
    e = parse_expr("max(abs(x), 0.5, cos(pi*x))")
    assert e == Call("max", (Call("abs", (Var("x"),)), Num(0.5), Call("cos", (BinOp("*", Num(math.pi), Var("x")),))))
    assert eval_expr(e, {"x": 0.0}) == pytest.approx(1.0)


def test_to_text_reparses():
    e = parse_expr("sqrt(1 + p^2) + v*p - -x")
    assert parse_expr(to_text(e)) == e
    assert free_variables(e) == {"x", "v", "p"}


@pytest.mark.parametrize("text, offset", [("", 0), ("1 +", 3), ("(x", 2), ("x $ 2", 2), ("x y", 2), ("2x", 1)])
def test_syntax_errors_carry_offset(text, offset):
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr(text)
    assert info.value.offset == offset


def test_offset_is_in_bytes():
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr("\u00a0x + $")
    # неразрывный пробел занимает два байта
    assert info.value.offset == 6


def test_unknown_identifier_and_arity():
    with pytest.raises(UnknownIdentifier):
        parse_expr("y + 1")
    with pytest.raises(UnknownIdentifier):
        parse_expr("tan(x)")
    with pytest.raises(ArityError):
        parse_expr("abs(x, v)")
    with pytest.raises(ArityError):
        parse_expr("min(x)")


def test_vectorized_evaluation():
    xs = np.linspace(-1.0, 1.0, 5)
    out = eval_expr(parse_expr("1 - abs(x)"), {"x": xs})
    assert out.tolist() == pytest.approx([0.0, 0.5, 1.0, 0.5, 0.0])
    const = eval_expr(parse_expr("2"), {"x": xs})
    assert const.shape == xs.shape


def test_scalar_in_scalar_out():
    assert isinstance(eval_expr(parse_expr("x^2"), {"x": -3.0}), float)


def test_unbound_variable():
    with pytest.raises(UnboundVariable):
        eval_expr(parse_expr("x + v"), {"x": 1.0})


@pytest.mark.parametrize("text, bindings", [
    ("log(x)", {"x": 0.0}),
    ("sqrt(x)", {"x": -1.0}),
    ("1 / x", {"x": 0.0}),
    ("x^-1", {"x": 0.0}),
    ("x^0.5", {"x": -4.0}),
])
def test_domain_errors(text, bindings):
    with pytest.raises(DomainError):
        eval_expr(parse_expr(text), bindings)


def test_negative_base_integer_exponent():
    assert eval_expr(parse_expr("x^3"), {"x": -2.0}) == -8.0
    assert eval_expr(parse_expr("x^-2"), {"x": -2.0}) == 0.25
