"""Рекурсивный спуск для языка выражений.

Грамматика (версия 1):

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'

'^' правоассоциативна и связывает сильнее унарного минуса: -x^2 = -(x^2).
Переменные: x, v, p. Константа: pi. Функции: abs, exp, log, sqrt, cos, sin
(один аргумент), min, max (два и более). Неявного умножения нет.
"""
import math
import re
from dataclasses import dataclass
from typing import List, Optional

from src.errors import ArityError, ExprSyntaxError, UnknownIdentifier
from src.exprlang.expr_nodes import (
    UNARY_FUNCTIONS,
    VARIABLES,
    VARIADIC_FUNCTIONS,
    BinOp,
    Call,
    Expr,
    Neg,
    Num,
    Var,
)

CONSTANTS = {"pi": math.pi}

_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),])"
    r"|(?P<bad>\S)"
    r")"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    offset: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.lastgroup is None:
            # остались только пробелы
            break
        start = _byte_offset(text, m.start(m.lastgroup))
        if m.lastgroup == "bad":
            raise ExprSyntaxError(f"Недопустимый символ {m.group('bad')!r}", start)
        tokens.append(Token(m.lastgroup, m.group(m.lastgroup), start))
        pos = m.end()
    tokens.append(Token("end", "", _byte_offset(text, len(text))))
    return tokens


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def accept(self, text: str) -> Optional[Token]:
        if self.current.kind == "op" and self.current.text == text:
            return self.advance()
        return None

    def expect(self, text: str) -> Token:
        tok = self.accept(text)
        if tok is None:
            raise ExprSyntaxError(f"Ожидалось {text!r}, получено {self._describe(self.current)}",
                                  self.current.offset)
        return tok

    @staticmethod
    def _describe(tok: Token) -> str:
        return "конец строки" if tok.kind == "end" else repr(tok.text)

    def parse(self) -> Expr:
        if self.current.kind == "end":
            raise ExprSyntaxError("Пустое выражение", self.current.offset)
        e = self.expr()
        if self.current.kind != "end":
            raise ExprSyntaxError(f"Лишний токен {self.current.text!r}", self.current.offset)
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.current.kind == "op" and self.current.text in "+-":
            op = self.advance().text
            left = BinOp(op, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.current.kind == "op" and self.current.text in "*/":
            op = self.advance().text
            left = BinOp(op, left, self.unary())
        return left

    def unary(self) -> Expr:
        if self.accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.accept("^"):
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        tok = self.current
        if tok.kind == "number":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "ident":
            self.advance()
            return self.identifier(tok)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        raise ExprSyntaxError(f"Ожидалось число, имя или '(', получено {self._describe(tok)}", tok.offset)

    def identifier(self, tok: Token) -> Expr:
        name = tok.text
        if name in VARIABLES:
            return Var(name)
        if name in CONSTANTS:
            return Num(CONSTANTS[name])
        if name not in UNARY_FUNCTIONS and name not in VARIADIC_FUNCTIONS:
            raise UnknownIdentifier(f"Неизвестное имя {name!r} (offset {tok.offset})")

        self.expect("(")
        args = [self.expr()]
        while self.accept(","):
            args.append(self.expr())
        self.expect(")")

        if name in UNARY_FUNCTIONS and len(args) != 1:
            raise ArityError(f"Функция {name} принимает один аргумент, передано {len(args)}")
        if name in VARIADIC_FUNCTIONS and len(args) < 2:
            raise ArityError(f"Функция {name} принимает не меньше двух аргументов, передано {len(args)}")
        return Call(name, tuple(args))


def parse_expr(text: str) -> Expr:
    """Разбирает строку в дерево выражения.

    Raises:
        ExprSyntaxError: Синтаксическая ошибка; offset - байтовое смещение.
        UnknownIdentifier: Неизвестная переменная или функция.
        ArityError: Неверное число аргументов функции.
    """
    return _Parser(text).parse()
