"""A tiny expression language for time-periodic coefficients.

Grammar::

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := "-" factor | number | "t" | ident "(" expr ")" | "(" expr ")"
    ident  := sin | cos | exp | log | abs | floor

Only the variable ``t`` exists and there is no implicit multiplication.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

from .errors import ExprEvalError, ExprSyntaxError, InvalidParameterError

FUNCTIONS = ("sin", "cos", "exp", "log", "abs", "floor")


# --------------------------------------------------------------------------
# AST
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


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
    func: str
    arg: "Expr"


Expr = Union[Num, Var, Neg, BinOp, Call]


# --------------------------------------------------------------------------
# Tokenizer
# --------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # number, t, func, op symbol itself, or "end"
    text: str
    offset: int


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    pos = 0
    data = source.encode("utf-8")
    # work on the decoded string but report byte offsets
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        offset = len(source[:pos].encode("utf-8"))
        if m is None:
            raise ExprSyntaxError(f"unexpected character {source[pos]!r}", offset)
        kind = m.lastgroup
        text = m.group()
        if kind == "ident":
            if text == "t":
                tokens.append(_Token("t", text, offset))
            elif text in FUNCTIONS:
                tokens.append(_Token("func", text, offset))
            else:
                raise ExprSyntaxError(f"unknown identifier {text!r}", offset, {"t", *FUNCTIONS})
        elif kind == "number":
            tokens.append(_Token("number", text, offset))
        elif kind == "op":
            tokens.append(_Token(text, text, offset))
        pos = m.end()
    tokens.append(_Token("end", "", len(data)))
    return tokens


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------

_FACTOR_START = frozenset({"-", "number", "t", "func", "("})


class _Parser:
    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> _Token:
        if self.tok.kind != kind:
            self.fail({kind})
        return self.advance()

    def fail(self, expected):
        tok = self.tok
        what = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ExprSyntaxError(f"unexpected {what}", tok.offset, expected)

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok.kind != "end":
            self.fail({"+", "-", "*", "/", "end"})
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.tok.kind in ("+", "-"):
            op = self.advance().kind
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.tok.kind in ("*", "/"):
            op = self.advance().kind
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Expr:
        tok = self.tok
        if tok.kind == "-":
            self.advance()
            return Neg(self.factor())
        if tok.kind == "number":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "t":
            self.advance()
            return Var()
        if tok.kind == "func":
            self.advance()
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return Call(tok.text, arg)
        if tok.kind == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        self.fail(_FACTOR_START)


def parse(source: str) -> Expr:
    """Parse ``source`` into an expression tree.

    Raises
    ------
    ExprSyntaxError
        With the byte offset of the offending token and the expected token set.
    """
    return _Parser(source).parse()


# --------------------------------------------------------------------------
# Printing and evaluation
# --------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def to_source(node: Expr) -> str:
    """Render ``node`` as parseable text with minimal parentheses."""
    return _print(node, 0)


def _print(node: Expr, ctx: int) -> str:
    if isinstance(node, Num):
        text = repr(node.value)
        if node.value < 0 or text in ("inf", "nan"):
            text = f"({text})"
        return text
    if isinstance(node, Var):
        return "t"
    if isinstance(node, Neg):
        return "-" + _print(node.operand, 3)
    if isinstance(node, Call):
        return f"{node.func}({_print(node.arg, 0)})"
    prec = _PREC[node.op]
    # left associativity: the right operand binds one level tighter
    text = f"{_print(node.left, prec)}{node.op}{_print(node.right, prec + 1)}"
    return f"({text})" if prec < ctx else text


def evaluate(node: Expr, t: float) -> float:
    """Evaluate the tree at time ``t``; domain errors raise ``ExprEvalError``."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return t
    if isinstance(node, Neg):
        return -evaluate(node.operand, t)
    if isinstance(node, BinOp):
        a = evaluate(node.left, t)
        b = evaluate(node.right, t)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if b == 0.0:
            raise ExprEvalError("division by zero", t)
        return a / b
    x = evaluate(node.arg, t)
    f = node.func
    if f == "sin":
        return math.sin(x)
    if f == "cos":
        return math.cos(x)
    if f == "exp":
        try:
            return math.exp(x)
        except OverflowError:
            raise ExprEvalError("exp overflow", t) from None
    if f == "log":
        if x <= 0.0:
            raise ExprEvalError(f"log of non-positive value {x!r}", t)
        return math.log(x)
    if f == "abs":
        return abs(x)
    return float(math.floor(x))


# --------------------------------------------------------------------------
# Coefficient functions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Constant:
    value: float
    period: float = 1.0

    def __call__(self, t: float) -> float:
        return self.value


@dataclass(frozen=True)
class PiecewiseConstant:
    """Right-continuous step function, extended periodically.

    ``pieces`` is a sequence of ``(start, stop, value)`` with half-open
    intervals ``[start, stop)`` partitioning ``[0, period)``.
    """

    pieces: tuple[tuple[float, float, float], ...]
    period: float = 1.0

    def __post_init__(self):
        pieces = tuple(sorted((float(a), float(b), float(v)) for a, b, v in self.pieces))
        object.__setattr__(self, "pieces", pieces)
        if not self.period > 0:
            raise InvalidParameterError(f"period must be positive, got {self.period!r}")
        if not pieces:
            raise InvalidParameterError("piecewise table is empty")
        if pieces[0][0] != 0.0 or pieces[-1][1] != self.period:
            raise InvalidParameterError("piecewise intervals must cover [0, period)")
        for (a, b, _), (c, _, _) in zip(pieces, pieces[1:] + ((pieces[-1][1], None, None),)):
            if not b > a:
                raise InvalidParameterError(f"empty interval [{a}, {b})")
            if b != c:
                raise InvalidParameterError(f"gap or overlap at {b}")

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(v for _, _, v in self.pieces)

    def __call__(self, t: float) -> float:
        u = t - self.period * math.floor(t / self.period)
        for a, b, v in self.pieces:
            if a <= u < b:
                return v
        # u == period through rounding of a tiny negative t
        return self.pieces[0][2]


@dataclass(frozen=True)
class Expression:
    expr: Expr
    period: float = 1.0

    @classmethod
    def from_source(cls, source: str, period: float = 1.0) -> "Expression":
        return cls(parse(source), period)

    @property
    def source(self) -> str:
        return to_source(self.expr)

    def __call__(self, t: float) -> float:
        # expressions carry their own periodicity (e.g. via floor)
        return evaluate(self.expr, t)


CoefficientFn = Union[Constant, PiecewiseConstant, Expression]


def eval_coefficient(f: CoefficientFn, t: float) -> float:
    return f(t)


def divide(f: CoefficientFn, divisor: float) -> CoefficientFn:
    """Return ``f / divisor`` as a coefficient of the same kind."""
    if divisor == 0.0:
        raise InvalidParameterError("division of a coefficient by zero")
    if isinstance(f, Constant):
        return Constant(f.value / divisor, f.period)
    if isinstance(f, PiecewiseConstant):
        return PiecewiseConstant(tuple((a, b, v / divisor) for a, b, v in f.pieces), f.period)
    return Expression(BinOp("/", f.expr, Num(float(divisor))), f.period)


def coefficient_from_json(obj, default_period: float = 1.0) -> CoefficientFn:
    """Decode ``{"const": x} | {"expr": s} | {"piecewise": [...], "period": p}``."""
    if not isinstance(obj, dict):
        raise InvalidParameterError(f"coefficient must be an object, got {obj!r}")
    period = float(obj.get("period", default_period))
    if "const" in obj:
        return Constant(float(obj["const"]), period)
    if "expr" in obj:
        return Expression.from_source(str(obj["expr"]), period)
    if "piecewise" in obj:
        try:
            pieces = tuple((p["from"], p["to"], p["value"]) for p in obj["piecewise"])
        except (KeyError, TypeError) as exc:
            raise InvalidParameterError(f"malformed piecewise entry: {exc}") from None
        return PiecewiseConstant(pieces, period)
    raise InvalidParameterError(f"unknown coefficient kind: {sorted(obj)}")
