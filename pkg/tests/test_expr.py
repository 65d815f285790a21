import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nrespectra.errors import ExprEvalError, ExprSyntaxError, InvalidParameterError
from nrespectra.expr import (
    BinOp,
    Call,
    Constant,
    Expression,
    Neg,
    Num,
    PiecewiseConstant,
    Var,
    coefficient_from_json,
    divide,
    evaluate,
    parse,
    to_source,
)
from nrespectra.model import SCALAR_COEFFICIENTS

F2 = SCALAR_COEFFICIENTS["f2"]


def test_parse_shapes():
    assert parse("sin(2*3.141592653589793*t)") == Call(
        "sin", BinOp("*", BinOp("*", Num(2.0), Num(3.141592653589793)), Var())
    )
    assert parse("exp(t-floor(t))") == Call("exp", BinOp("-", Var(), Call("floor", Var())))


def test_precedence_and_associativity():
    assert parse("1-2-3") == BinOp("-", BinOp("-", Num(1.0), Num(2.0)), Num(3.0))
    assert parse("1+2*3") == BinOp("+", Num(1.0), BinOp("*", Num(2.0), Num(3.0)))
    assert parse("-t*2") == BinOp("*", Neg(Var()), Num(2.0))
    assert parse("8/4/2") == BinOp("/", BinOp("/", Num(8.0), Num(4.0)), Num(2.0))
    assert evaluate(parse("2-3*-t"), 2.0) == 8.0
    assert evaluate(parse("  1.5e1 /\t(2+1) "), 0.0) == 5.0


def test_syntax_error_offset():
    with pytest.raises(ExprSyntaxError) as info:
        parse("1+*2")
    assert info.value.offset == 2
    assert "t" in info.value.expected and "(" in info.value.expected


@pytest.mark.parametrize(
    "source,offset",
    [("", 0), ("sin t", 4), ("(1+2", 4), ("1 2", 2), ("x+1", 0), ("2t", 1), ("tan(t)", 0), ("1+$", 2)],
)
def test_syntax_errors(source, offset):
    with pytest.raises(ExprSyntaxError) as info:
        parse(source)
    assert info.value.offset == offset


def test_eval_domain_errors():
    with pytest.raises(ExprEvalError) as info:
        evaluate(parse("log(t)"), -1.0)
    assert info.value.t == -1.0
    with pytest.raises(ExprEvalError):
        evaluate(parse("1/(t-1)"), 1.0)
    with pytest.raises(ExprEvalError):
        evaluate(parse("log(0*t)"), 3.0)


def test_eval_functions():
    e = parse("abs(-t)+cos(0*t)+floor(t)")
    assert evaluate(e, 2.5) == 2.5 + 1.0 + 2.0


def test_f2_table():
    assert F2(0.85) == 4.0
    assert F2(-0.7) == 3.0
    assert F2(0.3) == 3.0  # right-continuous at the jump
    assert F2(0.8) == 4.0
    assert F2(0.0) == 2.0
    assert F2(1.0) == 2.0


def test_constant():
    assert Constant(2.0)(123.4) == 2.0


@settings(max_examples=1000, deadline=None)
@given(st.floats(-50, 50))
def test_piecewise_periodicity(t):
    assert F2(t) == pytest.approx(F2(t + F2.period), abs=1e-12) or _near_break(t)


def _near_break(t):
    u = t - math.floor(t)
    return min(abs(u - b) for b in (0.0, 0.3, 0.8, 1.0)) < 1e-12


def test_breakpoints_take_right_value():
    g = PiecewiseConstant(((0.0, 0.25, 1.0), (0.25, 0.5, -1.0), (0.5, 2.0, 7.0)), 2.0)
    assert g(0.25) == -1.0
    assert g(0.5) == 7.0
    assert g(2.0) == 1.0
    assert g(-1.5) == 7.0


@pytest.mark.parametrize(
    "pieces",
    [
        ((0.0, 0.5, 1.0),),
        ((0.0, 0.5, 1.0), (0.4, 1.0, 2.0)),
        ((0.0, 0.5, 1.0), (0.6, 1.0, 2.0)),
        ((0.1, 1.0, 1.0),),
        (),
    ],
)
def test_piecewise_rejects_bad_partition(pieces):
    with pytest.raises(InvalidParameterError):
        PiecewiseConstant(pieces, 1.0)


_exprs = st.recursive(
    st.one_of(
        st.just(Var()),
        st.floats(0, 1e6, allow_nan=False, allow_infinity=False).map(Num),
    ),
    lambda inner: st.one_of(
        st.tuples(st.sampled_from("+-*/"), inner, inner).map(lambda x: BinOp(*x)),
        inner.map(Neg),
        st.tuples(st.sampled_from(["sin", "cos", "exp", "log", "abs", "floor"]), inner).map(lambda x: Call(*x)),
    ),
    max_leaves=12,
)


@settings(max_examples=300, deadline=None)
@given(_exprs)
def test_print_parse_roundtrip(tree):
    text = to_source(tree)
    assert parse(text) == tree
    assert parse(to_source(parse(text))) == parse(text)


def test_json_coefficients():
    assert coefficient_from_json({"const": 2}) == Constant(2.0)
    e = coefficient_from_json({"expr": "sin(t)"})
    assert isinstance(e, Expression) and e(0.0) == 0.0
    pw = coefficient_from_json({"piecewise": [{"from": 0, "to": 0.5, "value": 1}, {"from": 0.5, "to": 1, "value": 2}], "period": 1})
    assert pw(0.75) == 2.0
    with pytest.raises(InvalidParameterError):
        coefficient_from_json({"bogus": 1})
    with pytest.raises(ExprSyntaxError):
        coefficient_from_json({"expr": "sin("})


def test_divide_keeps_kind():
    assert divide(Constant(2.0), 0.5) == Constant(4.0)
    assert divide(F2, 2.0).values == (1.0, 1.5, 2.0)
    g = divide(SCALAR_COEFFICIENTS["f3"], 0.1)
    assert g(0.25) == pytest.approx(10.0, rel=1e-15)
    assert to_source(g.expr).endswith("/0.1")
