"""Linear periodic neutral renewal equations and the benchmark builtins.

A problem has the form::

    x(t) = sum_k A_k(t) x(t - tau_k) + sum_m B_m(t) int_{a_m}^{b_m} x(t + theta) dtheta

with ``x(t)`` in R^d, ``0 < tau_k <= tau`` and ``-tau <= a_m < b_m <= 0``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .errors import InvalidParameterError, UnknownBuiltinError
from .expr import (
    CoefficientFn,
    Constant,
    Expression,
    PiecewiseConstant,
    coefficient_from_json,
    divide,
)

CoefficientMatrix = tuple[tuple[CoefficientFn, ...], ...]


def _as_matrix(coeff) -> CoefficientMatrix:
    if isinstance(coeff, (Constant, PiecewiseConstant, Expression)):
        return ((coeff,),)
    return tuple(tuple(row) for row in coeff)


def eval_matrix(coeff: CoefficientMatrix, t: float) -> np.ndarray:
    return np.array([[f(t) for f in row] for row in coeff], dtype=float)


@dataclass(frozen=True)
class DiscreteTerm:
    delay: float
    coeff: CoefficientMatrix

    def __post_init__(self):
        object.__setattr__(self, "coeff", _as_matrix(self.coeff))


@dataclass(frozen=True)
class DistributedTerm:
    """``B(t) * integral_{a}^{b} x(t + theta) dtheta``."""

    a: float
    b: float
    coeff: CoefficientMatrix

    def __post_init__(self):
        object.__setattr__(self, "coeff", _as_matrix(self.coeff))


@dataclass(frozen=True)
class LinearProblem:
    dimension: int
    tau: float
    discrete: tuple[DiscreteTerm, ...] = ()
    distributed: tuple[DistributedTerm, ...] = ()
    s: float = 0.0
    name: str = "custom"
    period: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "discrete", tuple(self.discrete))
        object.__setattr__(self, "distributed", tuple(self.distributed))
        if self.period is None:
            object.__setattr__(self, "period", self.tau)
        self.validate()

    def validate(self) -> None:
        d, tau = self.dimension, self.tau
        if not isinstance(d, int) or d < 1:
            raise InvalidParameterError(f"dimension must be a positive integer, got {d!r}")
        if not tau > 0:
            raise InvalidParameterError(f"tau must be positive, got {tau!r}")
        if not (self.discrete or self.distributed):
            raise InvalidParameterError("a problem needs at least one term")
        reach = 0.0
        for term in self.discrete:
            if not 0.0 < term.delay <= tau * (1 + 1e-12):
                raise InvalidParameterError(f"delay {term.delay!r} outside (0, tau]")
            reach = max(reach, term.delay)
        for term in self.distributed:
            if not (-tau * (1 + 1e-12) <= term.a < term.b <= 0.0):
                raise InvalidParameterError(
                    f"distributed window [{term.a!r}, {term.b!r}] outside [-tau, 0]"
                )
            reach = max(reach, -term.a)
        if abs(reach - tau) > 1e-12 * tau:
            raise InvalidParameterError(f"largest delay {reach!r} differs from tau={tau!r}")
        for term in (*self.discrete, *self.distributed):
            if len(term.coeff) != d or any(len(row) != d for row in term.coeff):
                raise InvalidParameterError(f"coefficient is not {d}x{d}")
            for row in term.coeff:
                for f in row:
                    if isinstance(f, Constant):
                        continue
                    ratio = self.period / f.period
                    if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
                        raise InvalidParameterError(
                            f"coefficient period {f.period!r} does not divide {self.period!r}"
                        )

    @property
    def is_scalar(self) -> bool:
        return self.dimension == 1


class StencilRow(NamedTuple):
    """One term of the right-hand side evaluated at a collocation time.

    ``where`` is an absolute point ``t - tau_k`` for discrete terms and a
    window ``(t + a, t + b)`` for distributed terms.
    """

    kind: str
    where: float | tuple[float, float]
    matrix: np.ndarray


def rhs_rows(p: LinearProblem, t: float) -> list[StencilRow]:
    """Stencil of the right-hand side at time ``t`` (coefficients taken at ``s + t``)."""
    at = p.s + t
    rows = [StencilRow("discrete", t - term.delay, eval_matrix(term.coeff, at)) for term in p.discrete]
    rows += [
        StencilRow("distributed", (t + term.a, t + term.b), eval_matrix(term.coeff, at))
        for term in p.distributed
    ]
    return rows


def regularize(p: LinearProblem, eps: float) -> LinearProblem:
    """Replace each discrete term ``A x(t - tau_k)`` by the average
    ``(A / eps) * integral_{-tau_k}^{-tau_k + eps} x(t + theta) dtheta``."""
    if not p.discrete:
        raise InvalidParameterError("regularization needs at least one discrete term")
    shortest = min(term.delay for term in p.discrete)
    if not 0.0 < eps < shortest:
        raise InvalidParameterError(f"eps must lie in (0, {shortest!r}), got {eps!r}")
    terms = [
        DistributedTerm(
            -term.delay,
            -term.delay + eps,
            tuple(tuple(divide(f, eps) for f in row) for row in term.coeff),
        )
        for term in p.discrete
    ]
    return LinearProblem(
        p.dimension,
        p.tau,
        (),
        (*p.distributed, *terms),
        p.s,
        f"{p.name}_eps={eps!r}",
        p.period,
    )


# --------------------------------------------------------------------------
# Builtins
# --------------------------------------------------------------------------

TWO_PI = "2*3.141592653589793"


def _expr(source: str) -> Expression:
    return Expression.from_source(source, 1.0)


def _scalar(name: str, f: CoefficientFn) -> LinearProblem:
    return LinearProblem(1, 1.0, (DiscreteTerm(1.0, f),), name=name)


SCALAR_COEFFICIENTS: dict[str, CoefficientFn] = {
    "f1": Constant(2.0),
    "f2": PiecewiseConstant(((0.0, 0.3, 2.0), (0.3, 0.8, 3.0), (0.8, 1.0, 4.0)), 1.0),
    "f3": _expr(f"sin({TWO_PI}*t)"),
    "f4": _expr("exp(t-floor(t))"),
}


def _system(name: str, entries: Sequence[Sequence[str]]) -> LinearProblem:
    coeff = tuple(tuple(_expr(src) for src in row) for row in entries)
    return LinearProblem(len(entries), 1.0, (DiscreteTerm(1.0, coeff),), name=name)


def _sys_star(star: str) -> LinearProblem:
    return _system(
        "sys_star",
        [[f"sin({TWO_PI}*t)", star], ["0", f"3+cos({TWO_PI}*t)"]],
    )


_A1 = [
    [f"sin({TWO_PI}*t)", "exp(t-floor(t))"],
    ["log(1+abs(t-floor(t)))", f"3+cos({TWO_PI}*t)"],
]
_A2 = [
    [f"sin({TWO_PI}*t)", "exp(t-floor(t))-5"],
    ["log(1+abs(t-floor(t)))+10", f"3+cos({TWO_PI}*t)"],
]


def _float_param(params: Mapping[str, object], key: str) -> float:
    if key not in params:
        raise InvalidParameterError(f"missing parameter {key!r}")
    try:
        value = float(params[key])
    except (TypeError, ValueError):
        raise InvalidParameterError(f"parameter {key!r} must be a real number") from None
    if not math.isfinite(value):
        raise InvalidParameterError(f"parameter {key!r} must be finite")
    return value


def _check_keys(name: str, params: Mapping[str, object], allowed: set[str]) -> None:
    extra = set(params) - allowed
    if extra:
        raise InvalidParameterError(f"builtin {name!r} does not take {sorted(extra)}")


BUILTINS = ("f1", "f2", "f3", "f4", "sys_star", "sys_A1", "sys_A2", "two_delay_const", "re_epsilon")


def builtin(name: str, params: Mapping[str, object] | None = None) -> LinearProblem:
    """Construct one of the benchmark problems (all with ``tau = 1``).

    Parameters
    ----------
    name : str
        One of ``f1``-``f4`` (scalar, one delay), ``sys_star`` (param
        ``star``: expression text for the upper-right entry), ``sys_A1``,
        ``sys_A2``, ``two_delay_const`` (params ``a``, ``b``) and
        ``re_epsilon`` (params ``f``: one of ``f1``-``f4``, ``eps``).
    """
    params = dict(params or {})
    if name in SCALAR_COEFFICIENTS:
        _check_keys(name, params, set())
        return _scalar(name, SCALAR_COEFFICIENTS[name])
    if name == "sys_star":
        _check_keys(name, params, {"star"})
        if "star" not in params:
            raise InvalidParameterError("sys_star needs parameter 'star'")
        return _sys_star(str(params["star"]))
    if name == "sys_A1":
        _check_keys(name, params, set())
        return _system(name, _A1)
    if name == "sys_A2":
        _check_keys(name, params, set())
        return _system(name, _A2)
    if name == "two_delay_const":
        _check_keys(name, params, {"a", "b"})
        a = _float_param(params, "a")
        b = _float_param(params, "b")
        return LinearProblem(
            1,
            1.0,
            (DiscreteTerm(0.5, Constant(a)), DiscreteTerm(1.0, Constant(b))),
            name=name,
        )
    if name == "re_epsilon":
        _check_keys(name, params, {"f", "eps"})
        base = params.get("f")
        if base not in SCALAR_COEFFICIENTS:
            raise InvalidParameterError(f"re_epsilon needs f in {sorted(SCALAR_COEFFICIENTS)}")
        eps = _float_param(params, "eps")
        return regularize(builtin(str(base)), eps)
    raise UnknownBuiltinError(f"unknown builtin {name!r}; choose from {', '.join(BUILTINS)}")


# --------------------------------------------------------------------------
# JSON problem files
# --------------------------------------------------------------------------


def _matrix_from_json(obj, d: int, period: float) -> CoefficientMatrix:
    if not isinstance(obj, list) or len(obj) != d:
        raise InvalidParameterError(f"coeff must be a {d}x{d} nested list")
    rows = []
    for row in obj:
        if not isinstance(row, list) or len(row) != d:
            raise InvalidParameterError(f"coeff must be a {d}x{d} nested list")
        rows.append(tuple(coefficient_from_json(c, period) for c in row))
    return tuple(rows)


def problem_from_dict(data: Mapping) -> LinearProblem:
    try:
        d = data["dimension"]
        tau = float(data["tau"])
    except KeyError as exc:
        raise InvalidParameterError(f"problem is missing {exc.args[0]!r}") from None
    if not isinstance(d, int):
        raise InvalidParameterError("dimension must be an integer")
    period = float(data.get("period", tau))
    discrete = [
        DiscreteTerm(float(t["delay"]), _matrix_from_json(t["coeff"], d, period))
        for t in data.get("discrete", [])
    ]
    distributed = [
        DistributedTerm(float(t["a"]), float(t["b"]), _matrix_from_json(t["coeff"], d, period))
        for t in data.get("distributed", [])
    ]
    return LinearProblem(
        d, tau, discrete, distributed, float(data.get("s", 0.0)), str(data.get("name", "custom")), period
    )


def load_problem(path: str | Path) -> LinearProblem:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidParameterError(f"cannot read problem file {path}: {exc}") from None
    if not isinstance(data, dict):
        raise InvalidParameterError("problem file must contain a JSON object")
    try:
        return problem_from_dict(data)
    except (KeyError, TypeError) as exc:
        raise InvalidParameterError(f"malformed problem file {path}: {exc}") from None
