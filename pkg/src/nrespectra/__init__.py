"""Spectra of evolution operators of linear neutral renewal equations
by piecewise pseudospectral collocation."""

from .collocation import Abscissae, PiecewiseMesh, build_mesh, cheb_abscissae, lagrange_row, quadrature_row
from .expr import Constant, Expression, PiecewiseConstant, parse
from .model import LinearProblem, builtin, load_problem, regularize, rhs_rows
from .operator import MonodromyMatrix, apply, assemble, restrict
from .oracles import OracleSpectrum, scalar_oracle, system_oracle, two_delay_const_roots, two_delay_determinant
from .spectra import SpectrumResult, closest_error, eigenvalues, fit_order, hausdorff

__version__ = "0.1.0"

__all__ = [
    "Abscissae",
    "Constant",
    "Expression",
    "LinearProblem",
    "MonodromyMatrix",
    "OracleSpectrum",
    "PiecewiseConstant",
    "PiecewiseMesh",
    "SpectrumResult",
    "apply",
    "assemble",
    "build_mesh",
    "builtin",
    "cheb_abscissae",
    "closest_error",
    "eigenvalues",
    "fit_order",
    "hausdorff",
    "lagrange_row",
    "load_problem",
    "parse",
    "quadrature_row",
    "regularize",
    "restrict",
    "rhs_rows",
    "scalar_oracle",
    "system_oracle",
    "two_delay_const_roots",
    "two_delay_determinant",
]
