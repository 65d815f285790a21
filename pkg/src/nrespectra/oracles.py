"""Closed-form spectra used as ground truth.

For ``x(t) = f(t) x(t - tau)`` with ``f`` periodic of period ``tau`` (or
constant) the monodromy operator acts as multiplication by ``f``; its
spectrum is the closure of the range of ``f``, and ``lambda`` is an
eigenvalue exactly when ``f = lambda`` on a segment.  For systems the
union of the spectra of ``A(t)`` is only a conjecture.  For two delays
``tau/2`` and ``tau`` with constant coefficients, the real eigenvalues are
the roots of ``alpha^2 - (a^2 + 2b) alpha + b^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .expr import CoefficientFn, Constant, PiecewiseConstant
from .model import CoefficientMatrix, eval_matrix

CONSTANT_RUN = 50
CONSTANT_TOL = 1e-12
JUMP_FACTOR = 10.0


@dataclass(frozen=True)
class OracleSpectrum:
    points: tuple[float, ...] = ()
    intervals: tuple[tuple[float, float], ...] = ()
    point_spectrum: tuple[float, ...] = ()
    note: str = ""

    def contains(self, x: complex, tol: float = 0.0) -> bool:
        return self.distance(x) <= tol

    def distance(self, x: complex) -> float:
        """Distance from ``x`` to the (closed) oracle set."""
        x = complex(x)
        best = math.inf
        for p in self.points:
            best = min(best, abs(x - p))
        for lo, hi in self.intervals:
            re = min(max(x.real, lo), hi)
            best = min(best, abs(x - re))
        return best

    def sample(self, n: int = 100) -> np.ndarray:
        """Finite point cloud: the isolated points and ``n`` uniform samples per interval."""
        parts = [np.asarray(self.points, dtype=float)]
        for lo, hi in self.intervals:
            parts.append(np.linspace(lo, hi, max(n, 2)) if hi > lo else np.array([lo]))
        return np.concatenate(parts) if parts else np.array([])


def scalar_oracle(f: CoefficientFn, n: int = 1000) -> OracleSpectrum:
    """Spectrum of multiplication by ``f``: the closure of its range.

    Step functions give their table values, each one an eigenvalue.
    Expressions are sampled on a uniform ``n``-grid over one period; the
    samples are joined into intervals except across jumps, and interval
    endpoints are sample extrema (error ``O(1/n^2)`` for smooth ``f``).
    """
    if n < 100:
        raise InvalidParameterError(f"grid size must be at least 100, got {n}")
    if isinstance(f, Constant):
        return OracleSpectrum((f.value,), (), (f.value,), "constant coefficient")
    if isinstance(f, PiecewiseConstant):
        vals = tuple(sorted(set(f.values)))
        return OracleSpectrum(vals, (), vals, "piecewise-constant coefficient")

    t = f.period * np.arange(n) / n
    y = np.array([f(float(s)) for s in t])
    # cyclic steps, including the wrap from the last sample to the first
    steps = np.abs(np.diff(np.append(y, y[0])))
    typical = float(np.median(steps))
    jump = steps > max(JUMP_FACTOR * typical, CONSTANT_TOL)

    segments = []
    for k in range(n):
        if not jump[k]:
            segments.append((min(y[k], y[(k + 1) % n]), max(y[k], y[(k + 1) % n])))
        else:
            segments.append((y[k], y[k]))
    segments.sort()
    intervals = []
    for lo, hi in segments:
        if intervals and lo <= intervals[-1][1]:
            intervals[-1][1] = max(intervals[-1][1], hi)
        else:
            intervals.append([lo, hi])

    points = tuple(float(lo) for lo, hi in intervals if hi == lo)
    ranges = tuple((float(lo), float(hi)) for lo, hi in intervals if hi > lo)
    return OracleSpectrum(points, ranges, _constant_runs(y), "sampled range of f")


def _constant_runs(y: np.ndarray) -> tuple[float, ...]:
    # heuristic: CONSTANT_RUN consecutive equal samples flag a constant piece
    found = []
    n = len(y)
    run = 1
    for k in range(1, 2 * n):
        if abs(y[k % n] - y[(k - 1) % n]) <= CONSTANT_TOL:
            run += 1
            if run == CONSTANT_RUN:
                found.append(float(y[k % n]))
        else:
            run = 1
        if run > n:
            break
    return tuple(sorted(set(found)))


def system_oracle(A: CoefficientMatrix, n: int = 100, period: float = 1.0) -> np.ndarray:
    """Eigenvalues of ``A(t_i)`` on the uniform grid ``t_i = i*period/n``, concatenated.

    This is the conjectured spectrum for one-delay systems.
    """
    if n < 2:
        raise InvalidParameterError(f"grid size must be at least 2, got {n}")
    out = [np.linalg.eigvals(eval_matrix(A, period * i / n)) for i in range(n)]
    return np.concatenate(out).astype(complex)


def two_delay_const_roots(a: float, b: float) -> list[float]:
    """Real eigenvalues ``(a^2 + 2b +- sqrt(a^4 + 4 a^2 b)) / 2``; empty when the root is complex."""
    disc = a**4 + 4 * a * a * b
    if disc < 0:
        return []
    r = math.sqrt(disc)
    return [(a * a + 2 * b + r) / 2, (a * a + 2 * b - r) / 2]


def two_delay_matrix(a: CoefficientFn, b: CoefficientFn, theta: float, lam: complex, tau: float = 1.0) -> np.ndarray:
    """The 4x4 real matrix whose determinant decides invertibility of ``U - lambda``."""
    alpha, beta = complex(lam).real, complex(lam).imag
    half = tau / 2
    a0, a_plus, a_minus = a(theta), a(theta + half), a(theta - half)
    b0, b_plus, b_minus = b(theta), b(theta + half), b(theta - half)
    diag = a0 * a_plus + b0 - alpha
    cross = a0 * b_plus
    return np.array(
        [
            [diag, beta, cross, 0.0],
            [-beta, diag, 0.0, cross],
            [a_minus, 0.0, b_minus - alpha, beta],
            [0.0, a_minus, -beta, b_minus - alpha],
        ]
    )


def two_delay_determinant(a: CoefficientFn, b: CoefficientFn, theta: float, lam: complex, tau: float = 1.0) -> float:
    return float(np.linalg.det(two_delay_matrix(a, b, theta, lam, tau)))
