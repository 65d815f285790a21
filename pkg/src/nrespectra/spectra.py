"""Eigenvalues of collocation matrices and the error metrics used to study them."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg as sla

from .errors import EigenSolverError, InvalidParameterError, UnderdeterminedError
from .operator import assemble

STRUCTURAL_ZERO = 1e-10
CONJUGATE_TOL = 1e-9
USABLE_ERROR = 1e-13


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """Eigenvalues sorted by descending modulus, with relative residuals.

    ``residuals[k]`` is ``||T v - lambda v|| / ||v||`` for the computed
    eigenvector ``v`` of ``eigenvalues[k]``.
    """

    eigenvalues: np.ndarray
    residuals: np.ndarray
    params: dict = field(default_factory=dict)
    norm: float = 0.0

    def __len__(self) -> int:
        return len(self.eigenvalues)

    @property
    def structural_zero(self) -> np.ndarray:
        return np.abs(self.eigenvalues) < STRUCTURAL_ZERO

    def nonzero(self) -> np.ndarray:
        return self.eigenvalues[~self.structural_zero]

    def conjugate_pairing_error(self) -> float:
        """Largest distance from an eigenvalue's conjugate to the spectrum."""
        lam = self.eigenvalues
        if lam.size == 0:
            return 0.0
        conj = np.conj(lam)
        return float(np.max(np.min(np.abs(conj[:, None] - lam[None, :]), axis=1)))


def _order(lam: np.ndarray) -> np.ndarray:
    # descending modulus, then real part, then imaginary part
    return np.lexsort((-lam.imag, -lam.real, -np.abs(lam)))


def eigenvalues(T, **params) -> SpectrumResult:
    """All eigenvalues of the dense real matrix ``T`` (LAPACK ``geev``, QR/Schur based).

    ``T`` may be a :class:`~nrespectra.operator.MonodromyMatrix` or any 2-D
    array.  Extra keyword arguments are stored as source parameters.
    """
    A = np.asarray(T, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidParameterError(f"need a square matrix, got shape {A.shape}")
    if hasattr(T, "problem"):
        params = {"problem": T.problem.name, "L": T.L, "M": T.M, "h": T.h, **params}
    try:
        lam, vecs = sla.eig(A, check_finite=True)
    except (sla.LinAlgError, ValueError) as exc:
        raise EigenSolverError(f"eigensolver failed on a {A.shape[0]}x{A.shape[0]} matrix: {exc}") from exc
    idx = _order(lam)
    lam = lam[idx]
    vecs = vecs[:, idx]
    res = np.linalg.norm(A @ vecs - vecs * lam[None, :], axis=0) / np.linalg.norm(vecs, axis=0)
    return SpectrumResult(lam, res, params, float(np.linalg.norm(A, 2)) if A.size else 0.0)


def closest_error(result: SpectrumResult | Sequence[complex], target: complex) -> float:
    """``min_k |lambda_k - target|``."""
    lam = result.eigenvalues if isinstance(result, SpectrumResult) else np.asarray(result)
    if len(lam) == 0:
        raise InvalidParameterError("empty spectrum")
    return float(np.min(np.abs(lam - target)))


def fit_order(rows: Iterable[tuple[float, float]]) -> float:
    """Negated least-squares slope of ``log(error)`` against ``log(M)``.

    Rows with error at or below ``1e-13`` are ignored; at least three usable
    rows are needed.
    """
    usable = [(m, e) for m, e in rows if np.isfinite(e) and e > USABLE_ERROR]
    if len(usable) < 3:
        raise UnderdeterminedError(
            f"order fit needs at least 3 rows with error > {USABLE_ERROR:g}, got {len(usable)}"
        )
    logm = np.log([m for m, _ in usable])
    loge = np.log([e for _, e in usable])
    slope = np.polyfit(logm, loge, 1)[0]
    return float(-slope)


def one_sided(set_a, set_b) -> float:
    """``sup_{a in A} inf_{b in B} |a - b|``."""
    a = np.asarray(set_a, dtype=complex).ravel()
    b = np.asarray(set_b, dtype=complex).ravel()
    if a.size == 0 or b.size == 0:
        raise InvalidParameterError("set distance of an empty set")
    return float(np.max(np.min(np.abs(a[:, None] - b[None, :]), axis=1)))


def hausdorff(set_a, set_b) -> float:
    """Symmetric Hausdorff distance between finite sets of complex numbers."""
    return max(one_sided(set_a, set_b), one_sided(set_b, set_a))


@dataclass(frozen=True)
class ConvergenceStudy:
    target: complex
    rows: tuple[tuple[int, float], ...]
    order: float | None

    @property
    def max_error(self) -> float:
        return max(e for _, e in self.rows)


def convergence_study(
    problem, Ms: Sequence[int], target: complex, L: int = 1, h: float | None = None
) -> ConvergenceStudy:
    """Closest-eigenvalue error at ``target`` for each ``M`` in the sweep, plus the fitted order."""
    rows = []
    for M in Ms:
        spec = eigenvalues(assemble(problem, h, L, M))
        rows.append((int(M), closest_error(spec, target)))
    try:
        order = fit_order(rows)
    except UnderdeterminedError:
        order = None
    return ConvergenceStudy(complex(target), tuple(rows), order)
