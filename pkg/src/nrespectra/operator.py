"""Dense collocation matrix of the evolution operator over one step ``h``.

The history ``phi`` on ``[-tau, 0]`` is represented by its node values
``Phi``; the unknown continuation ``w`` on ``[0, h]`` by node values ``W``.
Collocating the equation at the step nodes gives the linear system

    W = K_Y Phi + K_W W,

and reading the shifted state ``V(P Phi, P+ W)(theta + h)`` at every history
node gives ``U Phi = S_Y Phi + S_W W``.  Eliminating ``W`` yields

    T = S_Y + S_W (I - K_W)^{-1} K_Y.

The step node ``t = 0`` is not an unknown: it reads ``Phi(0)``, so ``W``
holds the ``L(M+1)`` values on ``(0, h]``.  State vectors are node-major,
entry ``node*d + component``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .collocation import PiecewiseMesh, build_mesh, cheb_abscissae
from .errors import AssemblyError, InvalidParameterError
from .model import LinearProblem, rhs_rows

SINGULAR_CONDITION = 1e14


@dataclass(frozen=True, eq=False)
class MonodromyMatrix:
    matrix: np.ndarray = field(repr=False)
    mesh: PiecewiseMesh = field(repr=False)
    problem: LinearProblem
    L: int
    M: int
    h: float
    condition: float

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def _block(coeffs: np.ndarray, A: np.ndarray) -> np.ndarray:
    # (d, n*d) block with entry [i, c*d + j] = coeffs[c] * A[i, j]
    return np.kron(coeffs[None, :], A)


class _Assembler:
    def __init__(self, p: LinearProblem, mesh: PiecewiseMesh):
        self.p = p
        self.mesh = mesh
        self.d = p.dimension
        self.n_phi = mesh.past.size
        # the step node t = 0 belongs to the history: V(phi, w)(0) = phi(0)
        self.w_nodes = mesh.future.nodes[1:]
        self.n_w = len(self.w_nodes)
        self._zero_tol = 1e-14 * max(1.0, mesh.h)

    def split_future(self, row: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Split a row over the step nodes into (Phi part, W part)."""
        phi = np.zeros(self.n_phi)
        phi[-1] = row[0]
        return phi, row[1:]

    def point(self, x: float):
        """Coefficient rows (Phi part, W part) reading ``V(P Phi, P+ W)(x)``."""
        if abs(x) <= self._zero_tol:
            x = 0.0
        if x <= 0.0:
            return self.mesh.past.interp_row(x), None
        return self.split_future(self.mesh.future.interp_row(x))

    def window(self, lo: float, hi: float):
        """Coefficient rows for ``integral_lo^hi V(P Phi, P+ W)``."""
        phi = w = None
        if lo < 0.0:
            phi = self.mesh.past.integral_row(lo, min(hi, 0.0))
        if hi > 0.0:
            extra, w = self.split_future(self.mesh.future.integral_row(max(lo, 0.0), hi))
            phi = extra if phi is None else phi + extra
        return phi, w

    def collocation(self) -> tuple[np.ndarray, np.ndarray]:
        d = self.d
        KY = np.zeros((self.n_w * d, self.n_phi * d))
        KW = np.zeros((self.n_w * d, self.n_w * d))
        for r, t in enumerate(self.w_nodes):
            rows = slice(r * d, (r + 1) * d)
            for stencil in rhs_rows(self.p, float(t)):
                if stencil.kind == "discrete":
                    phi, w = self.point(stencil.where)
                else:
                    phi, w = self.window(*stencil.where)
                if phi is not None:
                    KY[rows] += _block(phi, stencil.matrix)
                if w is not None:
                    KW[rows] += _block(w, stencil.matrix)
        return KY, KW

    def shift(self) -> tuple[np.ndarray, np.ndarray]:
        d = self.d
        eye = np.eye(d)
        SY = np.zeros((self.n_phi * d, self.n_phi * d))
        SW = np.zeros((self.n_phi * d, self.n_w * d))
        for k, theta in enumerate(self.mesh.past.nodes):
            rows = slice(k * d, (k + 1) * d)
            phi, w = self.point(float(theta) + self.mesh.h)
            if phi is not None:
                SY[rows] += _block(phi, eye)
            if w is not None:
                SW[rows] += _block(w, eye)
        return SY, SW


def _solve_fixed_point(KW: np.ndarray, KY: np.ndarray) -> tuple[np.ndarray, float]:
    B = np.eye(KW.shape[0]) - KW
    if B.size == 0:
        return np.zeros_like(KY), 1.0
    with warnings.catch_warnings():
        # exact singularity is reported through the condition estimate below
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(B, check_finite=True)
    anorm = np.linalg.norm(B, 1)
    gecon = sla.get_lapack_funcs("gecon", (lu,))
    rcond, info = gecon(lu, anorm, norm="1")
    condition = np.inf if rcond == 0.0 else 1.0 / rcond
    if info != 0 or not condition <= SINGULAR_CONDITION:
        raise AssemblyError(
            f"discrete fixed-point system is singular (condition estimate {condition:.3e})",
            condition,
        )
    return sla.lu_solve((lu, piv), KY), float(condition)


def assemble(
    p: LinearProblem,
    h: float | None = None,
    L: int = 1,
    M: int = 30,
) -> MonodromyMatrix:
    """Assemble the collocation matrix of the evolution operator ``U(s + h, s)``.

    Parameters
    ----------
    p : LinearProblem
    h : float, optional
        Step length; defaults to ``p.tau``.  ``p.tau / h`` must be an integer.
    L, M : int
        Number of pieces in ``[0, h]`` and degree parameter (each piece
        carries ``M + 2`` Chebyshev extremal nodes).

    Raises
    ------
    AssemblyError
        If ``I - K_W`` has a condition estimate above ``1e14``.
    """
    h = p.tau if h is None else float(h)
    mesh = build_mesh(h, p.tau, L, cheb_abscissae(M))
    asm = _Assembler(p, mesh)
    KY, KW = asm.collocation()
    SY, SW = asm.shift()
    X, condition = _solve_fixed_point(KW, KY)
    T = SY + SW @ X
    if not np.all(np.isfinite(T)):
        raise AssemblyError("assembled matrix has non-finite entries", condition)
    return MonodromyMatrix(T, mesh, p, int(L), int(M), h, condition)


def apply(T: MonodromyMatrix, phi) -> np.ndarray:
    """Advance the node values ``phi`` of a history by one step."""
    phi = np.asarray(phi, dtype=float)
    n = T.matrix.shape[1]
    if phi.shape != (n,):
        raise InvalidParameterError(f"state vector must have length {n}, got shape {phi.shape}")
    return T.matrix @ phi


def restrict(mesh: PiecewiseMesh, phi, dimension: int = 1) -> np.ndarray:
    """Node values (node-major) of a history ``phi(theta)`` on ``[-tau, 0]``."""
    values = [np.atleast_1d(np.asarray(phi(float(x)), dtype=float)) for x in mesh.past.nodes]
    out = np.concatenate(values)
    if out.shape != (mesh.past.size * dimension,):
        raise InvalidParameterError("history returns values of the wrong dimension")
    return out
