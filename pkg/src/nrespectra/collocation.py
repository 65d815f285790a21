"""Piecewise Chebyshev collocation meshes, barycentric interpolation and
interpolatory quadrature.

A mesh covers the step interval ``[0, h]`` with ``L`` uniform pieces, each
carrying the ``M + 2`` Chebyshev extremal points mapped to the piece.  The
history interval ``[-tau, 0]`` is covered by shifted copies of the same
pieces, so ``tau`` must be an integer multiple of ``h``.  Node values on
shared piece endpoints are stored once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import InvalidParameterError, UnsupportedHorizonError

NODE_HIT_RTOL = 1e-14
HORIZON_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class Abscissae:
    """Normalized collocation abscissae ``0 = c_0 < ... < c_{M+1} = 1``."""

    points: np.ndarray
    M: int

    def __len__(self) -> int:
        return len(self.points)

    @cached_property
    def weights(self) -> np.ndarray:
        # Closed form for Chebyshev extremal points: (-1)^j, halved at the ends.
        # A common scale factor cancels in the barycentric formula.
        n = self.M + 1
        w = (-1.0) ** np.arange(n + 1)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w


def cheb_abscissae(M: int) -> Abscissae:
    """Chebyshev extremal points of degree ``M + 1`` mapped to ``[0, 1]``.

    Returns ``(1 - cos(j*pi/(M+1))) / 2`` for ``j = 0..M+1`` with the two
    endpoints assigned exactly.
    """
    if not isinstance(M, (int, np.integer)) or isinstance(M, bool) or M < 1:
        raise InvalidParameterError(f"M must be a positive integer, got {M!r}")
    M = int(M)
    j = np.arange(M + 2)
    c = 0.5 * (1.0 - np.cos(j * np.pi / (M + 1)))
    # enforce exact symmetry and endpoints so that shifted meshes line up
    c = 0.5 * (c + (1.0 - c[::-1]))
    c[0] = 0.0
    c[-1] = 1.0
    if (M + 1) % 2 == 0:
        c[(M + 1) // 2] = 0.5
    return Abscissae(points=c, M=M)


def barycentric_weights(nodes: np.ndarray) -> np.ndarray:
    """Barycentric weights ``1 / prod_{k != j} (x_j - x_k)`` for arbitrary nodes.

    Nodes are rescaled to unit width first to keep the products in range.
    """
    x = np.asarray(nodes, dtype=float)
    width = x.max() - x.min()
    if width == 0.0:
        return np.ones(1)
    xs = (x - x.min()) / width
    diff = xs[:, None] - xs[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / np.prod(diff, axis=1)


def _check_distinct(x: np.ndarray) -> None:
    if len(np.unique(x)) != len(x):
        raise InvalidParameterError("interpolation nodes must be distinct")


def lagrange_row(nodes, x: float, weights: np.ndarray | None = None) -> np.ndarray:
    """Values ``(l_0(x), ..., l_n(x))`` of the Lagrange basis on ``nodes`` at ``x``.

    Uses the second (true) barycentric form.  When ``x`` coincides with a node
    up to a relative tolerance of ``1e-14`` the unit coordinate vector of that
    node is returned.

    Parameters
    ----------
    nodes : array_like
        Distinct interpolation nodes.
    x : float
        Evaluation point.
    weights : ndarray, optional
        Barycentric weights matching ``nodes``; computed when omitted.
    """
    nodes = np.asarray(nodes, dtype=float)
    if weights is None:
        _check_distinct(nodes)
        weights = barycentric_weights(nodes)
    diff = x - nodes
    scale = max(float(np.max(np.abs(nodes))), float(nodes.max() - nodes.min()), 1e-300)
    hit = np.flatnonzero(np.abs(diff) <= NODE_HIT_RTOL * scale)
    if hit.size:
        row = np.zeros(len(nodes))
        row[hit[np.argmin(np.abs(diff[hit]))]] = 1.0
        return row
    q = weights / diff
    return q / q.sum()


@dataclass(frozen=True, eq=False)
class PiecewiseGrid:
    """Uniform pieces on ``[start, start + n_pieces*width]`` sharing abscissae.

    Node ``j`` of piece ``p`` has global index ``p*(M+1) + j``.
    """

    start: float
    width: float
    n_pieces: int
    abscissae: Abscissae
    nodes: np.ndarray = field(repr=False)

    @property
    def end(self) -> float:
        return float(self.nodes[-1])

    @property
    def size(self) -> int:
        return len(self.nodes)

    def _stride(self) -> int:
        return self.abscissae.M + 1

    def piece_of(self, x: float) -> int:
        p = int(np.floor((x - self.start) / self.width))
        return min(max(p, 0), self.n_pieces - 1)

    def piece_slice(self, p: int) -> slice:
        s = self._stride()
        return slice(p * s, p * s + s + 1)

    def piece_bounds(self, p: int) -> tuple[float, float]:
        sl = self.piece_slice(p)
        return float(self.nodes[sl.start]), float(self.nodes[sl.stop - 1])

    def contains(self, x: float, rtol: float = 1e-13) -> bool:
        tol = rtol * max(1.0, abs(self.start), abs(self.end))
        return self.start - tol <= x <= self.end + tol

    def interp_row(self, x: float) -> np.ndarray:
        """Row ``r`` with ``r @ values == (P values)(x)`` for the piecewise interpolant."""
        if not self.contains(x):
            raise InvalidParameterError(
                f"point {x!r} outside mesh interval [{self.start!r}, {self.end!r}]"
            )
        p = self.piece_of(x)
        sl = self.piece_slice(p)
        row = np.zeros(self.size)
        row[sl] = lagrange_row(self.nodes[sl], x, self.abscissae.weights)
        return row

    def integral_row(self, a: float, b: float) -> np.ndarray:
        """Weights ``q`` with ``q @ values == integral_a^b (P values)``, exactly."""
        if not b > a:
            raise InvalidParameterError(f"empty integration interval [{a!r}, {b!r}]")
        if not (self.contains(a) and self.contains(b)):
            raise InvalidParameterError(
                f"interval [{a!r}, {b!r}] outside mesh interval [{self.start!r}, {self.end!r}]"
            )
        row = np.zeros(self.size)
        for p in range(self.piece_of(a), self.piece_of(b) + 1):
            lo, hi = self.piece_bounds(p)
            lo, hi = max(lo, a), min(hi, b)
            if hi <= lo:
                continue
            sl = self.piece_slice(p)
            row[sl] += interpolatory_weights(self.nodes[sl], lo, hi, self.abscissae.weights)
        return row


def interpolatory_weights(nodes, a: float, b: float, weights: np.ndarray | None = None) -> np.ndarray:
    """Integrals over ``[a, b]`` of the Lagrange basis polynomials on ``nodes``.

    Computed with Gauss-Legendre quadrature of sufficient order, hence exact
    up to rounding.
    """
    nodes = np.asarray(nodes, dtype=float)
    if weights is None:
        _check_distinct(nodes)
        weights = barycentric_weights(nodes)
    # basis polynomials have degree len(nodes)-1; n Gauss points are exact to degree 2n-1
    gx, gw = leggauss(len(nodes) // 2 + 1)
    pts = 0.5 * (b - a) * gx + 0.5 * (b + a)
    basis = np.array([lagrange_row(nodes, x, weights) for x in pts])
    return 0.5 * (b - a) * (gw @ basis)


def _grid(start: float, width: float, n_pieces: int, abscissae: Abscissae) -> PiecewiseGrid:
    c = abscissae.points
    nodes = [start + p * width + c[:-1] * width for p in range(n_pieces)]
    nodes.append(np.array([start + n_pieces * width]))
    return PiecewiseGrid(start, width, n_pieces, abscissae, np.concatenate(nodes))


@dataclass(frozen=True, eq=False)
class PiecewiseMesh:
    """Collocation mesh on ``[0, h]`` together with its shifted copy on ``[-tau, 0]``.

    Attributes
    ----------
    h, tau : float
        Step length and maximal delay, ``tau = steps * h``.
    L : int
        Number of pieces in ``[0, h]``.
    breakpoints : ndarray
        Piece endpoints ``t_0 = 0 < ... < t_L = h``.
    future : PiecewiseGrid
        The ``L(M+1) + 1`` nodes on ``[0, h]``.
    past : PiecewiseGrid
        The ``steps*L*(M+1) + 1`` nodes on ``[-tau, 0]``.
    """

    h: float
    tau: float
    L: int
    abscissae: Abscissae
    steps: int
    breakpoints: np.ndarray = field(repr=False)
    future: PiecewiseGrid = field(repr=False)
    past: PiecewiseGrid = field(repr=False)

    @property
    def M(self) -> int:
        return self.abscissae.M

    @property
    def nodes(self) -> np.ndarray:
        return self.future.nodes

    @property
    def past_nodes(self) -> np.ndarray:
        return self.past.nodes


def build_mesh(h: float, tau: float, L: int, abscissae: Abscissae) -> PiecewiseMesh:
    """Build the uniform piecewise mesh on ``[0, h]`` and its history copy on ``[-tau, 0]``.

    Raises
    ------
    UnsupportedHorizonError
        If ``tau / h`` is not a positive integer (relative tolerance 1e-12);
        truncated pieces near ``-tau`` are not supported.
    """
    if not (h > 0 and tau > 0):
        raise InvalidParameterError(f"h and tau must be positive, got h={h!r}, tau={tau!r}")
    if not isinstance(L, (int, np.integer)) or L < 1:
        raise InvalidParameterError(f"L must be a positive integer, got {L!r}")
    ratio = tau / h
    steps = int(round(ratio))
    if steps < 1 or abs(ratio - steps) > HORIZON_RTOL * ratio:
        raise UnsupportedHorizonError(
            f"tau/h = {ratio!r} is not a positive integer; only horizons h with "
            "tau an exact integer multiple of h are supported"
        )
    L = int(L)
    width = h / L
    future = _grid(0.0, width, L, abscissae)
    # history pieces are the step pieces translated by -h, -2h, ..., -steps*h
    blocks = [future.nodes[:-1] - k * h for k in range(steps, 0, -1)]
    blocks.append(np.array([0.0]))
    past_nodes = np.concatenate(blocks)
    past = PiecewiseGrid(-steps * h, width, steps * L, abscissae, past_nodes)
    breakpoints = future.nodes[:: abscissae.M + 1].copy()
    return PiecewiseMesh(float(h), float(steps * h), L, abscissae, steps, breakpoints, future, past)


def quadrature_row(mesh: PiecewiseMesh, a: float, b: float) -> np.ndarray:
    """Weights over the ``[-tau, 0]`` nodes integrating the interpolant on ``[a, b]``.

    For any node-value vector ``phi``, ``quadrature_row(mesh, a, b) @ phi``
    equals the exact integral of the piecewise interpolant of ``phi``.
    """
    if not (-mesh.tau <= a < b <= 0.0):
        raise InvalidParameterError(
            f"need -tau <= a < b <= 0, got a={a!r}, b={b!r}, tau={mesh.tau!r}"
        )
    return mesh.past.integral_row(a, b)
