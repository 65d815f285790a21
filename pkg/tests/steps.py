"""Method-of-steps reference solver for problems with discrete delays only.

Independent of the collocation code: it evaluates ``x(t)`` by recursing on
the equation until every argument falls in the initial history.
"""

from __future__ import annotations

import numpy as np

from nrespectra.model import LinearProblem, eval_matrix


def solution(p: LinearProblem, phi, t: float) -> np.ndarray:
    """``x(t)`` for the IVP with history ``phi`` on ``[-tau, 0]`` at start time ``p.s``."""
    if p.distributed:
        raise ValueError("reference solver handles discrete delays only")
    if t <= 0.0:
        return np.atleast_1d(np.asarray(phi(t), dtype=float))
    total = np.zeros(p.dimension)
    for term in p.discrete:
        total = total + eval_matrix(term.coeff, p.s + t) @ solution(p, phi, t - term.delay)
    return total


def advance(p: LinearProblem, phi, h: float, thetas) -> np.ndarray:
    """Node-major values of the state ``x_h`` at the history nodes ``thetas``."""
    return np.concatenate([solution(p, phi, h + float(th)) for th in thetas])
