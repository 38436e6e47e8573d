# This code is part of qba-fem.
#
# (C) Copyright qba-fem developers 2026.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
#
# Any modifications or derivative works of this code must retain this
# copyright notice, and modified files need to carry a notice indicating
# that they have been altered from the originals.

"""Unpreconditioned Krylov solvers.

Both solvers re-verify their residual by an explicit matrix-vector product before
returning, and restart from the true residual when the recursively updated one has
drifted below the tolerance.
"""

from __future__ import annotations

import logging
from math import hypot, sqrt

from numpy import array, finfo, ndarray, zeros
from numpy.linalg import norm

from ..exceptions import BreakdownError, ConvergenceError, NegativeCurvatureError
from ..utils.typing import isinteger, ispositive

logger = logging.getLogger(__name__)

EPS: float = float(finfo(float).eps)
MAX_RESTARTS: int = 3


################################################################################
## CONJUGATE GRADIENTS
################################################################################
def conjugate_gradient(
    A,
    b: ndarray,
    tol: float = 1e-10,
    max_iter: int | None = None,
    x0: ndarray | None = None,
) -> tuple[ndarray, int, list[float]]:
    """Conjugate gradients for symmetric positive definite ``A``.

    Args:
        A: sparse or dense square matrix (anything supporting ``A @ x``).
        b: right-hand side.
        tol: relative residual tolerance ``‖Ax − b‖ ≤ tol‖b‖``.
        max_iter: iteration budget (defaults to ``10·n``).
        x0: initial guess (defaults to zero).

    Returns:
        The solution, the number of iterations and the relative residual history.

    Raises:
        NegativeCurvatureError: if a search direction has ``pᵀAp ≤ 0``.
        ConvergenceError: if the budget is exhausted.
    """
    b, x, max_iter = _prepare(A, b, tol, max_iter, x0)
    b_norm = norm(b)
    if b_norm == 0:
        return zeros(b.size), 0, [0.0]
    r = b - A @ x
    p = r.copy()
    rr = float(r @ r)
    history = [sqrt(rr) / b_norm]
    restarts = 0
    for iteration in range(1, max_iter + 1):
        if sqrt(rr) <= tol * b_norm:
            r = b - A @ x
            true_residual = norm(r) / b_norm
            if true_residual <= tol or restarts >= MAX_RESTARTS:
                break
            restarts += 1
            logger.debug(
                "CG restart %d at iteration %d (residual %.3e)", restarts, iteration, true_residual
            )
            p = r.copy()
            rr = float(r @ r)
        Ap = A @ p
        curvature = float(p @ Ap)
        if curvature <= 0:
            raise NegativeCurvatureError(
                f"Non-positive curvature `{curvature:.3e}` at iteration {iteration}.",
                residual=history[-1],
                iterations=iteration,
                history=history,
            )
        step = rr / curvature
        x += step * p
        r -= step * Ap
        rr_next = float(r @ r)
        p = r + (rr_next / rr) * p
        rr = rr_next
        history.append(sqrt(rr) / b_norm)
    residual = float(norm(b - A @ x) / b_norm)
    if residual > tol:
        raise ConvergenceError(
            f"CG did not reach tolerance `{tol}` within {max_iter} iterations "
            f"(residual `{residual:.3e}`).",
            residual=residual,
            iterations=len(history) - 1,
            history=history,
        )
    logger.debug("CG converged in %d iterations (residual %.3e)", len(history) - 1, residual)
    return x, len(history) - 1, history


################################################################################
## MINRES
################################################################################
def minres(
    A,
    b: ndarray,
    tol: float = 1e-10,
    max_iter: int | None = None,
    x0: ndarray | None = None,
) -> tuple[ndarray, int, list[float]]:
    """Minimal residual method for symmetric (possibly indefinite) ``A``.

    Lanczos tridiagonalization with Givens rotations; the residual estimate is
    checked against an explicit residual and the iteration restarted if needed.

    Returns:
        The solution, the total number of iterations and the relative residual history.

    Raises:
        BreakdownError: if the Krylov space becomes invariant without solving the system.
        ConvergenceError: if the budget is exhausted.
    """
    b, x, max_iter = _prepare(A, b, tol, max_iter, x0)
    b_norm = norm(b)
    if b_norm == 0:
        return zeros(b.size), 0, [0.0]
    history: list[float] = []
    used = 0
    for cycle in range(MAX_RESTARTS + 1):
        x, steps, estimates, exhausted = _minres_cycle(A, b, x, tol * b_norm, max_iter - used)
        used += steps
        history.extend(e / b_norm for e in estimates)
        residual = float(norm(b - A @ x) / b_norm)
        if residual <= tol:
            logger.debug("MINRES converged in %d iterations (residual %.3e)", used, residual)
            return x, used, history
        if exhausted and used < max_iter:
            raise BreakdownError(
                f"MINRES breakdown after {used} iterations (residual `{residual:.3e}`).",
                residual=residual,
                iterations=used,
                history=history,
            )
        if used >= max_iter:
            break
        logger.debug(
            "MINRES restart %d after %d iterations (residual %.3e)", cycle + 1, used, residual
        )
    raise ConvergenceError(
        f"MINRES did not reach tolerance `{tol}` within {used} iterations "
        f"(residual `{residual:.3e}`).",
        residual=residual,
        iterations=used,
        history=history,
    )


def _minres_cycle(
    A, b: ndarray, x: ndarray, atol: float, budget: int
) -> tuple[ndarray, int, list[float], bool]:
    """Run MINRES from ``x``; flags Lanczos exhaustion (``β = 0``) as fourth output."""
    r1 = b - A @ x
    y = r1.copy()
    r2 = r1.copy()
    beta1 = norm(r1)
    if beta1 <= atol:
        return x, 0, [float(beta1)], False
    old_beta, beta = 0.0, beta1
    dbar = epsilon = 0.0
    phibar = beta1
    cs, sn = -1.0, 0.0
    w = zeros(b.size)
    w2 = zeros(b.size)
    estimates = []
    steps = 0
    exhausted = False
    while steps < budget:
        steps += 1
        v = y / beta
        y = A @ v
        if steps >= 2:
            y = y - (beta / old_beta) * r1
        alpha = float(v @ y)
        y = y - (alpha / beta) * r2
        r1, r2 = r2, y
        old_beta, beta = beta, float(norm(y))
        old_epsilon = epsilon
        delta = cs * dbar + sn * alpha
        gbar = sn * dbar - cs * alpha
        epsilon = sn * beta
        dbar = -cs * beta
        gamma = max(hypot(gbar, beta), EPS)
        cs, sn = gbar / gamma, beta / gamma
        phi = cs * phibar
        phibar = sn * phibar
        w1, w2 = w2, w
        w = (v - old_epsilon * w1 - delta * w2) / gamma
        x = x + phi * w
        estimates.append(float(phibar))
        if phibar <= atol:
            break
        if beta <= EPS * beta1:
            exhausted = True
            break
    return x, steps, estimates, exhausted


################################################################################
## AUXILIARY
################################################################################
def _prepare(A, b, tol, max_iter, x0) -> tuple[ndarray, ndarray, int]:
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"Expected a square matrix, got shape `{A.shape}`.")
    b = array(b, dtype=float)
    if b.shape != (A.shape[0],):
        raise ValueError(f"Right-hand side of shape `{b.shape}` does not match `{A.shape}`.")
    if not ispositive(tol):
        raise ValueError(f"Tolerance must be positive, not `{tol!r}`.")
    if max_iter is None:
        max_iter = max(10 * b.size, 100)
    elif not isinteger(max_iter) or max_iter < 1:
        raise ValueError(f"Iteration budget must be a positive integer, not `{max_iter!r}`.")
    x = zeros(b.size) if x0 is None else array(x0, dtype=float)
    if x.shape != b.shape:
        raise ValueError(f"Initial guess of shape `{x.shape}` does not match `{b.shape}`.")
    return b, x, int(max_iter)
