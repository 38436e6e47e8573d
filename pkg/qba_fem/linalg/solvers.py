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

"""Linear solver entry points."""

from __future__ import annotations

import logging

from numpy import array, ndarray, zeros
from numpy.linalg import norm
from scipy.linalg import LinAlgError, solve
from scipy.sparse import csc_matrix, issparse
from scipy.sparse.linalg import splu

from ..exceptions import AsymmetricSystemError, BreakdownError, SolverError
from ..utils.typing import ispositive
from .krylov import conjugate_gradient, minres
from .system import BlockSystem, relative_asymmetry

logger = logging.getLogger(__name__)

DENSE_LIMIT: int = 2000
SYMMETRY_TOL: float = 1e-12
METHODS: tuple[str, ...] = ("minres", "dense", "direct")
REFINEMENT_STEPS: int = 3


def solve_spd(
    A, b: ndarray, tol: float = 1e-10, max_iter: int | None = None, x0: ndarray | None = None
) -> ndarray:
    """Solve ``A x = b`` for symmetric positive definite ``A`` by conjugate gradients.

    Raises:
        NegativeCurvatureError: if ``A`` is detected singular or indefinite.
        ConvergenceError: if ``max_iter`` iterations do not suffice.
    """
    x, _, _ = conjugate_gradient(A, b, tol=tol, max_iter=max_iter, x0=x0)
    return x


def solve_sym_indefinite(
    system: BlockSystem,
    tol: float = 1e-10,
    max_iter: int | None = None,
    *,
    method: str = "minres",
    x0: ndarray | None = None,
) -> ndarray:
    """Solve a symmetric block system.

    Args:
        system: the block system, rejected if its relative asymmetry exceeds ``1e-12``.
        tol: relative residual tolerance.
        max_iter: MINRES iteration budget.
        method: ``"minres"``, ``"dense"`` (LAPACK symmetric-indefinite solve, at most
            2000 unknowns) or ``"direct"`` (sparse LU).
        x0: MINRES initial guess.
    """
    if not isinstance(system, BlockSystem):
        raise TypeError(f"Invalid system type `{type(system)}`, expected BlockSystem.")
    solver = SymIndefiniteSolver(system.matrix, method=method, tol=tol, max_iter=max_iter)
    return solver.solve(system.rhs, x0=x0)


class SymIndefiniteSolver:
    """Reusable solver for one symmetric matrix and many right-hand sides.

    The sparse LU factorization of the ``"direct"`` method is computed once, lazily.
    """

    def __init__(
        self,
        matrix,
        method: str = "minres",
        tol: float = 1e-10,
        max_iter: int | None = None,
    ) -> None:
        self._validate_method(method, matrix.shape[0])
        if not ispositive(tol):
            raise ValueError(f"Tolerance must be positive, not `{tol!r}`.")
        asymmetry = relative_asymmetry(matrix)
        if asymmetry > SYMMETRY_TOL:
            raise AsymmetricSystemError(
                f"Relative asymmetry `{asymmetry:.3e}` exceeds `{SYMMETRY_TOL}`."
            )
        self.matrix = matrix
        self.method: str = method
        self.tol: float = tol
        self.max_iter: int | None = max_iter
        self.iterations: int = 0
        self.residual: float = 0.0
        self._lu = None

    def solve(self, rhs: ndarray, x0: ndarray | None = None) -> ndarray:
        """Solve for one right-hand side and verify the residual by explicit matvec."""
        rhs = array(rhs, dtype=float)
        if rhs.shape != (self.matrix.shape[0],):
            raise ValueError(
                f"Right-hand side of shape `{rhs.shape}` does not match `{self.matrix.shape}`."
            )
        scale = norm(rhs)
        if scale == 0:
            self.iterations, self.residual = 0, 0.0
            return zeros(rhs.size)
        if self.method == "minres":
            x, self.iterations, _ = minres(self.matrix, rhs, self.tol, self.max_iter, x0)
        else:
            x = self._solve_factorized(rhs, scale)
        self.residual = float(norm(rhs - self.matrix @ x) / scale)
        if self.residual > self.tol:
            raise SolverError(
                f"Method `{self.method}` left relative residual `{self.residual:.3e}` "
                f"above tolerance `{self.tol}`.",
                residual=self.residual,
                iterations=self.iterations,
            )
        logger.debug(
            "%s solve of %d unknowns: residual %.3e", self.method, rhs.size, self.residual
        )
        return x

    ################################################################################
    ## FACTORIZATIONS
    ################################################################################
    def _solve_factorized(self, rhs: ndarray, scale: float) -> ndarray:
        x = self._apply_factorization(rhs)
        self.iterations = 0
        for _ in range(REFINEMENT_STEPS):
            r = rhs - self.matrix @ x
            if norm(r) <= self.tol * scale:
                break
            x = x + self._apply_factorization(r)
            self.iterations += 1
        return x

    def _apply_factorization(self, rhs: ndarray) -> ndarray:
        if self.method == "dense":
            dense = self.matrix.toarray() if issparse(self.matrix) else array(self.matrix)
            try:
                return solve(dense, rhs, assume_a="sym")
            except LinAlgError as error:
                raise BreakdownError(f"Dense factorization failed: {error}") from error
        if self._lu is None:
            try:
                self._lu = splu(csc_matrix(self.matrix))
            except RuntimeError as error:
                raise BreakdownError(f"Sparse factorization failed: {error}") from error
        return self._lu.solve(rhs)

    ################################################################################
    ## VALIDATION
    ################################################################################
    @staticmethod
    def _validate_method(method: str, size: int) -> None:
        if method not in METHODS:
            raise ValueError(f"Unknown solver method `{method!r}`, expected one of {METHODS}.")
        if method == "dense" and size > DENSE_LIMIT:
            raise ValueError(
                f"Dense path limited to `{DENSE_LIMIT}` unknowns, system has `{size}`."
            )
