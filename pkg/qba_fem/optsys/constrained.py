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

"""Box-constrained optimality system.

The control is the clamp ``Π(−z_h/√α)`` onto ``[q_lo, q_hi]`` and the discrete system
for ``x = (u, z)`` is::

    −εMu + Kz = −εF
     Ku − N(z) = 0,      N(z)_i = ∫ Π(−z_h/√α) φ_i

which reduces to the unconstrained system when the bounds never bind.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from math import ceil, sqrt

from numpy import concatenate, ndarray
from numpy.linalg import norm
from scipy.sparse import bmat, csr_matrix

from ..exceptions import ConvergenceError
from ..fem import (
    assemble_clamped_term,
    assemble_inactive_mass,
    assemble_load,
    assemble_mass,
    assemble_stiffness,
)
from ..linalg import SymIndefiniteSolver
from ..mesh import DofMap, TriMesh
from ..utils.typing import isinteger, ispositive
from .problem import ControlVariant, DiscreteSolution, ModelProblem
from .reduced import recover_control, validate_problem

logger = logging.getLogger(__name__)

MIN_DAMPING: float = 1 / 16


class ClampedSystem:
    """Assembled data and residual evaluation of a box-constrained problem."""

    def __init__(self, mesh: TriMesh, dofs: DofMap, problem: ModelProblem) -> None:
        validate_problem(problem, constrained=True)
        if problem.variant is not ControlVariant.FULL:
            raise ValueError("Control bounds are supported for the full control action only.")
        self.mesh: TriMesh = mesh
        self.dofs: DofMap = dofs
        self.problem: ModelProblem = problem
        self.K: csr_matrix = assemble_stiffness(mesh, dofs)
        self.M: csr_matrix = assemble_mass(mesh, dofs)
        self.F: ndarray = assemble_load(mesh, dofs, problem.u_d)
        self.eps: float = problem.epsilon

    @property
    def n_dof(self) -> int:
        """Dofs per component."""
        return self.dofs.n_dof

    def clamped(self, z: ndarray) -> ndarray:
        """Clamped control term ``N(z)``."""
        lo, hi = self.problem.box
        return assemble_clamped_term(self.mesh, self.dofs, z, self.problem.alpha, lo, hi)

    def inactive_mass(self, z: ndarray) -> csr_matrix:
        """Mass matrix of the inactive set of ``z``."""
        lo, hi = self.problem.box
        return assemble_inactive_mass(self.mesh, self.dofs, z, self.problem.alpha, lo, hi)

    def residual_vector(self, u: ndarray, z: ndarray) -> ndarray:
        """Residual of both rows of the nonlinear system."""
        first = -self.eps * (self.M @ u) + self.K @ z + self.eps * self.F
        second = self.K @ u - self.clamped(z)
        return concatenate([first, second])

    def residual(self, u: ndarray, z: ndarray) -> float:
        """Euclidean norm of the residual."""
        return float(norm(self.residual_vector(u, z)))

    def linear_matrix(self, lower_right: csr_matrix | None = None) -> csr_matrix:
        """``[[−εM, K], [K, ε·lower_right]]`` with the full mass matrix by default."""
        lower_right = self.M if lower_right is None else lower_right
        matrix = bmat([[-self.eps * self.M, self.K], [self.K, self.eps * lower_right]])
        return matrix.tocsr()

    def split(self, x: ndarray) -> tuple[ndarray, ndarray]:
        """Split ``x = (u, z)``."""
        return x[: self.n_dof], x[self.n_dof :]


################################################################################
## SOLVERS
################################################################################
class BoxConstrainedSolver(ABC):
    """Nonlinear solver for the box-constrained optimality system.

    Args:
        tol: absolute tolerance on the Euclidean residual norm.
        max_iter: maximum number of nonlinear iterations.
        linear_solver: method passed on to :class:`SymIndefiniteSolver`.
        linear_tol: relative tolerance of the inner linear solves.
    """

    def __init__(
        self,
        tol: float = 1e-10,
        max_iter: int = 50,
        linear_solver: str = "direct",
        linear_tol: float = 1e-12,
    ) -> None:
        self.tol = tol
        self.max_iter = max_iter
        self.linear_solver: str = linear_solver
        self.linear_tol = linear_tol

    def __repr__(self) -> str:
        return f"{type(self).__name__}(tol={self.tol}, max_iter={self.max_iter})"

    ################################################################################
    ## PROPERTIES
    ################################################################################
    @property
    def tol(self) -> float:
        """Absolute residual tolerance."""
        return self._tol

    @tol.setter
    def tol(self, tol: float) -> None:
        if not ispositive(tol):
            raise ValueError(f"Tolerance must be positive, not `{tol!r}`.")
        self._tol: float = float(tol)

    @property
    def max_iter(self) -> int:
        """Nonlinear iteration budget."""
        return self._max_iter

    @max_iter.setter
    def max_iter(self, max_iter: int) -> None:
        if not isinteger(max_iter):
            raise TypeError(f"Invalid iteration budget type `{type(max_iter)}`, expected int.")
        if max_iter < 1:
            raise ValueError(f"Iteration budget must be positive, not `{max_iter}`.")
        self._max_iter: int = int(max_iter)

    @property
    def linear_tol(self) -> float:
        """Relative tolerance of the inner linear solves."""
        return self._linear_tol

    @linear_tol.setter
    def linear_tol(self, linear_tol: float) -> None:
        if not ispositive(linear_tol):
            raise ValueError(f"Linear tolerance must be positive, not `{linear_tol!r}`.")
        self._linear_tol: float = float(linear_tol)

    ################################################################################
    ## API
    ################################################################################
    def solve(self, mesh: TriMesh, dofs: DofMap, problem: ModelProblem) -> DiscreteSolution:
        """Solve the box-constrained system starting from the unconstrained solution."""
        system = ClampedSystem(mesh, dofs, problem)
        u, z, history = self._iterate(system)
        logger.debug(
            "%s on level %d: %d iterations, residual %.3e",
            type(self).__name__,
            mesh.level,
            len(history) - 1,
            history[-1],
        )
        return DiscreteSolution(
            alpha=problem.alpha,
            variant=problem.variant,
            u=u,
            z=z,
            q=recover_control(mesh, dofs, problem, z),
            residual=history[-1],
            iterations=len(history) - 1,
            history=history,
        )

    @abstractmethod
    def _iterate(self, system: ClampedSystem) -> tuple[ndarray, ndarray, list[float]]:
        """Return the converged ``u``, ``z`` and the residual history (initial included)."""

    def _linear_solver(self, matrix: csr_matrix) -> SymIndefiniteSolver:
        return SymIndefiniteSolver(matrix, method=self.linear_solver, tol=self.linear_tol)

    def _initial_guess(
        self, system: ClampedSystem, solver: SymIndefiniteSolver
    ) -> tuple[ndarray, ndarray]:
        rhs = concatenate([-system.eps * system.F, 0 * system.F])
        return system.split(solver.solve(rhs))

    def _fail(self, history: list[float], reason: str) -> ConvergenceError:
        return ConvergenceError(
            f"{type(self).__name__} {reason} after {len(history) - 1} iterations "
            f"(residual `{history[-1]:.3e}`, tolerance `{self.tol}`).",
            residual=history[-1],
            iterations=len(history) - 1,
            history=history,
        )


class FixedPointSolver(BoxConstrainedSolver):
    """Freeze the nonlinear remainder ``N(z) + εMz`` and solve the linear system.

    The system matrix never changes, so it is factorized once. A step that increases
    the residual is damped by halving down to a factor ``1/16`` before giving up.
    The iteration budget is ``max_iter·⌈1/√α⌉``, and at least ``max_iter``.
    """

    def budget(self, alpha: float) -> int:
        """Iteration budget for the Tikhonov parameter ``alpha``."""
        return self.max_iter * max(1, ceil(1 / sqrt(alpha)))

    def _iterate(self, system: ClampedSystem) -> tuple[ndarray, ndarray, list[float]]:
        solver = self._linear_solver(system.linear_matrix())
        u, z = self._initial_guess(system, solver)
        history = [system.residual(u, z)]
        first = -system.eps * system.F
        budget = self.budget(system.problem.alpha)
        while history[-1] > self.tol:
            if len(history) > budget:
                raise self._fail(history, "did not converge")
            remainder = system.clamped(z) + system.eps * (system.M @ z)
            u_next, z_next = system.split(solver.solve(concatenate([first, remainder])))
            damping = 1.0
            while True:
                u_try = u + damping * (u_next - u)
                z_try = z + damping * (z_next - z)
                residual = system.residual(u_try, z_try)
                if residual <= history[-1] or damping <= MIN_DAMPING:
                    break
                damping /= 2
            if residual > history[-1]:
                raise self._fail(history, "diverged")
            u, z = u_try, z_try
            history.append(residual)
        return u, z, history


class SemismoothNewtonSolver(BoxConstrainedSolver):
    """Newton iteration with the active-set derivative of the clamp.

    The derivative of the clamp is one on the inactive set and zero on the active set
    (kinks included), so the Jacobian is ``[[−εM, K], [K, εM_I]]``. Steps are halved
    down to ``1/16`` while they do not reduce the residual; if none does, the full
    step is taken.
    """

    def _iterate(self, system: ClampedSystem) -> tuple[ndarray, ndarray, list[float]]:
        u, z = self._initial_guess(system, self._linear_solver(system.linear_matrix()))
        history = [system.residual(u, z)]
        while history[-1] > self.tol:
            if len(history) > self.max_iter:
                raise self._fail(history, "did not converge")
            jacobian = system.linear_matrix(system.inactive_mass(z))
            step = self._linear_solver(jacobian).solve(-system.residual_vector(u, z))
            du, dz = system.split(step)
            damping = 1.0
            while True:
                residual = system.residual(u + damping * du, z + damping * dz)
                if residual < history[-1] or damping <= MIN_DAMPING:
                    break
                damping /= 2
            if residual >= history[-1]:
                damping = 1.0
                residual = system.residual(u + du, z + dz)
            u, z = u + damping * du, z + damping * dz
            history.append(residual)
        return u, z, history


METHODS: dict[str, type[BoxConstrainedSolver]] = {
    "fixed-point": FixedPointSolver,
    "ssn": SemismoothNewtonSolver,
    "semismooth-newton": SemismoothNewtonSolver,
}


def solve_box_constrained(
    mesh: TriMesh,
    dofs: DofMap,
    problem: ModelProblem,
    method: str = "ssn",
    tol: float = 1e-10,
    max_iter: int = 50,
    *,
    linear_solver: str = "direct",
    fallback: bool = True,
) -> DiscreteSolution:
    """Solve the box-constrained system with the named method.

    Args:
        mesh: triangulation.
        dofs: interior dof map.
        problem: model problem with control bounds.
        method: ``"ssn"`` (semismooth Newton) or ``"fixed-point"``.
        tol: absolute tolerance on the Euclidean residual.
        max_iter: nonlinear iteration budget.
        linear_solver: inner linear solver method.
        fallback: restart with semismooth Newton when the fixed-point iteration
            exhausts its budget.

    Raises:
        ConvergenceError: if the (last) solver does not reach ``tol``.
    """
    if not isinstance(method, str):
        raise TypeError(f"Invalid method type `{type(method)}`, expected str.")
    key = method.strip().lower().replace("_", "-")
    if key not in METHODS:
        raise ValueError(
            f"Unknown constrained method `{method!r}`, expected one of {tuple(METHODS)}."
        )
    solver = METHODS[key](tol=tol, max_iter=max_iter, linear_solver=linear_solver)
    try:
        return solver.solve(mesh, dofs, problem)
    except ConvergenceError as error:
        if not fallback or isinstance(solver, SemismoothNewtonSolver):
            raise
        logger.warning("%s Falling back to semismooth Newton.", error)
    newton = SemismoothNewtonSolver(tol=tol, max_iter=max_iter, linear_solver=linear_solver)
    return newton.solve(mesh, dofs, problem)
