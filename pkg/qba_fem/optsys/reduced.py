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

"""Rescaled and reduced optimality system without control bounds.

With ``ε = 1/√α`` the discrete system for ``x = (u, z)`` reads::

    [ −εM   K  ] [u]   [−εF]
    [  K   εM_c] [z] = [ 0 ]

where ``F`` is the load of the desired state and ``M_c`` the mass matrix (exact control
action) or the Gram matrix of the elementwise projection onto constants.
"""

from __future__ import annotations

import logging

from numpy import clip, concatenate, ndarray, sqrt, zeros

from ..fem import assemble_load, assemble_mass, assemble_stiffness, element_means, p0_gram
from ..linalg import BlockSystem, solve_spd, solve_sym_indefinite
from ..mesh import DofMap, TriMesh
from .problem import POINCARE_CONSTANT, ControlVariant, DiscreteSolution, ModelProblem

logger = logging.getLogger(__name__)


def assemble_reduced_system(mesh: TriMesh, dofs: DofMap, problem: ModelProblem) -> BlockSystem:
    """Assemble the symmetric block system of an unconstrained model problem."""
    validate_problem(problem, constrained=False)
    K = assemble_stiffness(mesh, dofs)
    M = assemble_mass(mesh, dofs)
    M_c = M if problem.variant is ControlVariant.FULL else p0_gram(mesh, dofs)
    F = assemble_load(mesh, dofs, problem.u_d)
    eps = problem.epsilon
    rhs = concatenate([-eps * F, zeros(dofs.n_dof)])
    return BlockSystem(-eps * M, K, K, eps * M_c, rhs)


def solve_unconstrained(
    mesh: TriMesh,
    dofs: DofMap,
    problem: ModelProblem,
    tol: float = 1e-10,
    max_iter: int | None = None,
    *,
    method: str = "minres",
) -> DiscreteSolution:
    """Solve the unconstrained system and recover the control from the adjoint."""
    system = assemble_reduced_system(mesh, dofs, problem)
    x = solve_sym_indefinite(system, tol=tol, max_iter=max_iter, method=method)
    u, z = system.split(x)
    residual = system.relative_residual(x)
    logger.debug("Unconstrained solve on level %d: residual %.3e", mesh.level, residual)
    return DiscreteSolution(
        alpha=problem.alpha,
        variant=problem.variant,
        u=u,
        z=z,
        q=recover_control(mesh, dofs, problem, z),
        residual=residual,
    )


def recover_control(mesh: TriMesh, dofs: DofMap, problem: ModelProblem, z: ndarray) -> ndarray:
    """Control from the rescaled adjoint: ``−z/√α``, its element means, or its nodal clamp."""
    q = -problem.epsilon * z
    if problem.box is not None:
        return clip(q, problem.box.lo, problem.box.hi)
    if problem.variant is ControlVariant.P0:
        return element_means(mesh, dofs, q)
    return q


def consistency_gap(
    mesh: TriMesh, dofs: DofMap, problem: ModelProblem, z: ndarray, tol: float = 1e-12
) -> float:
    """Dual norm of the perturbation ``(G − M) z`` of an approximate control action.

    The test norm on the adjoint component is the Hilbert form of
    ``|φ|_{H¹} + (C_F/√α)‖P_h φ‖``, with Gram matrix ``K + (C_F²/α) G``.

    Raises:
        ValueError: for the exact control action, whose gap vanishes identically.
    """
    if not isinstance(problem, ModelProblem):
        raise TypeError(f"Invalid problem type `{type(problem)}`, expected ModelProblem.")
    if problem.variant is ControlVariant.FULL:
        raise ValueError("Consistency gap is identically zero for the full control action.")
    K = assemble_stiffness(mesh, dofs)
    M = assemble_mass(mesh, dofs)
    G = p0_gram(mesh, dofs)
    r = (G - M) @ z
    if not r.any():
        return 0.0
    H = K + (POINCARE_CONSTANT**2 / problem.alpha) * G
    y = solve_spd(H, r, tol=tol)
    return float(sqrt(max(float(r @ y), 0.0)))


def validate_problem(problem: ModelProblem, constrained: bool) -> None:
    """Reject non-problems and mismatched solver entry points."""
    if not isinstance(problem, ModelProblem):
        raise TypeError(f"Invalid problem type `{type(problem)}`, expected ModelProblem.")
    if problem.is_constrained != constrained:
        raise ValueError(
            "Control bounds require the box-constrained solver."
            if problem.is_constrained
            else "Box-constrained solver requires control bounds."
        )

