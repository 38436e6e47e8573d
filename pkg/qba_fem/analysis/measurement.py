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

"""Error measurement against manufactured solutions."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from math import hypot, isclose, sqrt

from numpy import einsum, ndarray

from ..fem import (
    ScalarField,
    assemble_stiffness,
    element_gradients,
    element_values,
    triangle_rule,
)
from ..fem.assembly import validate_dofs
from ..fem.quadrature import physical_points
from ..linalg import generalized_eig_max
from ..mesh import DofMap, TriMesh, interior_dof_map, prolongation
from ..optsys import DiscreteSolution
from .constants import constants_bundle
from .manufactured import ManufacturedCase
from .norms import ritz_projection

logger = logging.getLogger(__name__)

ERROR_QUADRATURE: int = 7
DEGENERATE_BEST: float = 1e-13
MIN_REFERENCE_GAP: int = 2


@dataclass(frozen=True)
class ErrorReport:
    """One row of a convergence table."""

    level: int
    h: float
    err_u_h1: float
    err_z_h1: float
    err_u_l2: float
    err_combined: float
    err_enorm: float
    best_combined: float
    nu_measured: float
    degenerate: bool
    kappa_h_bound: float
    consistency_gap: float = 0.0

    @property
    def nu_minus_1(self) -> float:
        """Excess of the measured quasi-best constant over one."""
        return self.nu_measured - 1

    def asdict(self) -> dict:
        """Fields and derived values by name."""
        values = asdict(self)
        values["nu_minus_1"] = self.nu_minus_1
        return values


################################################################################
## FIELD ERRORS
################################################################################
def h1_error(mesh: TriMesh, dofs: DofMap, v: ndarray, exact: ScalarField) -> float:
    """``|exact − v_h|_{H¹}`` with the degree-7 rule and the exact gradient."""
    validate_dofs(mesh, dofs)
    rule = triangle_rule(ERROR_QUADRATURE)
    x, y = physical_points(mesh.corners, rule)
    gx, gy = exact.gradient(x, y)
    grad = element_gradients(mesh, dofs, v)
    dx, dy = gx - grad[:, 0:1], gy - grad[:, 1:2]
    return sqrt(max(float(einsum("q,tq,t->", rule.weights, dx * dx + dy * dy, mesh.areas)), 0.0))


def l2_error(mesh: TriMesh, dofs: DofMap, v: ndarray, exact: ScalarField) -> float:
    """``‖exact − v_h‖_{L²}`` with the degree-7 rule."""
    validate_dofs(mesh, dofs)
    rule = triangle_rule(ERROR_QUADRATURE)
    x, y = physical_points(mesh.corners, rule)
    vq = einsum("qk,tk->tq", rule.points, element_values(mesh, dofs, v))
    d = exact(x, y) - vq
    return sqrt(max(float(einsum("q,tq,t->", rule.weights, d * d, mesh.areas)), 0.0))


################################################################################
## QUASI-BEST CONSTANTS
################################################################################
def measure_nu(
    case: ManufacturedCase,
    mesh: TriMesh,
    dofs: DofMap,
    solution: DiscreteSolution,
    *,
    mu_h: float = 1.0,
    consistency_gap: float = 0.0,
) -> ErrorReport:
    """Compare a discrete solution with the exact one and its best approximation.

    The best approximation in the product H¹-seminorm is the pair of Ritz projections.
    If it vanishes (below ``1e-13``) the ratio is reported as one and flagged degenerate.
    """
    if not isclose(case.alpha, solution.alpha, rel_tol=1e-12):
        raise ValueError(
            f"Case and solution Tikhonov parameters differ: `{case.alpha}` vs `{solution.alpha}`."
        )
    err_u = h1_error(mesh, dofs, solution.u, case.exact_u)
    err_z = h1_error(mesh, dofs, solution.z, case.exact_z)
    err_u_l2 = l2_error(mesh, dofs, solution.u, case.exact_u)
    err_z_l2 = l2_error(mesh, dofs, solution.z, case.exact_z)
    K = assemble_stiffness(mesh, dofs)
    ritz_u = ritz_projection(mesh, dofs, case.exact_u, K=K)
    ritz_z = ritz_projection(mesh, dofs, case.exact_z, K=K)
    best = hypot(
        h1_error(mesh, dofs, ritz_u, case.exact_u), h1_error(mesh, dofs, ritz_z, case.exact_z)
    )
    combined = hypot(err_u, err_z)
    degenerate = best < DEGENERATE_BEST
    nu = 1.0 if degenerate else combined / best
    report = ErrorReport(
        level=mesh.level,
        h=mesh.h,
        err_u_h1=err_u,
        err_z_h1=err_z,
        err_u_l2=err_u_l2,
        err_combined=combined,
        err_enorm=hypot(err_u_l2, err_z_l2),
        best_combined=best,
        nu_measured=nu,
        degenerate=degenerate,
        kappa_h_bound=constants_bundle(case.alpha, mu_h).kappa_h * mu_h,
        consistency_gap=consistency_gap,
    )
    logger.debug("Level %d: nu = %.10f (best %.3e)", mesh.level, nu, best)
    return report


def mu_h_compute(mesh_coarse: TriMesh, mesh_reference: TriMesh) -> float:
    """Quasi-best constant of the constraint Galerkin projection for the adjoint norm.

    The continuous supremum is replaced by the supremum over the P1 space of
    ``mesh_reference``, at least two refinements finer than ``mesh_coarse``.
    """
    gap = mesh_reference.level - mesh_coarse.level
    if gap < MIN_REFERENCE_GAP:
        raise ValueError(
            f"Reference mesh must be at least {MIN_REFERENCE_GAP} refinements finer, got `{gap}`."
        )
    P = prolongation(mesh_coarse, mesh_reference)
    K_ref = assemble_stiffness(mesh_reference, interior_dof_map(mesh_reference))
    K_h = assemble_stiffness(mesh_coarse, interior_dof_map(mesh_coarse))
    return sqrt(generalized_eig_max((P.T @ K_ref @ P).tocsr(), K_h))
