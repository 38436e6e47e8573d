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

"""Discrete norms, constrained metrics and Ritz projections."""

from __future__ import annotations

from math import sqrt

from numpy import array, ndarray
from scipy.sparse import csr_matrix

from ..fem import (
    ScalarField,
    assemble_load,
    assemble_mass,
    assemble_stiffness,
    barycentric_gradients,
    clamped_difference_l2,
    triangle_rule,
    validate_box,
)
from ..fem.assembly import accumulate_vertex_values, validate_dofs
from ..fem.quadrature import physical_points
from ..linalg import solve_spd
from ..mesh import DofMap, TriMesh
from ..optsys import POINCARE_CONSTANT
from ..utils.typing import ispositive

Pair = tuple[ndarray, ndarray]


class DiscreteNorms:
    """Norms of dof vectors and pairs ``v = (v₁, v₂)`` on one mesh.

    Args:
        K: stiffness matrix (H¹-seminorm).
        M: mass matrix (L² norm).
        G: Gram matrix of the control action (defaults to ``M``).
        alpha: Tikhonov parameter of ``‖·‖_α``.
        M_bound: bound ``M`` on the observation and control-action norms.
        M_a: continuity constant of the constraint form.
    """

    def __init__(
        self,
        K: csr_matrix,  # pylint: disable=invalid-name
        M: csr_matrix,  # pylint: disable=invalid-name
        G: csr_matrix | None = None,  # pylint: disable=invalid-name
        *,
        alpha: float = 1.0,
        M_bound: float = POINCARE_CONSTANT,  # pylint: disable=invalid-name
        M_a: float = 1.0,  # pylint: disable=invalid-name
    ) -> None:
        G = M if G is None else G
        if not K.shape == M.shape == G.shape or K.shape[0] != K.shape[1]:
            raise ValueError(f"Mismatching matrix shapes `{K.shape}`, `{M.shape}`, `{G.shape}`.")
        if not ispositive(alpha):
            raise ValueError(f"Tikhonov parameter must be positive, not `{alpha!r}`.")
        self.K, self.M, self.G = K, M, G
        self.alpha: float = float(alpha)
        self.M_bound: float = float(M_bound)
        self.M_a: float = float(M_a)

    ################################################################################
    ## SINGLE COMPONENT
    ################################################################################
    def h1(self, v: ndarray) -> float:
        """H¹-seminorm ``(vᵀKv)^{1/2}``."""
        return _quadratic(self.K, v)

    def l2(self, v: ndarray) -> float:
        """L² norm ``(vᵀMv)^{1/2}``."""
        return _quadratic(self.M, v)

    def control(self, v: ndarray) -> float:
        """Norm of the control action ``(vᵀGv)^{1/2}``."""
        return _quadratic(self.G, v)

    ################################################################################
    ## PAIRS
    ################################################################################
    def product(self, v: Pair) -> float:
        """Product norm ``(|v₁|²_{H¹} + |v₂|²_{H¹})^{1/2}``."""
        return sqrt(self.h1(v[0]) ** 2 + self.h1(v[1]) ** 2)

    def energy(self, v: Pair) -> float:
        """Seminorm ``(‖v₁‖² + ‖C*v₂‖²)^{1/2}``."""
        return sqrt(self.l2(v[0]) ** 2 + self.control(v[1]) ** 2)

    def alpha_norm(self, v: Pair) -> float:
        """Test norm ``M_a‖v‖ + (M/√α)|v|``."""
        return self.M_a * self.product(v) + self.M_bound / sqrt(self.alpha) * self.energy(v)


def norms(
    mesh: TriMesh,
    dofs: DofMap,
    K: csr_matrix | None = None,  # pylint: disable=invalid-name
    M: csr_matrix | None = None,  # pylint: disable=invalid-name
    G: csr_matrix | None = None,  # pylint: disable=invalid-name
    **kwargs,
) -> DiscreteNorms:
    """Norm evaluators on ``mesh``, assembling any matrix not provided."""
    validate_dofs(mesh, dofs)
    K = assemble_stiffness(mesh, dofs) if K is None else K
    M = assemble_mass(mesh, dofs) if M is None else M
    if K.shape != (dofs.n_dof, dofs.n_dof):
        raise ValueError(f"Matrix shape `{K.shape}` does not match `{dofs.n_dof}` dofs.")
    return DiscreteNorms(K, M, G, **kwargs)


################################################################################
## CONSTRAINED METRICS
################################################################################
class ConstrainedMetrics:
    """Pseudometric ``δ_{K,α}`` and metric ``d_{K,α}`` of the box-constrained problem.

    ``δ(v, w)² = α‖Π(−v₂/√α) − Π(−w₂/√α)‖² + ‖v₁ − w₁‖²`` with exact integration of the
    clamped difference, and ``d(v, w) = M_a‖v − w‖ + (M/√α) δ(v, w)``.
    """

    def __init__(
        self,
        mesh: TriMesh,
        dofs: DofMap,
        alpha: float,
        box: tuple[float, float],
        *,
        M_bound: float = POINCARE_CONSTANT,  # pylint: disable=invalid-name
        M_a: float = 1.0,  # pylint: disable=invalid-name
    ) -> None:
        lo, hi = box
        validate_box(lo, hi)
        self.mesh: TriMesh = mesh
        self.dofs: DofMap = dofs
        self.box: tuple[float, float] = (float(lo), float(hi))
        self.norms: DiscreteNorms = norms(mesh, dofs, alpha=alpha, M_bound=M_bound, M_a=M_a)

    @property
    def alpha(self) -> float:
        """Tikhonov parameter."""
        return self.norms.alpha

    def delta(self, v: Pair, w: Pair) -> float:
        """``δ_{K,α}(v, w)``."""
        clamped = clamped_difference_l2(self.mesh, self.dofs, v[1], w[1], self.alpha, *self.box)
        state = self.norms.l2(array(v[0]) - array(w[0]))
        return sqrt(self.alpha * clamped**2 + state**2)

    def distance(self, v: Pair, w: Pair) -> float:
        """``d_{K,α}(v, w)``."""
        difference = (array(v[0]) - array(w[0]), array(v[1]) - array(w[1]))
        return self.norms.M_a * self.norms.product(difference) + (
            self.norms.M_bound / sqrt(self.alpha)
        ) * self.delta(v, w)


def metrics_constrained(
    mesh: TriMesh, dofs: DofMap, alpha: float, box: tuple[float, float], **kwargs
) -> ConstrainedMetrics:
    """Constrained metric evaluators bound to ``mesh``."""
    return ConstrainedMetrics(mesh, dofs, alpha, box, **kwargs)


################################################################################
## RITZ PROJECTION
################################################################################
def ritz_projection(
    mesh: TriMesh,
    dofs: DofMap,
    exact: ScalarField,
    tol: float = 1e-12,
    *,
    K: csr_matrix | None = None,  # pylint: disable=invalid-name
) -> ndarray:
    """Galerkin projection ``R`` with ``a(R, φ) = a(exact, φ)`` for all discrete ``φ``.

    The right-hand side is the load of ``−Δ exact`` when the Laplacian is known, and
    ``∫ ∇exact · ∇φ`` (degree-7 quadrature) otherwise.
    """
    K = assemble_stiffness(mesh, dofs) if K is None else K
    return solve_spd(K, ritz_rhs(mesh, dofs, exact), tol=tol)


def ritz_rhs(mesh: TriMesh, dofs: DofMap, exact: ScalarField) -> ndarray:
    """Vector ``a(exact, φ_i)``."""
    if exact.has_laplacian:
        minus_laplacian = ScalarField(lambda x, y: -exact.laplacian(x, y), name="-Δf")
        return assemble_load(mesh, dofs, minus_laplacian, quad_order=7)
    if not exact.has_gradient:
        raise ValueError(f"Ritz projection of `{exact.name}` needs its gradient or Laplacian.")
    validate_dofs(mesh, dofs)
    rule = triangle_rule(7)
    x, y = physical_points(mesh.corners, rule)
    gx, gy = exact.gradient(x, y)
    mean_gradient = (
        ((gx * rule.weights).sum(axis=1) * mesh.areas)[:, None],
        ((gy * rule.weights).sum(axis=1) * mesh.areas)[:, None],
    )
    grads = barycentric_gradients(mesh)
    local = mean_gradient[0] * grads[..., 0] + mean_gradient[1] * grads[..., 1]
    return dofs.restrict(accumulate_vertex_values(mesh, local))


def _quadratic(matrix: csr_matrix, v: ndarray) -> float:
    v = array(v, dtype=float)
    return sqrt(max(float(v @ (matrix @ v)), 0.0))
