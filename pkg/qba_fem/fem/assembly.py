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

"""Assembly of P1 matrices and vectors.

All element loops are vectorized over triangles; global accumulation goes through
COO triplets (or ``bincount``) in fixed element order, which keeps the assembled
CSR data bit-reproducible.

Passing ``dofs=None`` to the matrix assemblers yields the full vertex-space matrix
(boundary vertices included).
"""

from __future__ import annotations

from numpy import bincount, broadcast_to, einsum, empty, eye, ndarray, ones
from scipy.sparse import coo_matrix, csr_matrix

from ..exceptions import ZeroDofError
from ..mesh import DofMap, TriMesh
from .fields import ScalarField
from .quadrature import physical_points, triangle_rule

_MASS_PATTERN = (ones((3, 3)) + eye(3)) / 12


################################################################################
## MATRICES
################################################################################
def assemble_stiffness(mesh: TriMesh, dofs: DofMap | None) -> csr_matrix:
    """Stiffness matrix ``K_ij = ∫ ∇φ_j · ∇φ_i`` (exact, gradients are constant)."""
    grads = barycentric_gradients(mesh)
    local = mesh.areas[:, None, None] * einsum("tid,tjd->tij", grads, grads)
    return assemble_from_local(mesh, dofs, local)


def assemble_mass(mesh: TriMesh, dofs: DofMap | None) -> csr_matrix:
    """Mass matrix ``M_ij = ∫ φ_j φ_i`` with the exact local matrix ``|T|/12·(1 + δ_ij)``."""
    local = mesh.areas[:, None, None] * _MASS_PATTERN
    return assemble_from_local(mesh, dofs, local)


def p0_gram(mesh: TriMesh, dofs: DofMap | None) -> csr_matrix:
    """Gram matrix of the elementwise L² projection onto constants.

    ``xᵀ G y = Σ_T |T| mean_T(v) mean_T(w)`` for the P1 functions ``v``, ``w`` with
    coefficients ``x``, ``y``.
    """
    local = mesh.areas[:, None, None] * broadcast_to(ones((3, 3)) / 9, (mesh.n_triangles, 3, 3))
    return assemble_from_local(mesh, dofs, local)


def assemble_load(
    mesh: TriMesh, dofs: DofMap, f: ScalarField, quad_order: int = 4
) -> ndarray:
    """Load vector ``F_i = ∫ f φ_i`` with the symmetric rule of degree ``quad_order``."""
    validate_dofs(mesh, dofs)
    rule = triangle_rule(quad_order)
    x, y = physical_points(mesh.corners, rule)
    local = einsum("q,tq,qk->tk", rule.weights, f(x, y), rule.points) * mesh.areas[:, None]
    return dofs.restrict(accumulate_vertex_values(mesh, local))


################################################################################
## P1 FUNCTIONS
################################################################################
def barycentric_gradients(mesh: TriMesh) -> ndarray:
    """Gradients of the three barycentric coordinates, shape ``(n_triangles, 3, 2)``."""
    p = mesh.corners
    x, y = p[..., 0], p[..., 1]
    area2 = 2 * mesh.areas
    grads = empty((mesh.n_triangles, 3, 2))
    for k in range(3):
        i, j = (k + 1) % 3, (k + 2) % 3
        grads[:, k, 0] = (y[:, i] - y[:, j]) / area2
        grads[:, k, 1] = (x[:, j] - x[:, i]) / area2
    return grads


def interpolate(mesh: TriMesh, dofs: DofMap, field: ScalarField) -> ndarray:
    """Nodal interpolant of ``field`` on the interior vertices."""
    x, y = mesh.vertices[dofs.dof_to_vertex].T
    return field(x, y)


def element_values(mesh: TriMesh, dofs: DofMap, v: ndarray) -> ndarray:
    """Vertex values of a dof vector gathered per triangle, shape ``(n_triangles, 3)``."""
    return dofs.extend(v)[mesh.triangles]


def element_means(mesh: TriMesh, dofs: DofMap, v: ndarray) -> ndarray:
    """Elementwise means of the P1 function with coefficients ``v``."""
    return element_values(mesh, dofs, v).mean(axis=1)


def element_gradients(mesh: TriMesh, dofs: DofMap, v: ndarray) -> ndarray:
    """Constant gradient of a P1 function on each triangle, shape ``(n_triangles, 2)``."""
    return einsum("tk,tkd->td", element_values(mesh, dofs, v), barycentric_gradients(mesh))


def accumulate_vertex_values(
    mesh: TriMesh, local: ndarray, connectivity: ndarray | None = None
) -> ndarray:
    """Sum ``(n_elements, 3)`` local contributions into a vertex vector."""
    tri = mesh.triangles if connectivity is None else connectivity
    return bincount(tri.ravel(), weights=local.ravel(), minlength=mesh.n_vertices).astype(float)


################################################################################
## ACCUMULATION
################################################################################
def assemble_from_local(
    mesh: TriMesh,
    dofs: DofMap | None,
    local: ndarray,
    connectivity: ndarray | None = None,
) -> csr_matrix:
    """Accumulate ``(n_elements, 3, 3)`` local matrices into a global CSR matrix.

    ``connectivity`` maps each local matrix to mesh vertices and defaults to the
    triangles themselves (sub-triangle pieces pass their parents' vertices).
    """
    if dofs is not None:
        validate_dofs(mesh, dofs)
    tri = mesh.triangles if connectivity is None else connectivity
    rows = broadcast_to(tri[:, :, None], local.shape).ravel()
    cols = broadcast_to(tri[:, None, :], local.shape).ravel()
    n_v = mesh.n_vertices
    matrix = coo_matrix((local.ravel(), (rows, cols)), shape=(n_v, n_v)).tocsr()
    if dofs is not None:
        matrix = matrix[dofs.dof_to_vertex][:, dofs.dof_to_vertex].tocsr()
    matrix.sum_duplicates()
    matrix.sort_indices()
    return matrix


def validate_dofs(mesh: TriMesh, dofs: DofMap) -> None:
    """Reject foreign or empty dof maps."""
    if not isinstance(dofs, DofMap):
        raise TypeError(f"Invalid dof map type `{type(dofs)}`, expected DofMap.")
    if dofs.n_vertices != mesh.n_vertices:
        raise ValueError(
            f"Dof map built for `{dofs.n_vertices}` vertices, mesh has `{mesh.n_vertices}`."
        )
    if dofs.n_dof == 0:
        raise ZeroDofError("Mesh has no interior degrees of freedom.")
