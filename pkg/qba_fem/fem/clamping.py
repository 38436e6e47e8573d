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

"""Exact integration of clamped P1 functions.

The control recovered from a discrete adjoint ``z_h`` is the pointwise clamp of the
affine-per-triangle function ``g = −z_h/√α`` onto a box ``[q_lo, q_hi]``. Triangles
crossed by the level sets ``g = q_lo`` or ``g = q_hi`` are cut into convex pieces on
which every integrand of interest is a polynomial of degree at most two, so the
degree-2 rule applied to a fan triangulation of the pieces is exact.
"""

from __future__ import annotations

from collections import namedtuple
from collections.abc import Sequence
from math import sqrt

from numpy import (
    abs as np_abs,
    array,
    broadcast_to,
    clip,
    concatenate,
    einsum,
    eye,
    flatnonzero,
    ndarray,
    ones,
    stack,
    zeros,
)
from scipy.sparse import csr_matrix

from ..mesh import DofMap, TriMesh
from ..utils.typing import isinterval, ispositive, isreal
from .assembly import accumulate_vertex_values, assemble_from_local, element_values, validate_dofs
from .quadrature import triangle_rule

Subdivision = namedtuple("Subdivision", ("parents", "vertices", "fractions"))
Subdivision.__doc__ = """Pieces of a triangulation cut along level sets.

Fields:
    parents: ``(n_pieces,)`` index of the triangle each piece belongs to.
    vertices: ``(n_pieces, 3, 3)`` barycentric coordinates (w.r.t. the parent) of the
        piece corners.
    fractions: ``(n_pieces,)`` piece area divided by parent area.
"""


################################################################################
## SUBDIVISION
################################################################################
def subdivide(values: Sequence[ndarray], levels: Sequence[Sequence[float]]) -> Subdivision:
    """Cut triangles along the level sets of several affine functions.

    Args:
        values: vertex values ``(n_triangles, 3)`` of each affine function.
        levels: for each function, the levels to cut along.

    Returns:
        Pieces such that every function lies on one side of each of its levels
        within every piece. Uncut triangles come first, as single pieces, in
        triangle order.
    """
    if len(values) != len(levels):
        raise ValueError("Expected one sequence of levels per function.")
    n_tri = values[0].shape[0]
    crossing = zeros(n_tri, dtype=bool)
    for g, cuts in zip(values, levels):
        g_min, g_max = g.min(axis=1), g.max(axis=1)
        for c in cuts:
            crossing |= (g_min < c) & (c < g_max)
    plain = flatnonzero(~crossing)
    parents = [plain]
    corners = [broadcast_to(eye(3), (plain.size, 3, 3))]
    for t in flatnonzero(crossing):
        pieces = _split_triangle([g[t] for g in values], levels)
        parents.append(array([t] * len(pieces), dtype=int))
        corners.append(array(pieces).reshape(-1, 3, 3))
    vertices = concatenate(corners)
    d1 = vertices[:, 1, 1:] - vertices[:, 0, 1:]
    d2 = vertices[:, 2, 1:] - vertices[:, 0, 1:]
    fractions = np_abs(d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
    return Subdivision(concatenate(parents), vertices, fractions)


def _split_triangle(values: Sequence[ndarray], levels: Sequence[Sequence[float]]) -> list:
    polygons = [eye(3)]
    for g, cuts in zip(values, levels):
        for c in cuts:
            if not g.min() < c < g.max():
                continue
            cut_polygons = []
            for polygon in polygons:
                s = polygon @ g - c
                if s.min() >= 0 or s.max() <= 0:
                    cut_polygons.append(polygon)
                    continue
                cut_polygons.extend(p for p in _clip_polygon(polygon, s) if len(p) >= 3)
            polygons = cut_polygons
    return [
        stack([polygon[0], polygon[k], polygon[k + 1]])
        for polygon in polygons
        for k in range(1, len(polygon) - 1)
    ]


def _clip_polygon(polygon: ndarray, s: ndarray) -> tuple[ndarray, ndarray]:
    """Split a convex polygon into its ``s <= 0`` and ``s >= 0`` parts (Sutherland-Hodgman)."""
    below, above = [], []
    n = len(polygon)
    for i in range(n):
        j = (i + 1) % n
        if s[i] <= 0:
            below.append(polygon[i])
        if s[i] >= 0:
            above.append(polygon[i])
        if (s[i] < 0 < s[j]) or (s[j] < 0 < s[i]):
            t = s[i] / (s[i] - s[j])
            cut = polygon[i] + t * (polygon[j] - polygon[i])
            below.append(cut)
            above.append(cut)
    return array(below), array(above)


def _piece_quadrature(mesh: TriMesh, pieces: Subdivision, degree: int) -> tuple[ndarray, ndarray]:
    """Barycentric points ``(n_pieces, n_q, 3)`` and weights ``(n_pieces, n_q)`` on pieces."""
    rule = triangle_rule(degree)
    points = einsum("qk,mkj->mqj", rule.points, pieces.vertices)
    weights = rule.weights[None, :] * (mesh.areas[pieces.parents] * pieces.fractions)[:, None]
    return points, weights


def _whole_triangles(mesh: TriMesh) -> Subdivision:
    n_tri = mesh.n_triangles
    return Subdivision(
        array(range(n_tri), dtype=int), broadcast_to(eye(3), (n_tri, 3, 3)), ones(n_tri)
    )


################################################################################
## CLAMPED CONTROL
################################################################################
def assemble_clamped_term(
    mesh: TriMesh,
    dofs: DofMap,
    z: ndarray,
    alpha: float,
    q_lo: float,
    q_hi: float,
    *,
    exact: bool = True,
) -> ndarray:
    """Vector ``N(z)_i = ∫ clamp(−z_h/√α, q_lo, q_hi) φ_i``.

    Args:
        mesh: triangulation.
        dofs: interior dof map.
        z: dof coefficients of the rescaled adjoint.
        alpha: Tikhonov parameter.
        q_lo: lower bound of the box (``-1e308`` for none).
        q_hi: upper bound of the box (``1e308`` for none).
        exact: integrate piecewise (exact) or with the degree-7 rule on whole
            triangles (cross-check only).
    """
    g = _control_values(mesh, dofs, z, alpha, q_lo, q_hi)
    if exact:
        pieces = subdivide([g], [(q_lo, q_hi)])
        points, weights = _piece_quadrature(mesh, pieces, 2)
    else:
        pieces = _whole_triangles(mesh)
        points, weights = _piece_quadrature(mesh, pieces, 7)
    gq = einsum("mqj,mj->mq", points, g[pieces.parents])
    local = einsum("mq,mqj->mj", weights * clip(gq, q_lo, q_hi), points)
    connectivity = mesh.triangles[pieces.parents]
    return dofs.restrict(accumulate_vertex_values(mesh, local, connectivity))


def assemble_inactive_mass(
    mesh: TriMesh,
    dofs: DofMap,
    z: ndarray,
    alpha: float,
    q_lo: float,
    q_hi: float,
) -> csr_matrix:
    """Mass matrix restricted to the inactive set ``{q_lo < −z_h/√α < q_hi}``.

    Kinks (the level sets themselves) belong to the active set.
    """
    g = _control_values(mesh, dofs, z, alpha, q_lo, q_hi)
    pieces = subdivide([g], [(q_lo, q_hi)])
    points, weights = _piece_quadrature(mesh, pieces, 2)
    centroid = einsum("mj,mj->m", pieces.vertices.mean(axis=1), g[pieces.parents])
    inactive = (q_lo < centroid) & (centroid < q_hi)
    local = einsum("mq,mqi,mqj->mij", weights * inactive[:, None], points, points)
    return assemble_from_local(mesh, dofs, local, mesh.triangles[pieces.parents])


def inactive_fraction(
    mesh: TriMesh,
    dofs: DofMap,
    z: ndarray,
    alpha: float,
    q_lo: float,
    q_hi: float,
) -> float:
    """Area of the inactive set ``{q_lo < −z_h/√α < q_hi}``."""
    g = _control_values(mesh, dofs, z, alpha, q_lo, q_hi)
    pieces = subdivide([g], [(q_lo, q_hi)])
    centroid = einsum("mj,mj->m", pieces.vertices.mean(axis=1), g[pieces.parents])
    inactive = (q_lo < centroid) & (centroid < q_hi)
    return float((mesh.areas[pieces.parents] * pieces.fractions * inactive).sum())


def clamped_difference_l2(
    mesh: TriMesh,
    dofs: DofMap,
    z1: ndarray,
    z2: ndarray,
    alpha: float,
    q_lo: float,
    q_hi: float,
) -> float:
    """Exact ``‖clamp(−z1_h/√α) − clamp(−z2_h/√α)‖`` in L²."""
    g1 = _control_values(mesh, dofs, z1, alpha, q_lo, q_hi)
    g2 = _control_values(mesh, dofs, z2, alpha, q_lo, q_hi)
    pieces = subdivide([g1, g2], [(q_lo, q_hi), (q_lo, q_hi)])
    points, weights = _piece_quadrature(mesh, pieces, 2)
    d = clip(einsum("mqj,mj->mq", points, g1[pieces.parents]), q_lo, q_hi) - clip(
        einsum("mqj,mj->mq", points, g2[pieces.parents]), q_lo, q_hi
    )
    return sqrt(max(float((weights * d * d).sum()), 0.0))


################################################################################
## AUXILIARY
################################################################################
def validate_box(q_lo: float, q_hi: float) -> None:
    """Reject non-real or inverted bounds (``q_lo == q_hi`` is accepted)."""
    if not isreal(q_lo) or not isreal(q_hi):
        raise TypeError(f"Box bounds must be finite reals, not `({q_lo!r}, {q_hi!r})`.")
    if not isinterval((q_lo, q_hi)):
        raise ValueError(f"Infeasible box: lower bound `{q_lo}` exceeds upper bound `{q_hi}`.")


def _control_values(
    mesh: TriMesh, dofs: DofMap, z: ndarray, alpha: float, q_lo: float, q_hi: float
) -> ndarray:
    validate_dofs(mesh, dofs)
    validate_box(q_lo, q_hi)
    if not ispositive(alpha):
        raise ValueError(f"Tikhonov parameter must be positive, not `{alpha!r}`.")
    return element_values(mesh, dofs, -array(z, dtype=float) / sqrt(alpha))
