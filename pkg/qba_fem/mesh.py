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

"""Conforming P1 triangulations of the unit square.

Meshes are immutable: coordinate and connectivity arrays are stored read-only,
and refinement returns a new mesh that remembers its parent together with the
(exact) nested interpolation matrix from the parent's vertices to its own.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from os import PathLike

from numpy import (
    abs as np_abs,
    arange,
    array,
    concatenate,
    flatnonzero,
    full,
    hypot,
    meshgrid,
    ndarray,
    ones,
    savetxt,
    sort,
    stack,
    unique,
    zeros,
)
from scipy.sparse import coo_matrix, csr_matrix, identity

from .utils.typing import isinteger

logger = logging.getLogger(__name__)

BOUNDARY_TOL: float = 1e-14


################################################################################
## DATA TYPES
################################################################################
@dataclass(frozen=True, eq=False)
class TriMesh:
    """Conforming triangulation of the unit square.

    Args:
        vertices: ``(n_vertices, 2)`` coordinates in ``[0, 1]²``.
        triangles: ``(n_triangles, 3)`` counterclockwise vertex-index triples.
        level: refinement generation.
        parent: mesh this one was refined from (if any).
        prolongation_from_parent: ``(n_vertices, parent.n_vertices)`` nodal
            interpolation matrix from the parent's P1 space.
    """

    vertices: ndarray
    triangles: ndarray
    level: int = 0
    parent: TriMesh | None = field(default=None, repr=False)
    prolongation_from_parent: csr_matrix | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        vertices = array(self.vertices, dtype=float)
        triangles = array(self.triangles, dtype=int)
        self._validate_arrays(vertices, triangles)
        self._validate_level(self.level)
        vertices.setflags(write=False)
        triangles.setflags(write=False)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "triangles", triangles)
        if (self.areas <= 0).any():
            bad = int(flatnonzero(self.areas <= 0)[0])
            raise ValueError(f"Triangle `{bad}` has non-positive signed area.")

    ################################################################################
    ## PROPERTIES
    ################################################################################
    @property
    def n_vertices(self) -> int:
        """Number of vertices."""
        return self.vertices.shape[0]

    @property
    def n_triangles(self) -> int:
        """Number of triangles."""
        return self.triangles.shape[0]

    @cached_property
    def corners(self) -> ndarray:
        """Vertex coordinates per triangle, shape ``(n_triangles, 3, 2)``."""
        corners = self.vertices[self.triangles]
        corners.setflags(write=False)
        return corners

    @cached_property
    def areas(self) -> ndarray:
        """Signed triangle areas (positive for counterclockwise triangles)."""
        p = self.vertices[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        areas = 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
        areas.setflags(write=False)
        return areas

    @cached_property
    def edge_lengths(self) -> ndarray:
        """Lengths of the edges opposite to each local vertex, shape ``(n_triangles, 3)``."""
        p = self.corners
        lengths = stack(
            [
                hypot(*(p[:, 2] - p[:, 1]).T),
                hypot(*(p[:, 0] - p[:, 2]).T),
                hypot(*(p[:, 1] - p[:, 0]).T),
            ],
            axis=1,
        )
        lengths.setflags(write=False)
        return lengths

    @cached_property
    def h(self) -> float:
        """Meshsize: longest edge length."""
        return float(self.edge_lengths.max())

    @cached_property
    def boundary_mask(self) -> ndarray:
        """Per-vertex flag, true iff the vertex lies on the boundary of the unit square."""
        x, y = self.vertices.T
        mask = (
            (np_abs(x) <= BOUNDARY_TOL)
            | (np_abs(x - 1) <= BOUNDARY_TOL)
            | (np_abs(y) <= BOUNDARY_TOL)
            | (np_abs(y - 1) <= BOUNDARY_TOL)
        )
        mask.setflags(write=False)
        return mask

    ################################################################################
    ## VALIDATION
    ################################################################################
    @staticmethod
    def _validate_arrays(vertices: ndarray, triangles: ndarray) -> None:
        if vertices.ndim != 2 or vertices.shape[1] != 2:
            raise ValueError(f"Vertices must have shape `(n, 2)`, not `{vertices.shape}`.")
        if triangles.ndim != 2 or triangles.shape[1] != 3:
            raise ValueError(f"Triangles must have shape `(m, 3)`, not `{triangles.shape}`.")
        if triangles.size and (triangles.min() < 0 or triangles.max() >= len(vertices)):
            raise ValueError("Triangle vertex indices out of range.")

    @staticmethod
    def _validate_level(level: int) -> None:
        if not isinteger(level):
            raise TypeError(f"Invalid level type `{type(level)}`, expected int.")
        if level < 0:
            raise ValueError(f"Refinement level must be non-negative, not `{level}`.")


@dataclass(frozen=True, eq=False)
class DofMap:
    """Bijection between interior vertices and degree-of-freedom indices.

    Args:
        dof_to_vertex: vertex index of each dof, increasing.
        n_vertices: number of mesh vertices.
    """

    dof_to_vertex: ndarray
    n_vertices: int

    def __post_init__(self) -> None:
        dof_to_vertex = array(self.dof_to_vertex, dtype=int)
        dof_to_vertex.setflags(write=False)
        object.__setattr__(self, "dof_to_vertex", dof_to_vertex)

    @property
    def n_dof(self) -> int:
        """Number of degrees of freedom."""
        return self.dof_to_vertex.shape[0]

    @cached_property
    def vertex_to_dof(self) -> ndarray:
        """Dof index of each vertex, ``-1`` on the boundary."""
        vertex_to_dof = full(self.n_vertices, -1, dtype=int)
        vertex_to_dof[self.dof_to_vertex] = arange(self.n_dof)
        vertex_to_dof.setflags(write=False)
        return vertex_to_dof

    def extend(self, values: ndarray) -> ndarray:
        """Vertex values of a dof vector, zero on the boundary."""
        values = self._validate_dof_vector(values)
        out = zeros(self.n_vertices)
        out[self.dof_to_vertex] = values
        return out

    def restrict(self, values: ndarray) -> ndarray:
        """Dof vector from vertex values (boundary values dropped)."""
        values = array(values, dtype=float)
        if values.shape != (self.n_vertices,):
            raise ValueError(
                f"Expected `{self.n_vertices}` vertex values, received shape `{values.shape}`."
            )
        return values[self.dof_to_vertex]

    def _validate_dof_vector(self, values: ndarray) -> ndarray:
        values = array(values, dtype=float)
        if values.shape != (self.n_dof,):
            raise ValueError(
                f"Expected `{self.n_dof}` dof values, received shape `{values.shape}`."
            )
        return values


################################################################################
## CONSTRUCTION
################################################################################
def build_uniform_unit_square(n: int) -> TriMesh:
    """Uniform ``n × n`` grid of squares, each split along its lower-left diagonal.

    >>> mesh = build_uniform_unit_square(2)
    >>> mesh.n_vertices, mesh.n_triangles
    (9, 8)
    """
    if not isinteger(n):
        raise TypeError(f"Invalid grid size type `{type(n)}`, expected int.")
    n = int(n)
    if n < 1:
        raise ValueError(f"Grid size must be at least 1, not `{n}`.")
    coords = arange(n + 1) / n
    x, y = meshgrid(coords, coords)
    vertices = stack([x.ravel(), y.ravel()], axis=1)
    i, j = meshgrid(arange(n), arange(n))
    v00 = (j * (n + 1) + i).ravel()
    v10 = v00 + 1
    v01 = v00 + n + 1
    v11 = v01 + 1
    lower = stack([v00, v10, v11], axis=1)
    upper = stack([v00, v11, v01], axis=1)
    triangles = stack([lower, upper], axis=1).reshape(-1, 3)
    return TriMesh(vertices, triangles)


def refine_uniform(mesh: TriMesh) -> TriMesh:
    """Split every triangle into four congruent children through its edge midpoints."""
    tri = mesh.triangles
    n_tri = mesh.n_triangles
    edges = concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])
    edges, inverse = unique(sort(edges, axis=1), axis=0, return_inverse=True)
    midpoint = mesh.n_vertices + inverse.reshape(-1)
    m_ab, m_bc, m_ca = midpoint[:n_tri], midpoint[n_tri : 2 * n_tri], midpoint[2 * n_tri :]
    a, b, c = tri.T
    children = stack(
        [
            stack([a, m_ab, m_ca], axis=1),
            stack([m_ab, b, m_bc], axis=1),
            stack([m_ca, m_bc, c], axis=1),
            stack([m_ab, m_bc, m_ca], axis=1),
        ],
        axis=1,
    ).reshape(-1, 3)
    vertices = concatenate(
        [mesh.vertices, 0.5 * (mesh.vertices[edges[:, 0]] + mesh.vertices[edges[:, 1]])]
    )
    n_old, n_edges = mesh.n_vertices, edges.shape[0]
    rows = concatenate([arange(n_old), n_old + arange(n_edges), n_old + arange(n_edges)])
    cols = concatenate([arange(n_old), edges[:, 0], edges[:, 1]])
    vals = concatenate([ones(n_old), full(2 * n_edges, 0.5)])
    prolongation = coo_matrix((vals, (rows, cols)), shape=(n_old + n_edges, n_old)).tocsr()
    return TriMesh(
        vertices,
        children,
        level=mesh.level + 1,
        parent=mesh,
        prolongation_from_parent=prolongation,
    )


def mesh_hierarchy(max_level: int, min_level: int = 0) -> tuple[TriMesh, ...]:
    """Nested meshes of levels ``min_level..max_level`` refined from the one-square mesh.

    Level ``L`` has meshsize ``√2 / 2**L`` and ``(2**L - 1)**2`` interior vertices.
    """
    for name, value in (("max_level", max_level), ("min_level", min_level)):
        if not isinteger(value):
            raise TypeError(f"Invalid `{name}` type `{type(value)}`, expected int.")
    if not 0 <= min_level <= max_level:
        raise ValueError(f"Invalid level range `{min_level}:{max_level}`.")
    mesh = build_uniform_unit_square(1)
    hierarchy = [mesh]
    for _ in range(int(max_level)):
        mesh = refine_uniform(mesh)
        hierarchy.append(mesh)
    logger.debug("Built mesh hierarchy up to level %d (%d vertices)", max_level, mesh.n_vertices)
    return tuple(hierarchy[int(min_level) :])


def interior_dof_map(mesh: TriMesh) -> DofMap:
    """Number the interior vertices in increasing vertex-index order."""
    return DofMap(flatnonzero(~mesh.boundary_mask), mesh.n_vertices)


################################################################################
## NESTED SPACES
################################################################################
def vertex_prolongation(coarse: TriMesh, fine: TriMesh) -> csr_matrix:
    """Nodal interpolation matrix from the P1 space of ``coarse`` to that of ``fine``.

    Raises:
        ValueError: if ``coarse`` is not an ancestor of (or equal to) ``fine``.
    """
    factors = []
    current = fine
    while current is not coarse:
        if current.parent is None:
            raise ValueError("Coarse mesh is not an ancestor of the fine mesh.")
        factors.append(current.prolongation_from_parent)
        current = current.parent
    matrix = identity(fine.n_vertices, format="csr")
    for factor in factors:
        matrix = matrix @ factor
    return matrix.tocsr()


def prolongation(coarse: TriMesh, fine: TriMesh) -> csr_matrix:
    """Interpolation matrix between interior dofs, shape ``(fine dofs, coarse dofs)``."""
    full_matrix = vertex_prolongation(coarse, fine)
    rows = interior_dof_map(fine).dof_to_vertex
    cols = interior_dof_map(coarse).dof_to_vertex
    return full_matrix[rows][:, cols].tocsr()


################################################################################
## QUALITY CHECKS
################################################################################
def is_conforming(mesh: TriMesh) -> bool:
    """Check that interior edges are shared by exactly two triangles.

    Edges with a single neighbouring triangle must lie on the boundary of the square.
    """
    tri = mesh.triangles
    edges = sort(concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]]), axis=1)
    edges, counts = unique(edges, axis=0, return_counts=True)
    if (counts > 2).any():
        return False
    lonely = edges[counts == 1]
    midpoints = 0.5 * (mesh.vertices[lonely[:, 0]] + mesh.vertices[lonely[:, 1]])
    on_boundary = (
        (np_abs(midpoints) <= BOUNDARY_TOL) | (np_abs(midpoints - 1) <= BOUNDARY_TOL)
    ).any(axis=1)
    return bool(on_boundary.all())


def shape_regularity(mesh: TriMesh) -> float:
    """Largest ratio of longest edge to inradius over all triangles."""
    perimeters = mesh.edge_lengths.sum(axis=1)
    inradii = 2 * mesh.areas / perimeters
    return float((mesh.edge_lengths.max(axis=1) / inradii).max())


def dump_mesh(mesh: TriMesh, path: str | PathLike) -> None:
    """Write ``mesh`` in plain text.

    Header ``n_vertices n_triangles``, then one ``x y boundary_flag`` line per vertex
    and one ``i j k`` line per triangle.
    """
    flags = mesh.boundary_mask.astype(int)
    with open(path, "w", encoding="utf8") as fp:  # pylint: disable=invalid-name
        fp.write(f"{mesh.n_vertices} {mesh.n_triangles}\n")
        for (x, y), flag in zip(mesh.vertices, flags):
            fp.write(f"{float(x)!r} {float(y)!r} {int(flag)}\n")
        savetxt(fp, mesh.triangles, fmt="%d")
