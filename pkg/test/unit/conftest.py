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

from pytest import fixture

from qba_fem.analysis import manufactured_eigen_case
from qba_fem.mesh import interior_dof_map, mesh_hierarchy


################################################################################
## FIXTURES
################################################################################
@fixture(scope="session")
def hierarchy():
    """Nested meshes of levels 0 to 5."""
    return mesh_hierarchy(5)


@fixture(scope="session")
def mesh(hierarchy):
    """Level-3 mesh (49 dofs)."""
    return hierarchy[3]


@fixture(scope="session")
def dofs(mesh):
    """Interior dof map of the level-3 mesh."""
    return interior_dof_map(mesh)


@fixture(scope="session")
def small_mesh(hierarchy):
    """Level-2 mesh (9 dofs)."""
    return hierarchy[2]


@fixture(scope="session")
def small_dofs(small_mesh):
    """Interior dof map of the level-2 mesh."""
    return interior_dof_map(small_mesh)


@fixture(scope="session")
def case():
    """Manufactured eigenfunction case with unit Tikhonov parameter."""
    return manufactured_eigen_case(1.0)
