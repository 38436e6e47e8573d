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

from numpy import clip, ones, zeros
from numpy import abs as np_abs
from numpy.testing import assert_allclose
from pytest import approx, fixture, mark, raises

from qba_fem.analysis import manufactured_eigen_case, ritz_projection, zero_data_case
from qba_fem.fem import assemble_mass, assemble_stiffness, element_means, interpolate
from qba_fem.linalg import is_symmetric
from qba_fem.mesh import interior_dof_map
from qba_fem.optsys import (
    ControlVariant,
    ModelProblem,
    assemble_reduced_system,
    consistency_gap,
    recover_control,
    solve_unconstrained,
    validate_problem,
)


################################################################################
## FIXTURES
################################################################################
@fixture(scope="module")
def problem(case):
    """Unconstrained problem of the manufactured case."""
    return ModelProblem(1.0, case.u_d)


@fixture(scope="module")
def p0_problem(case):
    """Unconstrained problem with elementwise-constant control action."""
    return ModelProblem(1.0, case.u_d, ControlVariant.P0)


def nodal_error(mesh, case, variant=ControlVariant.FULL):
    """Largest nodal error of the discrete adjoint."""
    dofs = interior_dof_map(mesh)
    solution = solve_unconstrained(
        mesh, dofs, ModelProblem(case.alpha, case.u_d, variant), 1e-12, method="direct"
    )
    return np_abs(solution.z - interpolate(mesh, dofs, case.exact_z)).max()


################################################################################
## TESTS
################################################################################
class TestAssemble:
    """Test assembly of the reduced system."""

    @mark.parametrize("alpha", [1.0, 1e-2, 1e-4])
    def test_blocks(self, mesh, dofs, alpha):
        """Test the scaled mass and stiffness blocks."""
        case = manufactured_eigen_case(alpha)
        system = assemble_reduced_system(mesh, dofs, ModelProblem(alpha, case.u_d))
        K, M = assemble_stiffness(mesh, dofs), assemble_mass(mesh, dofs)
        eps = alpha**-0.5
        assert_allclose(system.b11.toarray(), -eps * M.toarray(), atol=1e-14 * eps)
        assert_allclose(system.b12.toarray(), K.toarray())
        assert_allclose(system.b21.toarray(), K.toarray())
        assert_allclose(system.b22.toarray(), eps * M.toarray(), atol=1e-14 * eps)
        assert_allclose(system.rhs[dofs.n_dof :], 0.0)

    @mark.parametrize("variant", list(ControlVariant))
    def test_symmetric(self, mesh, dofs, case, variant):
        """Test that both control actions give symmetric systems."""
        system = assemble_reduced_system(mesh, dofs, ModelProblem(1.0, case.u_d, variant))
        assert is_symmetric(system.matrix)
        assert system.shape == (dofs.n_dof, dofs.n_dof)

    def test_p0_block(self, mesh, dofs, p0_problem):
        """Test that the elementwise-constant action changes the lower-right block only."""
        system = assemble_reduced_system(mesh, dofs, p0_problem)
        M = assemble_mass(mesh, dofs)
        assert abs(system.b22 - M).max() > 1e-6
        assert_allclose(system.b11.toarray(), -M.toarray())

    def test_constrained_rejected(self, mesh, dofs, case):
        """Test that bounded problems are not assembled as linear systems."""
        with raises(ValueError):
            assemble_reduced_system(mesh, dofs, ModelProblem(1.0, case.u_d, box=(-1, 1)))


class TestSolveUnconstrained:
    """Test unconstrained solves."""

    @mark.parametrize("method", ["minres", "dense", "direct"])
    def test_residual(self, mesh, dofs, problem, method):
        """Test that every linear solver reaches the tolerance."""
        solution = solve_unconstrained(mesh, dofs, problem, 1e-10, method=method)
        assert solution.residual <= 1e-10
        assert solution.iterations == 0
        assert solution.n_dof == dofs.n_dof

    def test_control(self, mesh, dofs, problem):
        """Test that the control is recovered from the adjoint."""
        solution = solve_unconstrained(mesh, dofs, problem, 1e-10)
        assert_allclose(solution.q, -solution.z)

    @mark.parametrize("variant", list(ControlVariant))
    def test_nodal_convergence(self, hierarchy, case, variant):
        """Test that nodal adjoint errors decrease quadratically."""
        coarse = nodal_error(hierarchy[3], case, variant)
        fine = nodal_error(hierarchy[4], case, variant)
        assert coarse < 0.1
        assert fine < coarse / 2.5

    def test_zero_data(self, mesh, dofs):
        """Test that zero data gives the zero solution."""
        case = zero_data_case(1.0)
        solution = solve_unconstrained(mesh, dofs, ModelProblem(1.0, case.u_d), 1e-10)
        assert_allclose(solution.u, 0.0)
        assert_allclose(solution.z, 0.0)
        assert solution.residual == 0.0

    def test_state_adjoint_relation(self, mesh, dofs, problem):
        """Test the second row ``K u + εM z = 0``."""
        solution = solve_unconstrained(mesh, dofs, problem, 1e-12, method="direct")
        K, M = assemble_stiffness(mesh, dofs), assemble_mass(mesh, dofs)
        defect = K @ solution.u + M @ solution.z
        assert np_abs(defect).max() < 1e-10


class TestRecoverControl:
    """Test control recovery."""

    def test_full(self, mesh, dofs):
        """Test the scaled adjoint."""
        problem = ModelProblem(4.0, manufactured_eigen_case(4.0).u_d)
        z = ones(dofs.n_dof)
        assert_allclose(recover_control(mesh, dofs, problem, z), -0.5 * z)

    def test_p0(self, mesh, dofs, p0_problem):
        """Test element means of the scaled adjoint."""
        z = interpolate(mesh, dofs, p0_problem.u_d)
        q = recover_control(mesh, dofs, p0_problem, z)
        assert q.shape == (mesh.n_triangles,)
        assert_allclose(q, element_means(mesh, dofs, -z))

    def test_box(self, mesh, dofs, case):
        """Test the nodal clamp."""
        problem = ModelProblem(1.0, case.u_d, box=(-0.2, 0.2))
        z = interpolate(mesh, dofs, case.exact_z)
        q = recover_control(mesh, dofs, problem, z)
        assert_allclose(q, clip(-z, -0.2, 0.2))
        assert q.min() == approx(-0.2)


class TestConsistencyGap:
    """Test the consistency gap of the elementwise-constant action."""

    def test_full_rejected(self, mesh, dofs, problem):
        """Test that the exact action has no gap to measure."""
        with raises(ValueError):
            consistency_gap(mesh, dofs, problem, zeros(dofs.n_dof))

    def test_zero(self, mesh, dofs, p0_problem):
        """Test that the zero adjoint has no gap."""
        assert consistency_gap(mesh, dofs, p0_problem, zeros(dofs.n_dof)) == 0.0

    def test_type_error(self, mesh, dofs):
        """Test that non-problems raise."""
        with raises(TypeError):
            consistency_gap(mesh, dofs, None, zeros(dofs.n_dof))

    def test_quadratic_decay(self, hierarchy, case, p0_problem):
        """Test that the gap of Ritz projections decays quadratically."""
        gaps = []
        for level in (3, 4):
            mesh = hierarchy[level]
            dofs = interior_dof_map(mesh)
            z = ritz_projection(mesh, dofs, case.exact_z)
            gaps.append(consistency_gap(mesh, dofs, p0_problem, z))
        assert gaps[0] > 0
        assert gaps[1] < gaps[0] / 2.5


class TestValidateProblem:
    """Test solver entry point validation."""

    def test_type_error(self):
        """Test that non-problems raise."""
        with raises(TypeError):
            validate_problem("problem", constrained=False)

    def test_mismatch(self, case):
        """Test that bounds must match the entry point."""
        bounded = ModelProblem(1.0, case.u_d, box=(-1.0, 1.0))
        unbounded = ModelProblem(1.0, case.u_d)
        validate_problem(bounded, constrained=True)
        validate_problem(unbounded, constrained=False)
        with raises(ValueError):
            validate_problem(bounded, constrained=False)
        with raises(ValueError):
            validate_problem(unbounded, constrained=True)
