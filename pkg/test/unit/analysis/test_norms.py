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

from math import sqrt

from numpy import cos, pi, sin
from numpy.random import default_rng
from numpy.testing import assert_allclose
from pytest import approx, fixture, mark, raises

from qba_fem.analysis import (
    ConstrainedMetrics,
    DiscreteNorms,
    eigenfunction,
    h1_error,
    metrics_constrained,
    norms,
    ritz_projection,
    ritz_rhs,
)
from qba_fem.fem import ScalarField, assemble_stiffness, interpolate
from qba_fem.mesh import interior_dof_map
from qba_fem.utils.typing import UNBOUNDED

BOX = (-0.2, 0.2)


################################################################################
## FIXTURES
################################################################################
@fixture(scope="module")
def rng():
    """Seeded generator."""
    return default_rng(7)


def random_pair(rng, n, scale=1.0):
    """Random pair of dof vectors."""
    return scale * rng.standard_normal(n), scale * rng.standard_normal(n)


################################################################################
## TESTS
################################################################################
class TestDiscreteNorms:
    """Test norms of dof vectors and pairs."""

    def test_eigenfunction(self, mesh, dofs):
        """Test the norms of an interpolated eigenfunction."""
        v = interpolate(mesh, dofs, eigenfunction())
        evaluator = norms(mesh, dofs)
        assert evaluator.l2(v) == approx(0.5, rel=0.1)
        assert evaluator.h1(v) == approx(pi / sqrt(2), rel=0.1)
        assert evaluator.control(v) == evaluator.l2(v)

    def test_pairs(self, mesh, dofs, rng):
        """Test the product, energy and test norms."""
        evaluator = norms(mesh, dofs, alpha=0.25, M_bound=0.5, M_a=2.0)
        v = random_pair(rng, dofs.n_dof)
        product = sqrt(evaluator.h1(v[0]) ** 2 + evaluator.h1(v[1]) ** 2)
        energy = sqrt(evaluator.l2(v[0]) ** 2 + evaluator.l2(v[1]) ** 2)
        assert evaluator.product(v) == approx(product)
        assert evaluator.energy(v) == approx(energy)
        assert evaluator.alpha_norm(v) == approx(2 * product + energy)

    def test_poincare(self, mesh, dofs, rng):
        """Test the discrete Poincaré-Friedrichs inequality."""
        evaluator = norms(mesh, dofs)
        for _ in range(10):
            v = rng.standard_normal(dofs.n_dof)
            assert evaluator.l2(v) <= evaluator.M_bound * evaluator.h1(v) * (1 + 1e-12)

    def test_shapes(self, mesh, dofs, small_mesh, small_dofs):
        """Test that matrices must conform."""
        K = assemble_stiffness(mesh, dofs)
        with raises(ValueError):
            norms(mesh, dofs, K=assemble_stiffness(small_mesh, small_dofs))
        with raises(ValueError):
            DiscreteNorms(K, assemble_stiffness(small_mesh, small_dofs))
        with raises(ValueError):
            DiscreteNorms(K, K, alpha=0.0)


class TestConstrainedMetrics:
    """Test the constrained pseudometric and metric."""

    @fixture(scope="class")
    def metrics(self, mesh, dofs):
        """Metrics with the reference box and unit Tikhonov parameter."""
        return metrics_constrained(mesh, dofs, 1.0, BOX)

    def test_delta_bounded_by_energy(self, metrics, dofs, rng):
        """Test that the clamp does not increase the energy distance."""
        for _ in range(100):
            v, w = random_pair(rng, dofs.n_dof, 0.5), random_pair(rng, dofs.n_dof, 0.5)
            difference = (v[0] - w[0], v[1] - w[1])
            assert metrics.delta(v, w) <= metrics.norms.energy(difference) * (1 + 1e-10)

    def test_distance_bounded_by_test_norm(self, metrics, dofs, rng):
        """Test that ``d_{K,α}`` is dominated by the test norm of the difference."""
        for _ in range(20):
            v, w = random_pair(rng, dofs.n_dof), random_pair(rng, dofs.n_dof)
            difference = (v[0] - w[0], v[1] - w[1])
            assert metrics.distance(v, w) <= metrics.norms.alpha_norm(difference) * (1 + 1e-10)

    def test_unbounded(self, mesh, dofs, rng):
        """Test that the metric reduces to the linear test norm without bounds."""
        metrics = ConstrainedMetrics(mesh, dofs, 0.5, (-UNBOUNDED, UNBOUNDED))
        v, w = random_pair(rng, dofs.n_dof), random_pair(rng, dofs.n_dof)
        difference = (v[0] - w[0], v[1] - w[1])
        assert metrics.delta(v, w) == approx(metrics.norms.energy(difference), rel=1e-10)
        assert metrics.distance(v, w) == approx(metrics.norms.alpha_norm(difference), rel=1e-10)

    def test_identical_controls(self, metrics, dofs, rng):
        """Test that adjoints clamped to the same control have no control distance."""
        u = rng.standard_normal(dofs.n_dof)
        v = (u, 5.0 + rng.random(dofs.n_dof))
        w = (u, 5.0 + rng.random(dofs.n_dof))
        assert metrics.delta(v, w) == approx(0.0, abs=1e-12)
        assert metrics.distance(v, w) > 0

    def test_symmetric(self, metrics, dofs, rng):
        """Test symmetry of both distances."""
        v, w = random_pair(rng, dofs.n_dof), random_pair(rng, dofs.n_dof)
        assert metrics.delta(v, w) == approx(metrics.delta(w, v))
        assert metrics.distance(v, w) == approx(metrics.distance(w, v))

    def test_alpha(self, metrics):
        """Test the stored Tikhonov parameter."""
        assert metrics.alpha == 1.0
        assert metrics.box == BOX

    def test_infeasible_box(self, mesh, dofs):
        """Test that inverted bounds raise."""
        with raises(ValueError):
            metrics_constrained(mesh, dofs, 1.0, (1.0, 0.0))


class TestRitzProjection:
    """Test Galerkin projections."""

    def test_galerkin_orthogonality(self, mesh, dofs):
        """Test that the projection solves the stiffness system."""
        K = assemble_stiffness(mesh, dofs)
        R = ritz_projection(mesh, dofs, eigenfunction(), K=K)
        assert_allclose(K @ R, ritz_rhs(mesh, dofs, eigenfunction()), atol=1e-11)

    def test_best_approximation(self, mesh, dofs):
        """Test that the projection beats the interpolant in the H¹-seminorm."""
        z = eigenfunction()
        ritz = h1_error(mesh, dofs, ritz_projection(mesh, dofs, z), z)
        interp = h1_error(mesh, dofs, interpolate(mesh, dofs, z), z)
        assert ritz <= interp * (1 + 1e-10)

    def test_gradient_fallback(self, mesh, dofs):
        """Test that the gradient form agrees with the Laplacian load."""
        z = eigenfunction()
        gradient_only = ScalarField(
            z,
            lambda x, y: (pi * cos(pi * x) * sin(pi * y), pi * sin(pi * x) * cos(pi * y)),
        )
        assert_allclose(
            ritz_rhs(mesh, dofs, gradient_only), ritz_rhs(mesh, dofs, z), rtol=1e-6, atol=1e-10
        )

    def test_value_only(self, mesh, dofs):
        """Test that fields without derivatives cannot be projected."""
        with raises(ValueError):
            ritz_rhs(mesh, dofs, ScalarField(lambda x, y: x * y))

    @mark.parametrize("level", [3, 4])
    def test_h1_rate(self, hierarchy, level):
        """Test first-order convergence of the projection error."""
        z = eigenfunction()
        errors = []
        for mesh in (hierarchy[level - 1], hierarchy[level]):
            dofs = interior_dof_map(mesh)
            errors.append(h1_error(mesh, dofs, ritz_projection(mesh, dofs, z), z))
        assert errors[0] / errors[1] == approx(2.0, rel=0.1)
