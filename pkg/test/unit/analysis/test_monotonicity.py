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

from numpy.random import default_rng
from numpy.testing import assert_allclose
from pytest import approx, fixture, mark, raises
from scipy.sparse import bmat

from qba_fem.analysis import MonotonicityCheck, constants_bundle, verify_bK_monotonicity
from qba_fem.mesh import build_uniform_unit_square, interior_dof_map
from qba_fem.utils.typing import UNBOUNDED

from test import NON_POSITIVE

BOX = (-0.2, 0.2)


################################################################################
## FIXTURES
################################################################################
@fixture(scope="module")
def grid():
    """Uniform 4 × 4 grid and its nine interior dofs."""
    mesh = build_uniform_unit_square(4)
    return mesh, interior_dof_map(mesh)


################################################################################
## TESTS
################################################################################
class TestVerify:
    """Test randomized monotonicity checks."""

    @mark.parametrize("alpha", [1.0, 1e-2])
    def test_all_trials_pass(self, grid, alpha):
        """Test that every random pair satisfies the inequality."""
        report = verify_bK_monotonicity(*grid, alpha, BOX, trials=100)
        assert report.trials == 100
        assert report.passed == 100
        assert report.ok
        assert report.inf_sup is None
        assert report.bound == approx(1 / constants_bundle(alpha).kappa_h)

    def test_unbounded_inf_sup(self, grid):
        """Test the inf-sup cross-check of the linear system."""
        report = verify_bK_monotonicity(*grid, 1.0, (-UNBOUNDED, UNBOUNDED), trials=10)
        assert report.ok
        assert report.inf_sup is not None
        assert report.inf_sup.passed
        assert report.inf_sup.value >= report.bound * (1 - 1e-9)
        assert report.inf_sup.gap <= 0.05

    def test_unbounded_inf_sup_gap(self, grid, monkeypatch):
        """Test that a mismatched evaluator fails the inf-sup cross-check."""
        original = MonotonicityCheck.evaluated_matrix
        monkeypatch.setattr(MonotonicityCheck, "evaluated_matrix", lambda self: 2 * original(self))
        report = verify_bK_monotonicity(*grid, 1.0, (-UNBOUNDED, UNBOUNDED), trials=2)
        assert report.inf_sup.gap == approx(1.0)
        assert not report.inf_sup.passed
        assert not report.ok

    def test_reproducible(self, grid):
        """Test that the seed fixes the trials."""
        first = verify_bK_monotonicity(*grid, 1.0, BOX, trials=5, seed=3)
        second = verify_bK_monotonicity(*grid, 1.0, BOX, trials=5, seed=3)
        assert first.min_ratio == second.min_ratio

    @mark.parametrize("trials", [0, -1, 2.5, None])
    def test_invalid_trials(self, grid, trials):
        """Test that trial counts must be positive integers."""
        with raises(ValueError):
            verify_bK_monotonicity(*grid, 1.0, BOX, trials=trials)

    def test_too_many_dofs(self, hierarchy):
        """Test that large meshes are refused."""
        mesh = hierarchy[4]
        with raises(ValueError):
            verify_bK_monotonicity(mesh, interior_dof_map(mesh), 1.0, BOX, trials=1)


class TestMonotonicityCheck:
    """Test the evaluators."""

    @fixture(scope="class")
    def check(self, grid):
        """Check with the reference box."""
        return MonotonicityCheck(*grid, 1.0, BOX)

    def test_test_direction(self, check):
        """Test the test direction of a pure state pair."""
        rng = default_rng(0)
        psi1 = rng.standard_normal(9)
        first, second = check.test_direction((psi1, 0 * psi1))
        assert first == approx(-check.gamma_h * psi1)
        assert second == approx(psi1)

    def test_gamma_h(self, check):
        """Test ``γ_h`` for unit quasi-best constant."""
        assert check.gamma_h == approx(constants_bundle(1.0).gamma)

    def test_linear_in_test_function(self, check):
        """Test that ``b_K`` is linear in its second argument."""
        rng = default_rng(1)
        v = (rng.standard_normal(9), rng.standard_normal(9))
        phi = (rng.standard_normal(9), rng.standard_normal(9))
        doubled = (2 * phi[0], 2 * phi[1])
        assert check.b_K(v, doubled) == approx(2 * check.b_K(v, phi))

    def test_sides_vanish(self, check):
        """Test that identical arguments give zero on both sides."""
        rng = default_rng(2)
        v = (rng.standard_normal(9), rng.standard_normal(9))
        lhs, rhs = check.sides(v, v)
        assert lhs == approx(0.0, abs=1e-12)
        assert rhs == approx(0.0, abs=1e-12)

    @mark.parametrize("alpha", NON_POSITIVE)
    def test_invalid_alpha(self, grid, alpha):
        """Test that non-positive Tikhonov parameters raise."""
        with raises(ValueError):
            MonotonicityCheck(*grid, alpha, BOX)

    @mark.parametrize("alpha", [1.0, 1e-4])
    def test_evaluated_matrix_unbounded(self, grid, alpha):
        """Test that the evaluator reproduces the block matrix without bounds."""
        check = MonotonicityCheck(*grid, alpha, (-UNBOUNDED, UNBOUNDED))
        eps = 1 / sqrt(alpha)
        expected = bmat([[-eps * check.M, check.K], [check.K, eps * check.M]]).toarray()
        assert_allclose(check.evaluated_matrix(), expected, atol=1e-10 * eps)
        result = check.inf_sup_check()
        assert result.evaluated == approx(result.value, rel=1e-8)
        assert result.passed
