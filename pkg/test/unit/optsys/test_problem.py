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

from math import pi, sqrt

from numpy import ones, zeros
from pytest import approx, mark, raises

from qba_fem.fem import ScalarField
from qba_fem.optsys import (
    POINCARE_CONSTANT,
    Box,
    ControlVariant,
    DiscreteSolution,
    ModelProblem,
    unbounded_box,
)
from qba_fem.utils.typing import UNBOUNDED
from test import NO_REAL, NON_FINITE, NON_POSITIVE

ZERO = ScalarField.constant(0.0)


################################################################################
## TESTS
################################################################################
def test_poincare_constant():
    """Test the Poincaré-Friedrichs constant of the unit square."""
    assert POINCARE_CONSTANT == approx(1 / sqrt(2 * pi**2))


class TestControlVariant:
    """Test control variant parsing."""

    @mark.parametrize(
        "value, expected",
        [
            ("full", ControlVariant.FULL),
            ("FULL", ControlVariant.FULL),
            (" p0 ", ControlVariant.P0),
            ("piecewise-constant", ControlVariant.P0),
            ("piecewise_constant", ControlVariant.P0),
            (ControlVariant.P0, ControlVariant.P0),
        ],
    )
    def test_parse(self, value, expected):
        """Test accepted names."""
        assert ControlVariant.parse(value) is expected

    @mark.parametrize("value", ["p1", "", "constant"])
    def test_unknown(self, value):
        """Test that unknown names raise."""
        with raises(ValueError):
            ControlVariant.parse(value)

    @mark.parametrize("value", [None, 0, 1.0, ["full"]])
    def test_type_error(self, value):
        """Test that non-strings raise."""
        with raises(TypeError):
            ControlVariant.parse(value)


class TestModelProblem:
    """Test model problem construction."""

    @mark.parametrize("alpha", [1.0, 1e-2, 1e-6, 4])
    def test_scalings(self, alpha):
        """Test derived scalings."""
        problem = ModelProblem(alpha, ZERO)
        assert problem.alpha == float(alpha)
        assert problem.sqrt_alpha == approx(sqrt(alpha))
        assert problem.epsilon == approx(1 / sqrt(alpha))
        assert problem.epsilon * problem.sqrt_alpha == approx(1.0)

    def test_defaults(self):
        """Test the default control action and bounds."""
        problem = ModelProblem(1.0, ZERO)
        assert problem.variant is ControlVariant.FULL
        assert problem.box is None
        assert not problem.is_constrained

    def test_box(self):
        """Test that bounds are normalized to a float box."""
        problem = ModelProblem(1.0, ZERO, box=(-1, 2))
        assert problem.box == Box(-1.0, 2.0)
        assert isinstance(problem.box.lo, float)
        assert problem.is_constrained

    def test_variant_name(self):
        """Test that variants may be named."""
        assert ModelProblem(1.0, ZERO, "p0").variant is ControlVariant.P0

    @mark.parametrize("alpha", NON_POSITIVE)
    def test_non_positive_alpha(self, alpha):
        """Test that non-positive Tikhonov parameters raise."""
        with raises(ValueError):
            ModelProblem(alpha, ZERO)

    @mark.parametrize("alpha", NO_REAL + NON_FINITE)
    def test_invalid_alpha(self, alpha):
        """Test that non-real Tikhonov parameters raise."""
        with raises(ValueError):
            ModelProblem(alpha, ZERO)

    @mark.parametrize("u_d", [None, 0.0, lambda x, y: x])
    def test_invalid_desired_state(self, u_d):
        """Test that desired states must be fields."""
        with raises(TypeError):
            ModelProblem(1.0, u_d)

    def test_infeasible_box(self):
        """Test that inverted bounds raise."""
        with raises(ValueError):
            ModelProblem(1.0, ZERO, box=(1.0, -1.0))

    def test_unbounded_box(self):
        """Test the never-clamping box."""
        assert unbounded_box() == Box(-UNBOUNDED, UNBOUNDED)

    def test_frozen(self):
        """Test that problems are immutable."""
        problem = ModelProblem(1.0, ZERO)
        with raises(AttributeError):
            problem.alpha = 2.0


class TestDiscreteSolution:
    """Test discrete solution containers."""

    def test_read_only(self):
        """Test that coefficient arrays are frozen copies."""
        u = ones(3)
        solution = DiscreteSolution(1.0, ControlVariant.FULL, u, zeros(3), zeros(3), 0.0)
        u[0] = 5.0
        assert solution.u[0] == 1.0
        with raises(ValueError):
            solution.z[0] = 1.0

    @mark.parametrize("alpha", [0.5, 1, 2.0, 1e-4])
    def test_unscaled_adjoint(self, alpha):
        """Test the unscaled adjoint."""
        solution = DiscreteSolution(alpha, ControlVariant.FULL, zeros(2), ones(2), zeros(2), 0.0)
        assert solution.p[1] == approx(sqrt(alpha))
        assert solution.n_dof == 2

    def test_history(self):
        """Test that histories are stored as float tuples."""
        solution = DiscreteSolution(
            1.0, ControlVariant.FULL, zeros(1), zeros(1), zeros(1), 0.0, 2, [3, 1e-12]
        )
        assert solution.history == (3.0, 1e-12)
        assert solution.iterations == 2

    def test_shape_mismatch(self):
        """Test that state and adjoint must conform."""
        with raises(ValueError):
            DiscreteSolution(1.0, ControlVariant.FULL, zeros(2), zeros(3), zeros(2), 0.0)
