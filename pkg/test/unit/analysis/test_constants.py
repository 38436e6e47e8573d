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

from pytest import approx, mark, raises

from qba_fem.analysis import (
    AsymptoticCheck,
    asymptotic_checks,
    constants_bundle,
    kappa_alpha,
    nu_deviation_bound,
)
from qba_fem.optsys import POINCARE_CONSTANT

from test import ALPHAS

C_F = POINCARE_CONSTANT


class TestConstantsBundle:
    """Test the constants of the model problem."""

    def test_model_problem(self):
        """Test the derived constants for unit Tikhonov parameter."""
        bundle = constants_bundle(1.0)
        assert bundle.M == approx(C_F)
        assert bundle.L == approx(C_F)
        assert bundle.gamma == approx(C_F * (1 + 2 * C_F))
        assert bundle.kappa == approx((1 + 2 * C_F) / (1 + C_F) * (1 + bundle.gamma))
        assert bundle.kappa_alpha_example == approx(2.6528, abs=1e-4)

    @mark.parametrize("alpha", ALPHAS)
    def test_kappa_bounds(self, alpha):
        """Test that ``κ`` lies between one and the model-problem bound."""
        bundle = constants_bundle(alpha)
        assert 1 < bundle.kappa <= bundle.kappa_alpha_example
        assert bundle.kappa_h == approx(bundle.kappa)

    @mark.parametrize("alpha", [1.0, 1e-2, 1e-4])
    def test_kappa_growth(self, alpha):
        """Test that ``κ`` grows as the Tikhonov parameter decreases."""
        assert constants_bundle(alpha / 10).kappa > constants_bundle(alpha).kappa

    def test_mu_h(self):
        """Test that the quasi-best constant only enters ``κ_h``."""
        bundle = constants_bundle(1.0, mu_h=2.0)
        assert bundle.kappa_h > bundle.kappa
        assert bundle.kappa == approx(constants_bundle(1.0).kappa)

    def test_pure_constraint(self):
        """Test that vanishing operator norms give ``κ = 1``."""
        assert constants_bundle(1e-3, M=0.0).kappa == 1.0

    def test_asdict(self):
        """Test that all constants are reported by name."""
        values = constants_bundle(0.5).asdict()
        assert values["alpha"] == 0.5
        assert values["C_F"] == approx(C_F)
        for name in ("M", "L", "gamma", "kappa", "kappa_h", "kappa_alpha_example"):
            assert name in values

    @mark.parametrize(
        "kwargs",
        [
            {"alpha": 0.0},
            {"alpha": -1.0},
            {"alpha": float("nan")},
            {"alpha": 1.0, "M": -1.0},
            {"alpha": 1.0, "m_a": 0.0},
            {"alpha": 1.0, "M_a": -2.0},
            {"alpha": 1.0, "mu_h": 0.0},
        ],
    )
    def test_invalid(self, kwargs):
        """Test that invalid inputs raise."""
        with raises(ValueError):
            constants_bundle(**kwargs)


class TestKappaAlpha:
    """Test the model-problem bound on the quasi-best constant."""

    @mark.parametrize("alpha", [1.0, 1e-2, 1e-4])
    def test_formula(self, alpha):
        """Test the closed form."""
        expected = 2 * (1 + C_F * (1 + 2 * C_F / sqrt(alpha)))
        assert kappa_alpha(alpha) == approx(expected)

    def test_deviation_bound(self):
        """Test the linear bound on ``|ν_h − 1|``."""
        assert nu_deviation_bound(1.0, 0.1) == approx(0.26528, abs=1e-5)
        assert nu_deviation_bound(1.0, 0.05) == approx(nu_deviation_bound(1.0, 0.1) / 2)

    @mark.parametrize("h", [0, -0.1, None])
    def test_invalid_meshsize(self, h):
        """Test that non-positive meshsizes raise."""
        with raises(ValueError):
            nu_deviation_bound(1.0, h)


class TestAsymptoticChecks:
    """Test the limits of ``κ``."""

    def test_all_pass(self):
        """Test that every limit is reproduced."""
        checks = asymptotic_checks()
        assert len(checks) == 4
        assert all(isinstance(check, AsymptoticCheck) for check in checks)
        for check in checks:
            assert check.passed, check

    def test_names(self):
        """Test the check names."""
        names = [check.name for check in asymptotic_checks()]
        assert names == [
            "pure_constraint",
            "vanishing_regularization",
            "small_norms",
            "degenerate_constraint",
        ]

    def test_small_norms_target(self):
        """Test the small-norm limit ``1/√α + 1/m_a``."""
        check = asymptotic_checks()[2]
        assert check.target == approx(2.0)
        assert check.value == approx(2.0, rel=1e-4)
