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

from math import nan

from numpy import array
from pytest import approx, mark, raises

from qba_fem.utils.rates import fit_rate


class TestFitRate:
    """Test least-squares rate fitting."""

    @mark.parametrize("rate", [0.5, 1.0, 2.0, 3.5])
    def test_exact_power_law(self, rate):
        """Power laws are recovered exactly."""
        h = array([0.5, 0.25, 0.125, 0.0625])
        assert fit_rate(h, 3.0 * h**rate) == approx(rate, abs=1e-12)

    def test_discards_non_positive(self):
        """Zero and negative samples are dropped before fitting."""
        h = [0.5, 0.25, 0.125, 0.0625]
        values = [0.25, 0.0, 0.015625, -1.0]
        assert fit_rate(h, values) == approx(2.0, abs=1e-12)

    @mark.parametrize("values", [[0.0, 0.0, 0.0], [1.0, nan, 0.0], [-1.0, -2.0, -3.0]])
    def test_too_few_samples(self, values):
        """Fewer than two usable samples give NaN."""
        rate = fit_rate([0.5, 0.25, 0.125], values)
        assert rate != rate

    def test_mismatching_lengths(self):
        with raises(ValueError):
            fit_rate([0.5, 0.25], [1.0, 0.5, 0.25])
