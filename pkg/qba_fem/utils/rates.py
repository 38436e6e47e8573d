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

"""Convergence rate fitting."""

from __future__ import annotations

from collections.abc import Sequence

from numpy import asarray, isfinite, log, nan, polyfit


def fit_rate(h: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope of ``log(values)`` against ``log(h)``.

    Non-positive or non-finite samples are discarded; fewer than two remaining
    samples yield ``nan``.

    >>> round(fit_rate([0.5, 0.25, 0.125], [1.0, 0.25, 0.0625]), 12)
    2.0
    """
    h = asarray(h, dtype=float)
    values = asarray(values, dtype=float)
    if h.shape != values.shape:
        raise ValueError(
            f"Mismatching sample counts `{h.shape}` and `{values.shape}` for rate fit."
        )
    keep = isfinite(values) & (values > 0) & isfinite(h) & (h > 0)
    if keep.sum() < 2:
        return nan
    slope, _ = polyfit(log(h[keep]), log(values[keep]), 1)
    return float(slope)
