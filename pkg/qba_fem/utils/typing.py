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

"""Type checking utils module."""

from __future__ import annotations

from numbers import Integral, Real
from typing import Any

# Sentinel magnitude standing for an unbounded side of a control box
UNBOUNDED: float = 1e308


def isinteger(obj: Any) -> bool:
    """Check if object is an integer number (``bool`` excluded).

    >>> isinteger(3), isinteger(3.0), isinteger(3.5), isinteger(True)
    (True, True, False, False)
    """
    if isinstance(obj, bool):
        return False
    if isinstance(obj, Integral):
        return True
    return isinstance(obj, float) and obj.is_integer()


def isreal(obj: Any) -> bool:
    """Check if object is a finite real number (``bool`` excluded)."""
    if isinstance(obj, bool) or not isinstance(obj, Real):
        return False
    return float("-Inf") < float(obj) < float("Inf")


def ispositive(obj: Any) -> bool:
    """Check if object is a finite strictly positive real number."""
    return isreal(obj) and obj > 0


def isinterval(obj: Any) -> bool:
    """Check if object is an ordered pair of reals ``(lo, hi)`` with ``lo <= hi``.

    Unbounded sides are encoded by ``±UNBOUNDED`` which is itself finite.
    """
    if not isinstance(obj, tuple) or len(obj) != 2:
        return False
    lo, hi = obj
    return isreal(lo) and isreal(hi) and lo <= hi
