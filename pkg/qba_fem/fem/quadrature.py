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

"""Symmetric quadrature rules on triangles."""

from __future__ import annotations

from collections import namedtuple
from functools import lru_cache

from numpy import array, einsum, ndarray

QuadratureRule = namedtuple("QuadratureRule", ("points", "weights", "degree"))
QuadratureRule.__doc__ = """Barycentric quadrature rule with weights normalized to sum one.

Fields:
    points: ``(n_points, 3)`` barycentric coordinates.
    weights: ``(n_points,)`` weights, to be scaled by the triangle area.
    degree: polynomial degree integrated exactly.
"""

SUPPORTED_DEGREES: tuple[int, ...] = (2, 4, 7)


def _orbit_3(a: float) -> list[tuple[float, float, float]]:
    b = 1 - 2 * a
    return [(b, a, a), (a, b, a), (a, a, b)]


def _orbit_6(a: float, b: float) -> list[tuple[float, float, float]]:
    c = 1 - a - b
    return [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]


@lru_cache(maxsize=None)
def triangle_rule(degree: int) -> QuadratureRule:
    """Return the symmetric rule exact for polynomials up to ``degree``.

    Raises:
        ValueError: if ``degree`` is not one of ``2``, ``4``, ``7``.
    """
    if degree == 2:
        points = array(_orbit_3(1 / 6))
        weights = array([1 / 3] * 3)
    elif degree == 4:
        points = array(_orbit_3(0.445948490915965) + _orbit_3(0.091576213509771))
        weights = array([0.223381589678011] * 3 + [0.109951743655322] * 3)
    elif degree == 7:
        points = array(
            [(1 / 3, 1 / 3, 1 / 3)]
            + _orbit_3(0.260345966079040)
            + _orbit_3(0.065130102902216)
            + _orbit_6(0.048690315425316, 0.312865496004874)
        )
        weights = array(
            [-0.149570044467682]
            + [0.175615257433208] * 3
            + [0.053347235608838] * 3
            + [0.077113760890257] * 6
        )
    else:
        raise ValueError(
            f"Unsupported quadrature degree `{degree}`, expected one of {SUPPORTED_DEGREES}."
        )
    weights = weights / weights.sum()
    points.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(points, weights, degree)


def physical_points(corners: ndarray, rule: QuadratureRule) -> tuple[ndarray, ndarray]:
    """Map barycentric rule points onto each triangle.

    Args:
        corners: ``(n_triangles, 3, 2)`` vertex coordinates.
        rule: quadrature rule.

    Returns:
        Coordinates ``x`` and ``y``, each of shape ``(n_triangles, n_points)``.
    """
    xy = einsum("qk,tkd->tqd", rule.points, corners)
    return xy[..., 0], xy[..., 1]

