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

"""Finite-element assembly of the forms of the model problem."""

from .assembly import (
    assemble_load,
    assemble_mass,
    assemble_stiffness,
    barycentric_gradients,
    element_gradients,
    element_means,
    element_values,
    interpolate,
    p0_gram,
)
from .clamping import (
    assemble_clamped_term,
    assemble_inactive_mass,
    clamped_difference_l2,
    inactive_fraction,
    subdivide,
    validate_box,
)
from .fields import ScalarField
from .quadrature import QuadratureRule, triangle_rule

__all__ = [
    "QuadratureRule",
    "ScalarField",
    "assemble_clamped_term",
    "assemble_inactive_mass",
    "assemble_load",
    "assemble_mass",
    "assemble_stiffness",
    "barycentric_gradients",
    "clamped_difference_l2",
    "element_gradients",
    "element_means",
    "element_values",
    "inactive_fraction",
    "interpolate",
    "p0_gram",
    "subdivide",
    "triangle_rule",
    "validate_box",
]
