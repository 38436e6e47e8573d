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

"""Discrete rescaled and reduced optimality systems."""

from .constrained import (
    BoxConstrainedSolver,
    ClampedSystem,
    FixedPointSolver,
    SemismoothNewtonSolver,
    solve_box_constrained,
)
from .problem import (
    POINCARE_CONSTANT,
    Box,
    ControlVariant,
    DiscreteSolution,
    ModelProblem,
    unbounded_box,
)
from .reduced import (
    assemble_reduced_system,
    consistency_gap,
    recover_control,
    solve_unconstrained,
    validate_problem,
)

__all__ = [
    "POINCARE_CONSTANT",
    "Box",
    "BoxConstrainedSolver",
    "ClampedSystem",
    "ControlVariant",
    "DiscreteSolution",
    "FixedPointSolver",
    "ModelProblem",
    "SemismoothNewtonSolver",
    "assemble_reduced_system",
    "consistency_gap",
    "recover_control",
    "solve_box_constrained",
    "solve_unconstrained",
    "unbounded_box",
    "validate_problem",
]
