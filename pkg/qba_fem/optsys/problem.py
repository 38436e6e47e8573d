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

"""Model problem and discrete solution types."""

from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass, field
from enum import Enum
from math import pi, sqrt

from numpy import array, ndarray

from ..fem import ScalarField, validate_box
from ..utils.typing import UNBOUNDED, ispositive

POINCARE_CONSTANT: float = 1 / (sqrt(2) * pi)
"""Poincaré-Friedrichs constant of the unit square, ``1/λ₁^{1/2}`` with ``λ₁ = 2π²``."""


class ControlVariant(Enum):
    """Control action realized by the discrete system."""

    FULL = "full"
    P0 = "p0"

    @classmethod
    def parse(cls, value: ControlVariant | str) -> ControlVariant:
        """Build from an instance or its name (``full``, ``p0``, ``piecewise-constant``)."""
        if isinstance(value, cls):
            return value
        if not isinstance(value, str):
            raise TypeError(f"Invalid control variant type `{type(value)}`.")
        key = value.strip().lower().replace("_", "-")
        if key in ("piecewise-constant", "piecewiseconstant"):
            key = "p0"
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"Unknown control variant `{value!r}`.") from None


Box = namedtuple("Box", ("lo", "hi"))
Box.__doc__ = """Uniform pointwise control bounds; ``±1e308`` marks an unbounded side."""


def unbounded_box() -> Box:
    """Box that never clamps."""
    return Box(-UNBOUNDED, UNBOUNDED)


@dataclass(frozen=True)
class ModelProblem:
    """Linear-quadratic model problem on the unit square.

    Args:
        alpha: Tikhonov parameter.
        u_d: desired state.
        variant: exact (``FULL``) or elementwise-constant (``P0``) control action.
        box: optional control bounds ``(q_lo, q_hi)``.
    """

    alpha: float
    u_d: ScalarField
    variant: ControlVariant = ControlVariant.FULL
    box: Box | None = None

    def __post_init__(self) -> None:
        if not ispositive(self.alpha):
            raise ValueError(f"Tikhonov parameter must be positive, not `{self.alpha!r}`.")
        if not isinstance(self.u_d, ScalarField):
            raise TypeError(f"Invalid desired state type `{type(self.u_d)}`, expected ScalarField.")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "variant", ControlVariant.parse(self.variant))
        if self.box is not None:
            lo, hi = self.box
            validate_box(lo, hi)
            object.__setattr__(self, "box", Box(float(lo), float(hi)))

    @property
    def sqrt_alpha(self) -> float:
        """``√α``."""
        return sqrt(self.alpha)

    @property
    def epsilon(self) -> float:
        """Scaling ``1/√α`` of the mass blocks."""
        return 1 / sqrt(self.alpha)

    @property
    def is_constrained(self) -> bool:
        """Whether control bounds are present."""
        return self.box is not None


@dataclass(frozen=True, eq=False)
class DiscreteSolution:
    """Discrete optimal state, rescaled adjoint and recovered control.

    Args:
        alpha: Tikhonov parameter of the solved problem.
        variant: control action of the solved problem.
        u: state dof coefficients.
        z: rescaled adjoint (``p/√α``) dof coefficients.
        q: recovered control; dof coefficients (``FULL``) or element means (``P0``).
        residual: final residual of the (linear or nonlinear) discrete system.
        iterations: nonlinear iterations (``0`` for linear solves).
        history: residual after each nonlinear iteration.
    """

    alpha: float
    variant: ControlVariant
    u: ndarray
    z: ndarray
    q: ndarray
    residual: float
    iterations: int = 0
    history: tuple[float, ...] = field(default=(), repr=False)

    def __post_init__(self) -> None:
        u, z, q = (array(v, dtype=float) for v in (self.u, self.z, self.q))
        if u.shape != z.shape or u.ndim != 1:
            raise ValueError(f"State and adjoint shapes differ: `{u.shape}` vs `{z.shape}`.")
        for name, value in (("u", u), ("z", z), ("q", q)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)
        object.__setattr__(self, "history", tuple(float(r) for r in self.history))

    @property
    def p(self) -> ndarray:
        """Unscaled adjoint ``√α z``."""
        return sqrt(self.alpha) * self.z

    @property
    def n_dof(self) -> int:
        """Number of dofs per component."""
        return self.u.size
