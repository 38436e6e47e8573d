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

"""Manufactured solutions of the unconstrained optimality system."""

from __future__ import annotations

from dataclasses import dataclass
from math import pi, sqrt

from numpy import cos, linspace, meshgrid, ndarray, sin
from numpy import abs as np_abs

from ..fem import ScalarField
from ..utils.typing import ispositive

IDENTITY_TOL: float = 1e-10


@dataclass(frozen=True)
class ManufacturedCase:
    """Exact state, rescaled adjoint, control and the desired state producing them.

    The fields satisfy ``−Δu = q``, ``−Δz = (u − u_d)/√α`` and ``√α q = −z``; this is
    checked on a grid of points at construction.
    """

    alpha: float
    exact_u: ScalarField
    exact_z: ScalarField
    exact_q: ScalarField
    u_d: ScalarField
    description: str = ""

    def __post_init__(self) -> None:
        if not ispositive(self.alpha):
            raise ValueError(f"Tikhonov parameter must be positive, not `{self.alpha!r}`.")
        x, y = meshgrid(linspace(0.05, 0.95, 7), linspace(0.05, 0.95, 7))
        for name, defect in zip(("state", "adjoint", "control"), self.residuals(x, y)):
            if defect is not None and np_abs(defect).max() > IDENTITY_TOL:
                raise ValueError(f"Manufactured fields violate the {name} equation.")

    def residuals(self, x: ndarray, y: ndarray) -> tuple[ndarray | None, ...]:
        """Pointwise defects of the three optimality relations (``None`` if not evaluable)."""
        state = adjoint = None
        if self.exact_u.has_laplacian:
            state = -self.exact_u.laplacian(x, y) - self.exact_q(x, y)
        if self.exact_z.has_laplacian:
            adjoint = -self.exact_z.laplacian(x, y) - (
                self.exact_u(x, y) - self.u_d(x, y)
            ) / sqrt(self.alpha)
        control = sqrt(self.alpha) * self.exact_q(x, y) + self.exact_z(x, y)
        return state, adjoint, control


def eigenfunction() -> ScalarField:
    """First Dirichlet eigenfunction ``sin(πx) sin(πy)`` of the unit square."""
    return ScalarField(
        lambda x, y: sin(pi * x) * sin(pi * y),
        lambda x, y: (pi * cos(pi * x) * sin(pi * y), pi * sin(pi * x) * cos(pi * y)),
        lambda x, y: -2 * pi**2 * sin(pi * x) * sin(pi * y),
        name="sin(πx)sin(πy)",
    )


def manufactured_eigen_case(alpha: float) -> ManufacturedCase:
    """Case with ``z = sin(πx)sin(πy)``, ``u = −z/(2π²√α)``, ``q = −z/√α``.

    Since ``−Δz = 2π² z`` the desired state is ``u_d = u − 2π²√α z``.
    """
    if not ispositive(alpha):
        raise ValueError(f"Tikhonov parameter must be positive, not `{alpha!r}`.")
    z = eigenfunction()
    u = z * (-1 / (2 * pi**2 * sqrt(alpha)))
    q = z * (-1 / sqrt(alpha))
    u_d = u - z * (2 * pi**2 * sqrt(alpha))
    return ManufacturedCase(alpha, u, z, q, u_d, description="eigenfunction")


def zero_data_case(alpha: float) -> ManufacturedCase:
    """Case with ``u_d ≡ 0`` whose solution vanishes."""
    zero = ScalarField.constant(0.0)
    return ManufacturedCase(alpha, zero, zero, zero, zero, description="zero data")
