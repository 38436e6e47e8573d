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

"""Stability and quasi-best approximation constants.

With ``M = max(M_I, M_C)``, ``L = M/√α`` and ``γ = (M/m_a)(1 + 2M/√α)`` the inf-sup
constant of the rescaled system is bounded below by ``1/κ`` where::

    κ = (1 + 2L)/(1 + L) · (1 + γ)

For the Poisson model problem with the H¹-seminorm, ``m_a = M_a = 1`` and
``M_I = M_C = C_F``.
"""

from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass
from math import sqrt

from ..optsys import POINCARE_CONSTANT
from ..utils.typing import ispositive, isreal

AsymptoticCheck = namedtuple("AsymptoticCheck", ("name", "value", "target", "passed"))
AsymptoticCheck.__doc__ = """Outcome of a limit check: measured ratio against its limit."""


@dataclass(frozen=True)
class ConstantsBundle:
    """Constants of one model problem instance."""

    alpha: float
    M_I: float
    M_C: float
    m_a: float
    M_a: float
    mu_h: float
    C_F: float = POINCARE_CONSTANT

    ################################################################################
    ## PROPERTIES
    ################################################################################
    @property
    def M(self) -> float:  # pylint: disable=invalid-name
        """Larger of the observation and control-action norms."""
        return max(self.M_I, self.M_C)

    @property
    def L(self) -> float:  # pylint: disable=invalid-name
        """``M/√α``."""
        return self.M / sqrt(self.alpha)

    @property
    def gamma(self) -> float:
        """``(M/m_a)(1 + 2M/√α)``."""
        return (self.M / self.m_a) * (1 + 2 * self.L)

    @property
    def kappa(self) -> float:
        """Inverse lower bound of the continuous inf-sup constant."""
        return _ratio(self.L) * (1 + self.gamma)

    @property
    def kappa_h(self) -> float:
        """Discrete counterpart of ``kappa`` with the quasi-best constant ``μ_h``."""
        return _ratio(self.L) * (1 + self.gamma * self.mu_h)

    @property
    def kappa_alpha_example(self) -> float:
        """``2(1 + C_F(1 + 2C_F/√α))``, the bound on ``ν_h`` for the model problem."""
        return kappa_alpha(self.alpha, self.C_F)

    def asdict(self) -> dict[str, float]:
        """Inputs and derived constants by name."""
        names = ("alpha", "M_I", "M_C", "M", "m_a", "M_a", "mu_h", "C_F", "L", "gamma")
        values = {name: getattr(self, name) for name in names}
        values.update(
            kappa=self.kappa,
            kappa_h=self.kappa_h,
            kappa_alpha_example=self.kappa_alpha_example,
        )
        return values


def constants_bundle(
    alpha: float,
    mu_h: float = 1.0,
    *,
    M: float | None = None,  # pylint: disable=invalid-name
    m_a: float = 1.0,
    M_a: float = 1.0,  # pylint: disable=invalid-name
) -> ConstantsBundle:
    """Constants of the Poisson model problem (``M = C_F`` unless overridden).

    >>> round(constants_bundle(1.0).kappa_alpha_example, 5)
    2.6528
    """
    if not ispositive(alpha):
        raise ValueError(f"Tikhonov parameter must be positive, not `{alpha!r}`.")
    M = POINCARE_CONSTANT if M is None else M
    if not isreal(M) or M < 0:
        raise ValueError(f"Operator norm bound must be non-negative, not `{M!r}`.")
    for name, value in (("m_a", m_a), ("M_a", M_a), ("mu_h", mu_h)):
        if not ispositive(value):
            raise ValueError(f"Constant `{name}` must be positive, not `{value!r}`.")
    return ConstantsBundle(float(alpha), float(M), float(M), float(m_a), float(M_a), float(mu_h))


def kappa_alpha(alpha: float, poincare: float = POINCARE_CONSTANT) -> float:
    """``2(1 + C_F(1 + 2C_F/√α))`` with ``C_F = poincare``."""
    return 2 * (1 + poincare * (1 + 2 * poincare / sqrt(alpha)))


def nu_deviation_bound(alpha: float, h: float) -> float:
    """Bound ``κ_α h`` on ``|ν_h − 1|`` for the model problem (with ``μ_h = 1``)."""
    if not ispositive(h):
        raise ValueError(f"Meshsize must be positive, not `{h!r}`.")
    return kappa_alpha(alpha) * h


def _ratio(L: float) -> float:  # pylint: disable=invalid-name
    return (1 + 2 * L) / (1 + L)


################################################################################
## LIMITS
################################################################################
def asymptotic_checks(rtol: float = 0.05) -> tuple[AsymptoticCheck, ...]:
    """Check the limiting behavior of ``κ``.

    1. ``M = 0`` gives ``κ = 1`` exactly.
    2. ``κ√α m_a / (4M²) → 1`` as ``α → 0`` (checked at ``α = 1e-8``).
    3. ``(κ − 1)/M → 1/√α + 1/m_a`` as ``M → 0`` (checked at ``M = 1e-6``, ``α = 1``).
    4. ``κ m_a → (1 + 2L)/(1 + L)·(1 + 2M/√α) M`` as ``m_a → 0`` (checked at ``1e-6``).
    """
    checks = []
    pure = constants_bundle(1.0, M=0.0)
    checks.append(AsymptoticCheck("pure_constraint", pure.kappa, 1.0, pure.kappa == 1.0))

    vanishing = constants_bundle(1e-8)
    value = vanishing.kappa * sqrt(vanishing.alpha) * vanishing.m_a / (4 * vanishing.M**2)
    checks.append(AsymptoticCheck("vanishing_regularization", value, 1.0, abs(value - 1) <= rtol))

    small = constants_bundle(1.0, M=1e-6)
    target = 1 / sqrt(small.alpha) + 1 / small.m_a
    value = (small.kappa - 1) / small.M
    checks.append(AsymptoticCheck("small_norms", value, target, abs(value / target - 1) <= rtol))

    degenerate = constants_bundle(1.0, m_a=1e-6)
    target = _ratio(degenerate.L) * (1 + 2 * degenerate.L) * degenerate.M
    value = degenerate.kappa * degenerate.m_a
    checks.append(
        AsymptoticCheck("degenerate_constraint", value, target, abs(value / target - 1) <= rtol)
    )
    return tuple(checks)
