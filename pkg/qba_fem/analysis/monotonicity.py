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

"""Strong monotonicity of the box-constrained operator on small meshes.

For a pair ``ψ = v − w`` the test direction is::

    T ψ = (1/μ_h)(ψ₂, ψ₁) + γ_h(−ψ₁, ψ₂),     γ_h = μ_h M(1 + 2M/√α)

(the Riesz maps and the constraint operator coincide for the H¹-seminorm), and the
check is ``b_K(v, Tψ) − b_K(w, Tψ) ≥ d_{K,α}(v, w)‖Tψ‖ / (κ_h μ_h)``.
"""

from __future__ import annotations

import logging
from collections import namedtuple
from dataclasses import dataclass
from math import sqrt

from numpy import concatenate, identity, ndarray, vstack
from numpy.random import default_rng
from scipy.sparse import block_diag, bmat

from ..fem import assemble_clamped_term, assemble_mass, assemble_stiffness, validate_box
from ..linalg import inf_sup_constant
from ..mesh import DofMap, TriMesh
from ..utils.typing import UNBOUNDED, isinteger, ispositive
from .constants import constants_bundle
from .norms import ConstrainedMetrics, Pair

logger = logging.getLogger(__name__)

DENSE_DOF_LIMIT: int = 200
MARGIN_RTOL: float = 1e-9
INF_SUP_GAP_RTOL: float = 0.05

InfSupCheck = namedtuple("InfSupCheck", ("value", "evaluated", "gap", "bound", "passed"))
InfSupCheck.__doc__ = """Inf-sup constant of the unbounded-box form, computed twice.

``value`` comes from the assembled block system, ``evaluated`` from the matrix of the
``b_K`` evaluator; ``gap`` is their relative difference. The check passes when the gap
is at most 5% and ``value`` is at least ``bound = 1/(κ_h μ_h)``.
"""


@dataclass(frozen=True)
class MonotonicityReport:
    """Outcome of a randomized monotonicity check."""

    trials: int
    passed: int
    min_ratio: float  # smallest lhs/rhs over the trials
    bound: float
    inf_sup: InfSupCheck | None = None

    @property
    def ok(self) -> bool:
        """Whether every trial (and the inf-sup cross-check, if run) passed."""
        return self.passed == self.trials and (self.inf_sup is None or self.inf_sup.passed)


class MonotonicityCheck:
    """Evaluators of ``b_K``, the test direction and both sides of the inequality."""

    def __init__(
        self,
        mesh: TriMesh,
        dofs: DofMap,
        alpha: float,
        box: tuple[float, float],
        mu_h: float = 1.0,
    ) -> None:
        if dofs.n_dof > DENSE_DOF_LIMIT:
            raise ValueError(
                f"Monotonicity check limited to `{DENSE_DOF_LIMIT}` dofs, mesh has `{dofs.n_dof}`."
            )
        if not ispositive(alpha):
            raise ValueError(f"Tikhonov parameter must be positive, not `{alpha!r}`.")
        lo, hi = box
        validate_box(lo, hi)
        self.mesh, self.dofs = mesh, dofs
        self.alpha: float = float(alpha)
        self.box: tuple[float, float] = (float(lo), float(hi))
        self.constants = constants_bundle(alpha, mu_h)
        self.K = assemble_stiffness(mesh, dofs)
        self.M = assemble_mass(mesh, dofs)
        self.metrics = ConstrainedMetrics(mesh, dofs, alpha, box)

    @property
    def gamma_h(self) -> float:
        """``μ_h M(1 + 2M/√α)``."""
        c = self.constants
        return c.mu_h * c.M * (1 + 2 * c.L)

    def b_K(self, v: Pair, phi: Pair) -> float:  # pylint: disable=invalid-name
        """``v₁ᵀKφ₂ + φ₁ᵀKv₂ − N(v₂)·φ₂ − v₁ᵀMφ₁/√α``."""
        return float(self.b_K_covector(v) @ concatenate(phi))

    def b_K_covector(self, v: Pair) -> ndarray:  # pylint: disable=invalid-name
        """Coefficients of the linear functional ``φ ↦ b_K(v, φ)``."""
        v1, v2 = v
        clamped = assemble_clamped_term(self.mesh, self.dofs, v2, self.alpha, *self.box)
        return concatenate([self.K @ v2 - (self.M @ v1) / sqrt(self.alpha), self.K @ v1 - clamped])

    def test_direction(self, psi: Pair) -> Pair:
        """``T ψ``."""
        psi1, psi2 = psi
        mu, gamma = self.constants.mu_h, self.gamma_h
        return psi2 / mu - gamma * psi1, psi1 / mu + gamma * psi2

    def sides(self, v: Pair, w: Pair) -> tuple[float, float]:
        """Left and right-hand sides of the monotonicity inequality."""
        phi = self.test_direction((v[0] - w[0], v[1] - w[1]))
        lhs = self.b_K(v, phi) - self.b_K(w, phi)
        c = self.constants
        rhs = self.metrics.distance(v, w) * self.metrics.norms.product(phi) / (c.kappa_h * c.mu_h)
        return lhs, rhs

    def dense_inf_sup(self, B=None) -> float:
        """Dense inf-sup constant of the unbounded-box system (test norm ``‖·‖_α``).

        ``B`` defaults to the assembled block matrix ``[[−εM, K], [K, εM]]``.
        """
        if B is None:
            eps = 1 / sqrt(self.alpha)
            B = bmat([[-eps * self.M, self.K], [self.K, eps * self.M]])
        trial = block_diag([self.K, self.K])
        c = self.constants
        test = trial + (c.M**2 / self.alpha) * block_diag([self.M, self.M])
        return inf_sup_constant(B, trial, test)

    def evaluated_matrix(self) -> ndarray:
        """Matrix of ``b_K`` built row by row from :meth:`b_K_covector` on unit pairs."""
        n = self.dofs.n_dof
        rows = []
        for unit in identity(2 * n):
            rows.append(self.b_K_covector((unit[:n], unit[n:])))
        return vstack(rows)

    def inf_sup_check(self) -> InfSupCheck:
        """Cross-check the inf-sup constant of the assembled and the evaluated form.

        Only meaningful for an unbounded box, where ``b_K`` is bilinear.
        """
        value = self.dense_inf_sup()
        evaluated = self.dense_inf_sup(self.evaluated_matrix())
        gap = abs(evaluated - value) / value if value > 0 else float("inf")
        c = self.constants
        bound = 1 / (c.kappa_h * c.mu_h)
        passed = gap <= INF_SUP_GAP_RTOL and value >= bound * (1 - MARGIN_RTOL)
        return InfSupCheck(value, evaluated, gap, bound, passed)


def verify_bK_monotonicity(  # pylint: disable=invalid-name
    mesh: TriMesh,
    dofs: DofMap,
    alpha: float,
    box: tuple[float, float],
    trials: int = 100,
    *,
    seed: int = 42,
    mu_h: float = 1.0,
    spread: float = 1.5,
) -> MonotonicityReport:
    """Check strong monotonicity of ``b_K`` on random pairs of discrete pairs.

    Random coefficients are normal with standard deviation ``spread``; adjoint entries
    are scaled by ``√α`` so that the recovered controls straddle the bounds.
    With both box sides unbounded, the inf-sup constants of the assembled and the
    evaluated form must agree within 5% and respect ``1/(κ_h μ_h)``.
    """
    if not isinteger(trials) or trials < 1:
        raise ValueError(f"Number of trials must be a positive integer, not `{trials!r}`.")
    check = MonotonicityCheck(mesh, dofs, alpha, box, mu_h)
    rng = default_rng(seed)
    n = dofs.n_dof
    passed = 0
    min_ratio = float("inf")
    for _ in range(int(trials)):
        v = _random_pair(rng, n, alpha, spread)
        w = _random_pair(rng, n, alpha, spread)
        lhs, rhs = check.sides(v, w)
        if lhs - rhs >= -MARGIN_RTOL * max(1.0, abs(lhs), rhs):
            passed += 1
        if rhs > 0:
            min_ratio = min(min_ratio, lhs / rhs)
    bound = 1 / (check.constants.kappa_h * check.constants.mu_h)
    inf_sup = None
    if check.box[0] <= -UNBOUNDED and check.box[1] >= UNBOUNDED:
        inf_sup = check.inf_sup_check()
        if not inf_sup.passed:
            logger.warning(
                "Inf-sup cross-check failed: %.6e vs %.6e (gap %.2e, bound %.6e)",
                inf_sup.value,
                inf_sup.evaluated,
                inf_sup.gap,
                inf_sup.bound,
            )
    logger.info("Monotonicity: %d/%d trials passed (min ratio %.6f)", passed, trials, min_ratio)
    return MonotonicityReport(int(trials), passed, min_ratio, bound, inf_sup)


def _random_pair(rng, n: int, alpha: float, spread: float) -> tuple[ndarray, ndarray]:
    return spread * rng.standard_normal(n), spread * sqrt(alpha) * rng.standard_normal(n)
