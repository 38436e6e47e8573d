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

"""Quasi-best approximation of the box-constrained discretization."""

from __future__ import annotations

import logging
from collections.abc import Mapping, Sequence
from dataclasses import asdict, dataclass
from typing import Any

from numpy import ndarray
from pandas import DataFrame

from ..analysis import (
    ConstrainedMetrics,
    MonotonicityReport,
    constants_bundle,
    manufactured_eigen_case,
    verify_bK_monotonicity,
)
from ..fem import inactive_fraction
from ..linalg import solve_spd
from ..mesh import TriMesh, build_uniform_unit_square, interior_dof_map, prolongation
from ..optsys import Box, DiscreteSolution, ModelProblem, solve_box_constrained
from ..optsys.constrained import METHODS as BOX_METHODS
from ..utils.typing import isinteger, ispositive
from .base import BaseStagedStudy

logger = logging.getLogger(__name__)

REFERENCE_TOL: float = 1e-12
BOUND_TOL: float = 1e-6
MONOTONICITY_GRID: int = 4
MIN_RATE_LEVELS: int = 3


@dataclass(frozen=True)
class ConstrainedReport:
    """Errors of one level against the overkill reference."""

    level: int
    h: float
    err_u_h1: float
    err_z_h1: float
    d_K_alpha: float  # pylint: disable=invalid-name
    ritz_distance: float
    qba_cc_bound: float
    supercloseness: float
    iterations: int
    inactive_area: float
    tolerance: float

    @property
    def holds(self) -> bool:
        """Whether the error respects the quasi-best bound."""
        return self.d_K_alpha <= self.qba_cc_bound + self.tolerance


@dataclass(frozen=True)
class _Reference:
    mesh: TriMesh
    solution: DiscreteSolution
    metrics: ConstrainedMetrics
    scale: float


class ConstrainedStudy(BaseStagedStudy):
    """Box-constrained convergence against a reference two refinements finer.

    Every level reports ``d_{K,α}(x_ref, x_h)``, the distance ``d_{K,α}(x_ref, R_h x_ref)``
    to the coarse Ritz projection (``ritz_distance``, an upper bound on the best
    approximation error) and the bound ``(κ_h μ_h + 1)`` times the latter.
    The area of the inactive set ``{q_lo < q_h < q_hi}`` is reported alongside.

    Args:
        alpha: Tikhonov parameter.
        box: control bounds ``(q_lo, q_hi)``.
        method: nonlinear solver, ``"ssn"`` (default) or ``"fixed-point"``.
        tol: nonlinear residual tolerance on the studied levels.
        max_iter: nonlinear iteration budget.
        linear_solver: inner linear solver.
        trials: random pairs of the monotonicity suite (``0`` skips it).
        seed: seed of the monotonicity suite.
        assert_rates: also check the fitted error rate.
    """

    COLUMNS = (
        "level",
        "h",
        "err_u_h1",
        "err_z_h1",
        "d_K_alpha",
        "ritz_distance",
        "qba_cc_bound",
        "supercloseness",
        "iterations",
        "inactive_area",
    )
    RATE_COLUMNS = ("d_K_alpha", "supercloseness")
    REFERENCE_GAP = 2
    MAX_LEVEL = 5

    def __init__(  # pylint: disable=too-many-arguments
        self,
        alpha: float = 1.0,
        box: tuple[float, float] = (-0.2, 0.2),
        method: str = "ssn",
        *,
        tol: float = 1e-10,
        max_iter: int = 50,
        linear_solver: str = "direct",
        trials: int = 0,
        seed: int = 42,
        assert_rates: bool = False,
    ) -> None:
        if method not in BOX_METHODS:
            raise ValueError(
                f"Unknown constrained method `{method!r}`, expected one of {tuple(BOX_METHODS)}."
            )
        if not ispositive(tol):
            raise ValueError(f"Tolerance must be positive, not `{tol!r}`.")
        for name, value in (("trials", trials), ("seed", seed)):
            if not isinteger(value) or value < 0:
                raise ValueError(f"`{name}` must be a non-negative integer, not `{value!r}`.")
        self.case = manufactured_eigen_case(alpha)
        self.problem = ModelProblem(alpha, self.case.u_d, box=Box(*box))
        self.method: str = method
        self.tol: float = float(tol)
        self.max_iter: int = max_iter
        self.linear_solver: str = linear_solver
        self.trials: int = int(trials)
        self.seed: int = int(seed)
        self.assert_rates: bool = bool(assert_rates)
        self.constants = constants_bundle(alpha)
        self.monotonicity: MonotonicityReport | None = None
        self._reference: _Reference | None = None

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}(alpha={self.alpha}, box={tuple(self.box)}, "
            f"method={self.method!r})"
        )

    ################################################################################
    ## PROPERTIES
    ################################################################################
    @property
    def alpha(self) -> float:
        """Tikhonov parameter."""
        return self.problem.alpha

    @property
    def box(self) -> Box:
        """Control bounds."""
        return self.problem.box

    @property
    def reference(self) -> DiscreteSolution | None:
        """Overkill reference solution of the last run."""
        return None if self._reference is None else self._reference.solution

    ################################################################################
    ## STAGES
    ################################################################################
    def _prepare(self, hierarchy: Sequence[TriMesh]) -> None:
        mesh = hierarchy[-1]
        dofs = interior_dof_map(mesh)
        solution = solve_box_constrained(
            mesh,
            dofs,
            self.problem,
            self.method,
            REFERENCE_TOL,
            max(self.max_iter, 50),
            linear_solver="direct",
        )
        metrics = ConstrainedMetrics(mesh, dofs, self.alpha, self.box)
        scale = max(1.0, metrics.norms.product((solution.u, solution.z)))
        self._reference = _Reference(mesh, solution, metrics, scale)
        logger.info(
            "Reference on level %d: %d iterations, residual %.3e",
            mesh.level,
            solution.iterations,
            solution.residual,
        )
        if self.trials:
            coarse = build_uniform_unit_square(MONOTONICITY_GRID)
            self.monotonicity = verify_bK_monotonicity(
                coarse,
                interior_dof_map(coarse),
                self.alpha,
                self.box,
                self.trials,
                seed=self.seed,
                mu_h=self.constants.mu_h,
            )

    def _solve_single_level(self, mesh: TriMesh) -> DiscreteSolution:
        solution = solve_box_constrained(
            mesh,
            interior_dof_map(mesh),
            self.problem,
            self.method,
            self.tol,
            self.max_iter,
            linear_solver=self.linear_solver,
        )
        logger.info("Solved level %d in %d iterations", mesh.level, solution.iterations)
        return solution

    def _measure_single_level(
        self, mesh: TriMesh, solution: DiscreteSolution
    ) -> ConstrainedReport:
        reference = self._reference
        dofs = interior_dof_map(mesh)
        P = prolongation(mesh, reference.mesh)
        x_ref = (reference.solution.u, reference.solution.z)
        K_ref = reference.metrics.norms.K
        coarse = ConstrainedMetrics(mesh, dofs, self.alpha, self.box)
        ritz = tuple(_galerkin(coarse.norms.K, P, K_ref, v) for v in x_ref)
        distance = reference.metrics.distance
        error = (x_ref[0] - P @ solution.u, x_ref[1] - P @ solution.z)
        best = distance(x_ref, (P @ ritz[0], P @ ritz[1]))
        c = self.constants
        return ConstrainedReport(
            level=mesh.level,
            h=mesh.h,
            err_u_h1=reference.metrics.norms.h1(error[0]),
            err_z_h1=reference.metrics.norms.h1(error[1]),
            d_K_alpha=distance(x_ref, (P @ solution.u, P @ solution.z)),
            ritz_distance=best,
            qba_cc_bound=(c.kappa_h * c.mu_h + 1) * best,
            supercloseness=coarse.distance((solution.u, solution.z), ritz),
            iterations=solution.iterations,
            inactive_area=inactive_fraction(mesh, dofs, solution.z, self.alpha, *self.box),
            tolerance=BOUND_TOL * reference.scale,
        )

    def _build_single_row(self, report: ConstrainedReport) -> dict[str, float]:
        values = asdict(report)
        return {column: values[column] for column in self.COLUMNS}

    def _check(
        self,
        table: DataFrame,
        reports: Sequence[ConstrainedReport],
        rates: Mapping[str, float],
    ) -> list[str]:
        violations = [
            f"qba_cc_bound: level {r.level} has d_K_alpha `{r.d_K_alpha:.6e}` "
            f"> bound `{r.qba_cc_bound:.6e}`"
            for r in reports
            if not r.holds
        ]
        if self.monotonicity is not None and not self.monotonicity.ok:
            violations.append(
                f"bK_monotonicity: {self.monotonicity.passed}/{self.monotonicity.trials} "
                "trials passed"
            )
        if self.assert_rates:
            if len(reports) < MIN_RATE_LEVELS:
                violations.append(
                    f"rate_levels: rate assertions need {MIN_RATE_LEVELS} levels or more"
                )
            elif not rates["rate_d_K_alpha"] >= 0.85:
                violations.append(
                    f"rate_d_K_alpha: fitted rate `{rates['rate_d_K_alpha']:.4f}` below 0.85"
                )
        return violations

    def _summary(self, reports: Sequence[ConstrainedReport]) -> dict[str, Any]:
        reference = self._reference
        return {
            "alpha": self.alpha,
            "box": list(self.box),
            "method": self.method,
            "constants": self.constants.asdict(),
            "reference_level": reference.mesh.level,
            "reference_iterations": reference.solution.iterations,
            "reference_residual": reference.solution.residual,
            "monotonicity": None if self.monotonicity is None else asdict(self.monotonicity),
        }


def _galerkin(K_coarse, P, K_fine, v: ndarray) -> ndarray:  # pylint: disable=invalid-name
    """Coarse Ritz projection of a fine function: ``K_c R = Pᵀ K_f v``."""
    return solve_spd(K_coarse, P.T @ (K_fine @ v), tol=REFERENCE_TOL)
