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

"""Convergence of the unconstrained discretization against a manufactured solution."""

from __future__ import annotations

import logging
from collections.abc import Mapping, Sequence
from typing import Any

from pandas import DataFrame

from ..analysis import (
    ErrorReport,
    constants_bundle,
    manufactured_eigen_case,
    measure_nu,
    nu_deviation_bound,
    ritz_projection,
    zero_data_case,
)
from ..linalg.solvers import METHODS as LINEAR_METHODS
from ..mesh import TriMesh, interior_dof_map
from ..optsys import (
    ControlVariant,
    DiscreteSolution,
    ModelProblem,
    consistency_gap,
    solve_unconstrained,
)
from ..utils.rates import fit_rate
from ..utils.typing import ispositive
from .base import BaseStagedStudy

logger = logging.getLogger(__name__)

NU_LOWER_TOL: float = 1e-8
NU_UPPER_TOL: float = 1e-6
MIN_RATE_LEVELS: int = 3
NU_FINE_LEVEL: int = 6
NU_FINE_MAX: float = 0.1


class ConvergenceStudy(BaseStagedStudy):
    """Errors and quasi-best constants of the reduced optimality system per level.

    Args:
        alpha: Tikhonov parameter.
        variant: control action, ``"full"`` or ``"p0"``.
        zero_data: replace the desired state by zero (exact solution zero).
        tol: linear solver tolerance.
        linear_solver: ``"minres"``, ``"dense"`` or ``"direct"``.
        assert_rates: also check fitted rates (needs at least three levels).
    """

    COLUMNS = (
        "level",
        "h",
        "err_u_h1",
        "err_z_h1",
        "err_combined",
        "best_combined",
        "nu_measured",
        "nu_minus_1",
        "kappa_h_bound",
        "consistency_gap",
    )

    def __init__(
        self,
        alpha: float = 1.0,
        variant: ControlVariant | str = ControlVariant.FULL,
        *,
        zero_data: bool = False,
        tol: float = 1e-10,
        linear_solver: str = "direct",
        assert_rates: bool = False,
    ) -> None:
        if not ispositive(tol):
            raise ValueError(f"Tolerance must be positive, not `{tol!r}`.")
        if linear_solver not in LINEAR_METHODS:
            raise ValueError(
                f"Unknown linear solver `{linear_solver!r}`, expected one of {LINEAR_METHODS}."
            )
        self.case = zero_data_case(alpha) if zero_data else manufactured_eigen_case(alpha)
        self.problem = ModelProblem(alpha, self.case.u_d, variant)
        self.zero_data: bool = bool(zero_data)
        self.tol: float = float(tol)
        self.linear_solver: str = linear_solver
        self.assert_rates: bool = bool(assert_rates)
        self.finest: tuple[TriMesh, DiscreteSolution] | None = None

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}(alpha={self.alpha}, variant={self.variant.value!r}, "
            f"zero_data={self.zero_data})"
        )

    ################################################################################
    ## PROPERTIES
    ################################################################################
    @property
    def alpha(self) -> float:
        """Tikhonov parameter."""
        return self.problem.alpha

    @property
    def variant(self) -> ControlVariant:
        """Control action."""
        return self.problem.variant

    @property
    def RATE_COLUMNS(self) -> tuple[str, ...]:  # pylint: disable=invalid-name
        """Columns whose rates are fitted."""
        if self.variant is ControlVariant.P0:
            return ("err_combined", "nu_minus_1", "consistency_gap")
        return ("err_combined", "nu_minus_1")

    ################################################################################
    ## STAGES
    ################################################################################
    def _solve_single_level(self, mesh: TriMesh) -> DiscreteSolution:
        dofs = interior_dof_map(mesh)
        solution = solve_unconstrained(
            mesh, dofs, self.problem, self.tol, method=self.linear_solver
        )
        self.finest = (mesh, solution)
        logger.info("Solved level %d with %d dofs per component", mesh.level, dofs.n_dof)
        return solution

    def _measure_single_level(self, mesh: TriMesh, solution: DiscreteSolution) -> ErrorReport:
        dofs = interior_dof_map(mesh)
        gap = 0.0
        if self.variant is ControlVariant.P0:
            z_ritz = ritz_projection(mesh, dofs, self.case.exact_z)
            gap = consistency_gap(mesh, dofs, self.problem, z_ritz)
        return measure_nu(self.case, mesh, dofs, solution, consistency_gap=gap)

    def _build_single_row(self, report: ErrorReport) -> dict[str, float]:
        values = report.asdict()
        return {column: values[column] for column in self.COLUMNS}

    def _check(
        self, table: DataFrame, reports: Sequence[ErrorReport], rates: Mapping[str, float]
    ) -> list[str]:
        violations = []
        for report in reports:
            if report.nu_measured < 1 - NU_LOWER_TOL:
                violations.append(
                    f"nu_lower_bound: level {report.level} has nu `{report.nu_measured:.10f}` < 1"
                )
            if (
                self.variant is ControlVariant.FULL
                and report.nu_measured > report.kappa_h_bound + NU_UPPER_TOL
            ):
                violations.append(
                    f"quasi_best_bound: level {report.level} has nu `{report.nu_measured:.10f}` "
                    f"> `{report.kappa_h_bound:.10f}`"
                )
        if self.assert_rates and not self.zero_data:
            violations.extend(self._check_rates(reports, rates))
        return violations

    def _summary(self, reports: Sequence[ErrorReport]) -> dict[str, Any]:
        finest = reports[-1]
        return {
            "alpha": self.alpha,
            "variant": self.variant.value,
            "zero_data": self.zero_data,
            "constants": constants_bundle(self.alpha).asdict(),
            "nu_deviation_bound": nu_deviation_bound(self.alpha, finest.h),
            "rate_err_u_l2": fit_rate(
                [r.h for r in reports], [r.err_u_l2 for r in reports]
            ),
            "degenerate_levels": [r.level for r in reports if r.degenerate],
        }

    ################################################################################
    ## AUXILIARY
    ################################################################################
    def _check_rates(
        self, reports: Sequence[ErrorReport], rates: Mapping[str, float]
    ) -> list[str]:
        if len(reports) < MIN_RATE_LEVELS:
            return [f"rate_levels: rate assertions need {MIN_RATE_LEVELS} levels or more"]
        violations = []
        rate_l2 = fit_rate([r.h for r in reports], [r.err_u_l2 for r in reports])
        checks = [
            ("rate_err_combined", rates["rate_err_combined"], 0.85, 1.15),
            ("rate_err_u_l2", rate_l2, 1.75, 2.25),
        ]
        if self.variant is ControlVariant.FULL:
            checks.append(("rate_nu_minus_1", rates["rate_nu_minus_1"], 0.8, float("inf")))
        else:
            checks.append(("rate_consistency_gap", rates["rate_consistency_gap"], 1.75, 2.25))
        for name, rate, lo, hi in checks:
            if not lo <= rate <= hi:
                violations.append(f"{name}: fitted rate `{rate:.4f}` outside `[{lo}, {hi}]`")
        finest = reports[-1]
        if (
            self.variant is ControlVariant.FULL
            and finest.level >= NU_FINE_LEVEL
            and finest.nu_minus_1 >= NU_FINE_MAX
        ):
            violations.append(
                f"nu_fine_level: level {finest.level} has nu - 1 `{finest.nu_minus_1:.4e}` "
                f">= {NU_FINE_MAX}"
            )
        return violations
