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

"""Staged study abstract base class."""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from collections import namedtuple
from collections.abc import Mapping, Sequence
from typing import Any

from pandas import DataFrame

from ..mesh import TriMesh, mesh_hierarchy
from ..utils.rates import fit_rate
from ..utils.typing import isinteger

logger = logging.getLogger(__name__)

MAX_LEVEL: int = 7

StudyResult = namedtuple("StudyResult", ("table", "rates", "violations", "reports", "summary"))
StudyResult.__doc__ = """Outcome of a study.

Fields:
    table: one row per level, columns as declared by the study.
    rates: fitted log-log slopes keyed ``rate_<column>``.
    violations: messages naming each failed acceptance check (empty if all passed).
    reports: per-level measurement objects.
    summary: extra run information (constants, reference data, auxiliary checks).
"""


class BaseStagedStudy(ABC):
    """Convergence study over a range of refinement levels.

    The pipeline is: build meshes, solve each level, measure each level, build the
    table. Subclasses provide the single-level stages.
    """

    COLUMNS: tuple[str, ...] = ()
    RATE_COLUMNS: tuple[str, ...] = ()
    REFERENCE_GAP: int = 0
    MAX_LEVEL: int = MAX_LEVEL

    def run(self, levels: Sequence[int]) -> StudyResult:
        """Run the study on the given refinement levels."""
        levels = self._validate_levels(levels)
        meshes = self._build_meshes(levels)
        solutions = self._solve_levels(meshes)
        reports = self._measure_levels(meshes, solutions)
        return self._build_result(reports)

    ################################################################################
    ## STAGES / PIPELINE
    ################################################################################
    def _build_meshes(self, levels: Sequence[int]) -> tuple[TriMesh, ...]:
        """Build the nested hierarchy and pass it on to ``_prepare``.

        Note: the hierarchy reaches ``REFERENCE_GAP`` levels beyond the finest requested.
        """
        hierarchy = mesh_hierarchy(max(levels) + self.REFERENCE_GAP)
        self._prepare(hierarchy)
        return tuple(hierarchy[level] for level in levels)

    def _solve_levels(self, meshes: Sequence[TriMesh]) -> tuple[Any, ...]:
        """Solve the discrete problem on every mesh."""
        return tuple(self._solve_single_level(mesh) for mesh in meshes)

    def _measure_levels(self, meshes: Sequence[TriMesh], solutions: Sequence[Any]) -> tuple:
        """Measure errors and constants for every solved level."""
        reports = []
        for mesh, solution in zip(meshes, solutions):
            report = self._measure_single_level(mesh, solution)
            logger.info("Measured level %d (h = %.6f)", mesh.level, mesh.h)
            reports.append(report)
        return tuple(reports)

    def _build_result(self, reports: Sequence[Any]) -> StudyResult:
        """Assemble the table, fit rates and run the acceptance checks."""
        rows = [self._build_single_row(report) for report in reports]
        table = DataFrame(rows, columns=list(self.COLUMNS))
        rates = {
            f"rate_{column}": fit_rate(table["h"], table[column]) for column in self.RATE_COLUMNS
        }
        violations = tuple(self._check(table, reports, rates))
        for violation in violations:
            logger.warning("Acceptance check failed: %s", violation)
        return StudyResult(table, rates, violations, tuple(reports), self._summary(reports))

    ################################################################################
    ## HOOKS
    ################################################################################
    def _prepare(self, hierarchy: Sequence[TriMesh]) -> None:
        """Hook run once with the full mesh hierarchy before any level is solved."""

    def _summary(self, reports: Sequence[Any]) -> Mapping[str, Any]:
        """Extra run information for the summary."""
        return {}

    ################################################################################
    ## ABSTRACT METHODS
    ################################################################################
    @abstractmethod
    def _solve_single_level(self, mesh: TriMesh) -> Any:
        """Single mesh equivalent of ``_solve_levels``."""

    @abstractmethod
    def _measure_single_level(self, mesh: TriMesh, solution: Any) -> Any:
        """Single mesh equivalent of ``_measure_levels``."""

    @abstractmethod
    def _build_single_row(self, report: Any) -> dict[str, float]:
        """Table row of a single report, keyed by ``COLUMNS``."""

    @abstractmethod
    def _check(
        self, table: DataFrame, reports: Sequence[Any], rates: Mapping[str, float]
    ) -> list[str]:
        """Acceptance checks; returns one message per violation."""

    ################################################################################
    ## VALIDATION
    ################################################################################
    def _validate_levels(self, levels: Sequence[int]) -> tuple[int, ...]:
        if isinstance(levels, (str, bytes)) or not isinstance(levels, Sequence):
            raise TypeError(f"Invalid levels type `{type(levels)}`, expected sequence of int.")
        if not levels:
            raise ValueError("Level range must not be empty.")
        if not all(isinteger(level) for level in levels):
            raise TypeError(f"Levels must be integers, not `{levels!r}`.")
        levels = tuple(int(level) for level in levels)
        if list(levels) != sorted(set(levels)):
            raise ValueError(f"Levels must be strictly increasing, not `{levels}`.")
        if levels[0] < 0 or levels[-1] > self.MAX_LEVEL:
            raise ValueError(f"Levels must lie within `0:{self.MAX_LEVEL}`, not `{levels}`.")
        return levels
