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

"""Exception hierarchy."""

from __future__ import annotations

from collections.abc import Sequence


class QbaError(Exception):
    """Base class for all library errors."""


class ZeroDofError(QbaError, ValueError):
    """Mesh without interior degrees of freedom."""


class NotPositiveDefiniteError(QbaError, ValueError):
    """Matrix expected to be symmetric positive definite is not."""


class AsymmetricSystemError(QbaError, ValueError):
    """System expected to be symmetric is not."""


class ConfigError(QbaError, ValueError):
    """Invalid run configuration."""


class InvariantViolation(QbaError, AssertionError):
    """Run-level acceptance assertion failed."""


class SolverError(QbaError, RuntimeError):
    """Numerical failure of an iterative or nonlinear solver.

    Args:
        message: human readable description.
        residual: last achieved residual norm.
        iterations: number of iterations performed.
        history: residual norms per iteration (if tracked).
    """

    def __init__(
        self,
        message: str,
        residual: float | None = None,
        iterations: int | None = None,
        history: Sequence[float] = (),
    ) -> None:
        super().__init__(message)
        self.residual: float | None = residual
        self.iterations: int | None = iterations
        self.history: tuple[float, ...] = tuple(history)


class ConvergenceError(SolverError):
    """Iteration budget exhausted before reaching the tolerance."""


class NegativeCurvatureError(SolverError):
    """Conjugate gradients met a direction with non-positive curvature."""


class BreakdownError(SolverError):
    """Krylov process broke down before converging."""
