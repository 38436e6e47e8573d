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

"""Staged convergence studies producing tables, rates and acceptance checks."""

from .base import BaseStagedStudy, StudyResult
from .constrained import ConstrainedReport, ConstrainedStudy
from .convergence import ConvergenceStudy

__all__ = [
    "BaseStagedStudy",
    "ConstrainedReport",
    "ConstrainedStudy",
    "ConvergenceStudy",
    "StudyResult",
]
