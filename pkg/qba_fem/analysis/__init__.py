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

"""Norms, constants and measurements of quasi-best approximation."""

from .constants import (
    AsymptoticCheck,
    ConstantsBundle,
    asymptotic_checks,
    constants_bundle,
    kappa_alpha,
    nu_deviation_bound,
)
from .manufactured import (
    ManufacturedCase,
    eigenfunction,
    manufactured_eigen_case,
    zero_data_case,
)
from .measurement import ErrorReport, h1_error, l2_error, measure_nu, mu_h_compute
from .monotonicity import (
    InfSupCheck,
    MonotonicityCheck,
    MonotonicityReport,
    verify_bK_monotonicity,
)
from .norms import (
    ConstrainedMetrics,
    DiscreteNorms,
    metrics_constrained,
    norms,
    ritz_projection,
    ritz_rhs,
)

__all__ = [
    "AsymptoticCheck",
    "ConstantsBundle",
    "ConstrainedMetrics",
    "DiscreteNorms",
    "ErrorReport",
    "InfSupCheck",
    "ManufacturedCase",
    "MonotonicityCheck",
    "MonotonicityReport",
    "asymptotic_checks",
    "constants_bundle",
    "eigenfunction",
    "h1_error",
    "kappa_alpha",
    "l2_error",
    "manufactured_eigen_case",
    "measure_nu",
    "metrics_constrained",
    "mu_h_compute",
    "norms",
    "nu_deviation_bound",
    "ritz_projection",
    "ritz_rhs",
    "verify_bK_monotonicity",
    "zero_data_case",
]
