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

"""Sparse and dense linear algebra for block optimality systems."""

from .krylov import conjugate_gradient, minres
from .solvers import DENSE_LIMIT, SymIndefiniteSolver, solve_spd, solve_sym_indefinite
from .spectral import generalized_eig_max, inf_sup_constant
from .system import BlockSystem, is_symmetric, relative_asymmetry

__all__ = [
    "DENSE_LIMIT",
    "BlockSystem",
    "SymIndefiniteSolver",
    "conjugate_gradient",
    "generalized_eig_max",
    "inf_sup_constant",
    "is_symmetric",
    "minres",
    "relative_asymmetry",
    "solve_spd",
    "solve_sym_indefinite",
]
