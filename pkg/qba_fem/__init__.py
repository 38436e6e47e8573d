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

"""Quasi-best approximation benchmarks for the rescaled optimality system of Tikhonov-regularized optimal control."""

__copyright__ = "(C) Copyright qba-fem developers 2026"
__version__ = "0.1.0"


__all__ = [
    "__copyright__",
    "__version__",
]
