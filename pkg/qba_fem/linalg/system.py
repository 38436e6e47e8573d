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

"""Two-by-two block systems."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from os import PathLike

from numpy import abs as np_abs
from numpy import array, ndarray
from numpy.linalg import norm
from scipy.io import mmwrite
from scipy.sparse import bmat, csr_matrix, issparse


def relative_asymmetry(matrix) -> float:
    """``max|A − Aᵀ| / max|A|`` (zero for the zero matrix)."""
    if issparse(matrix):
        matrix = csr_matrix(matrix)
        scale = abs(matrix).max()
        defect = abs(matrix - matrix.T).max() if matrix.nnz else 0.0
    else:
        matrix = array(matrix, dtype=float)
        scale = np_abs(matrix).max() if matrix.size else 0.0
        defect = np_abs(matrix - matrix.T).max() if matrix.size else 0.0
    return float(defect / scale) if scale > 0 else 0.0


def is_symmetric(matrix, rtol: float = 1e-13) -> bool:
    """Whether ``matrix`` is square and symmetric up to ``rtol`` relative to its largest entry."""
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    return relative_asymmetry(matrix) <= rtol


@dataclass(frozen=True, eq=False)
class BlockSystem:
    """Linear system ``[[B11, B12], [B21, B22]] x = rhs``.

    Args:
        b11: ``(n, n)`` block.
        b12: ``(n, m)`` block.
        b21: ``(m, n)`` block.
        b22: ``(m, m)`` block.
        rhs: right-hand side of length ``n + m``.
    """

    b11: csr_matrix
    b12: csr_matrix
    b21: csr_matrix
    b22: csr_matrix
    rhs: ndarray

    def __post_init__(self) -> None:
        for name in ("b11", "b12", "b21", "b22"):
            object.__setattr__(self, name, csr_matrix(getattr(self, name), dtype=float))
        rhs = array(self.rhs, dtype=float)
        rhs.setflags(write=False)
        object.__setattr__(self, "rhs", rhs)
        self._validate_dimensions()

    ################################################################################
    ## PROPERTIES
    ################################################################################
    @property
    def shape(self) -> tuple[int, int]:
        """Block sizes ``(n, m)``."""
        return self.b11.shape[0], self.b22.shape[0]

    @property
    def size(self) -> int:
        """Total number of unknowns."""
        return sum(self.shape)

    @cached_property
    def matrix(self) -> csr_matrix:
        """Assembled operator."""
        matrix = bmat([[self.b11, self.b12], [self.b21, self.b22]], format="csr")
        matrix.sum_duplicates()
        matrix.sort_indices()
        return matrix

    ################################################################################
    ## API
    ################################################################################
    def asymmetry(self) -> float:
        """Relative asymmetry of the assembled operator."""
        return relative_asymmetry(self.matrix)

    def residual(self, x: ndarray) -> float:
        """Euclidean norm of ``rhs − A x``."""
        return float(norm(self.rhs - self.matrix @ x))

    def relative_residual(self, x: ndarray) -> float:
        """Residual relative to ``‖rhs‖`` (absolute if the right-hand side vanishes)."""
        scale = norm(self.rhs)
        residual = self.residual(x)
        return float(residual / scale) if scale > 0 else residual

    def split(self, x: ndarray) -> tuple[ndarray, ndarray]:
        """Split a solution vector into its two block components."""
        n, _ = self.shape
        return x[:n], x[n:]

    def dump(self, path: str | PathLike) -> None:
        """Write the assembled operator in MatrixMarket coordinate format."""
        mmwrite(str(path), self.matrix.tocoo(), comment="block optimality system")

    ################################################################################
    ## VALIDATION
    ################################################################################
    def _validate_dimensions(self) -> None:
        n, m = self.b11.shape[0], self.b22.shape[0]
        expected = {"b11": (n, n), "b12": (n, m), "b21": (m, n), "b22": (m, m)}
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise ValueError(
                    f"Block `{name}` has shape `{getattr(self, name).shape}`, expected `{shape}`."
                )
        if self.rhs.shape != (n + m,):
            raise ValueError(
                f"Right-hand side has shape `{self.rhs.shape}`, expected `({n + m},)`."
            )
