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

"""Inf-sup constants and generalized eigenvalues."""

from __future__ import annotations

import logging

from numpy import array, ndarray
from numpy.random import default_rng
from scipy.linalg import LinAlgError, cholesky, eigh, solve_triangular, svdvals
from scipy.sparse import csc_matrix, issparse
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, eigsh

from ..exceptions import ConvergenceError, NotPositiveDefiniteError
from ..utils.typing import isinteger, ispositive
from .solvers import DENSE_LIMIT
from .system import relative_asymmetry

logger = logging.getLogger(__name__)

INF_SUP_LIMIT: int = 5000
GRAM_SYMMETRY_TOL: float = 1e-12


def inf_sup_constant(B, G_trial, G_test) -> float:
    """Discrete inf-sup constant of the bilinear form with matrix ``B``.

    ``inf_φ sup_v vᵀBφ / (‖v‖_{G_trial} ‖φ‖_{G_test})`` equals the smallest singular value
    of the whitened matrix ``L_trial⁻¹ B L_test⁻ᵀ`` with Cholesky factors ``G = L Lᵀ``.

    Args:
        B: ``(n_trial, n_test)`` matrix of the form.
        G_trial: trial-space Gram matrix (SPD).
        G_test: test-space Gram matrix (SPD).

    Returns:
        The inf-sup constant; zero when the test space is larger than the trial space.

    Raises:
        NotPositiveDefiniteError: if a Gram matrix is not SPD.
    """
    B = _dense(B)
    G_trial, G_test = _dense(G_trial), _dense(G_test)
    n_trial, n_test = B.shape
    if G_trial.shape != (n_trial, n_trial) or G_test.shape != (n_test, n_test):
        raise ValueError(
            f"Gram shapes `{G_trial.shape}`, `{G_test.shape}` do not conform to `{B.shape}`."
        )
    if max(n_trial, n_test) > INF_SUP_LIMIT:
        raise ValueError(f"Dense inf-sup computation limited to `{INF_SUP_LIMIT}` unknowns.")
    L_trial = _cholesky(G_trial, "trial")
    L_test = _cholesky(G_test, "test")
    if n_test > n_trial:
        return 0.0
    whitened = solve_triangular(L_trial, B, lower=True)
    whitened = solve_triangular(L_test, whitened.T, lower=True).T
    return float(svdvals(whitened).min())


def generalized_eig_max(
    A, B_gram, tol: float = 1e-8, max_iter: int | None = None, seed: int = 42
) -> float:
    """Largest eigenvalue of ``B_gram⁻¹ A`` for symmetric ``A`` and SPD ``B_gram``.

    Problems up to 2000 unknowns use the dense symmetric-definite LAPACK solver; larger
    ones use Lanczos iterations with a start vector drawn from ``seed``.

    Raises:
        NotPositiveDefiniteError: if ``B_gram`` is not SPD (dense path).
        ConvergenceError: if Lanczos iterations do not converge.
    """
    n = A.shape[0]
    if A.shape != (n, n) or B_gram.shape != (n, n):
        raise ValueError(f"Shapes `{A.shape}` and `{B_gram.shape}` are not square and equal.")
    if not ispositive(tol):
        raise ValueError(f"Tolerance must be positive, not `{tol!r}`.")
    if not isinteger(seed):
        raise TypeError(f"Seed must be an integer, not `{seed!r}`.")
    if relative_asymmetry(A) > GRAM_SYMMETRY_TOL:
        raise ValueError("Matrix `A` is not symmetric.")
    if n <= DENSE_LIMIT:
        A_dense, B_dense = _dense(A), _dense(B_gram)
        _cholesky(B_dense, "B_gram")
        values = eigh(A_dense, B_dense, eigvals_only=True, subset_by_index=[n - 1, n - 1])
        return float(values[-1])
    v0 = default_rng(seed).standard_normal(n)
    try:
        values = eigsh(
            csc_matrix(A),
            k=1,
            M=csc_matrix(B_gram),
            which="LA",
            v0=v0,
            tol=tol,
            maxiter=max_iter,
            return_eigenvectors=False,
        )
    except ArpackNoConvergence as error:
        raise ConvergenceError(
            f"Lanczos iteration did not converge: {error}", iterations=max_iter
        ) from error
    except ArpackError as error:
        raise NotPositiveDefiniteError(f"Generalized eigenproblem failed: {error}") from error
    logger.debug("Lanczos eigenvalue estimate %.12g for %d unknowns", values[-1], n)
    return float(values[-1])


################################################################################
## AUXILIARY
################################################################################
def _dense(matrix) -> ndarray:
    return matrix.toarray() if issparse(matrix) else array(matrix, dtype=float)


def _cholesky(gram: ndarray, label: str) -> ndarray:
    if relative_asymmetry(gram) > GRAM_SYMMETRY_TOL:
        raise NotPositiveDefiniteError(f"Gram matrix `{label}` is not symmetric.")
    try:
        return cholesky(gram, lower=True)
    except LinAlgError as error:
        raise NotPositiveDefiniteError(
            f"Gram matrix `{label}` is not positive definite."
        ) from error
