"""Dense complex linear algebra used throughout the package.

All operators are plain ``numpy`` arrays of dtype ``complex128``. The helpers
here validate shapes and finiteness, and supply the handful of spectral
routines the rest of the package relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances shared by validation routines."""

    hermiticity_tol: float = 1e-9
    psd_tol: float = 1e-9
    trace_tol: float = 1e-9
    rank_rel_tol: float = 1e-10

    def __post_init__(self):
        for name in ("hermiticity_tol", "psd_tol", "trace_tol", "rank_rel_tol"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")


DEFAULT_TOLERANCES = Tolerances()


def as_matrix(M, square: bool = False) -> np.ndarray:
    """Coerce ``M`` to a finite 2-d complex array."""
    A = np.asarray(M, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] == 0 or A.shape[1] == 0:
        raise ValueError(f"expected a nonempty 2-d matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix contains NaN or Inf entries")
    if square and A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    return A


def dag(M: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(np.swapaxes(M, -1, -2))


def hermiticity_residual(M: np.ndarray) -> float:
    """Largest entrywise deviation ``max |M - M^H|``."""
    return float(np.max(np.abs(M - dag(M))))


def is_hermitian(M, tol: float = DEFAULT_TOLERANCES.hermiticity_tol) -> bool:
    A = as_matrix(M, square=True)
    return hermiticity_residual(A) <= tol


def hermitian_eigen(M, tol: float = DEFAULT_TOLERANCES.hermiticity_tol):
    """Eigendecomposition of a Hermitian matrix.

    Returns
    -------
    eigenvalues : ndarray of float, sorted descending
    eigenvectors : ndarray, columns matching ``eigenvalues``
    """
    A = as_matrix(M, square=True)
    if hermiticity_residual(A) > tol:
        raise ValueError("matrix is not Hermitian within tolerance")
    # symmetrize so eigh sees an exactly Hermitian input
    A = 0.5 * (A + dag(A))
    w, v = np.linalg.eigh(A)
    return w[::-1].copy(), v[:, ::-1].copy()


def psd_sqrt(M, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Principal square root of a positive semidefinite matrix.

    Eigenvalues in ``[-psd_tol, 0)`` are clipped to zero; anything more
    negative raises ``ValueError``.
    """
    w, v = hermitian_eigen(M, tol.hermiticity_tol)
    if w[-1] < -tol.psd_tol:
        raise ValueError(f"matrix is not positive semidefinite (eigenvalue {w[-1]:.3e})")
    root = np.sqrt(np.clip(w, 0.0, None))
    R = (v * root) @ dag(v)
    return 0.5 * (R + dag(R))


def vec(M) -> np.ndarray:
    """Column-stacking vectorization."""
    A = as_matrix(M)
    return A.reshape(-1, order="F")


def unvec(v, rows: int, cols: int | None = None) -> np.ndarray:
    """Inverse of :func:`vec`."""
    cols = rows if cols is None else cols
    return np.asarray(v, dtype=np.complex128).reshape((rows, cols), order="F")


def _stack(operators: Sequence) -> np.ndarray:
    ops = [as_matrix(op, square=True) for op in operators]
    if not ops:
        raise ValueError("operator list is empty")
    d = ops[0].shape[0]
    if any(op.shape != (d, d) for op in ops):
        raise ValueError("operators have mismatched dimensions")
    return np.stack(ops)


def vec_matrix(operators: Sequence) -> np.ndarray:
    """``(count, d*d)`` matrix whose rows are ``vec`` of each operator."""
    stack = operators if isinstance(operators, np.ndarray) and operators.ndim == 3 else _stack(operators)
    n, d, _ = stack.shape
    return np.swapaxes(stack, 1, 2).reshape(n, d * d)


def span_rank(operators: Sequence, rank_rel_tol: float = DEFAULT_TOLERANCES.rank_rel_tol) -> int:
    """Dimension of the linear span of a list of square operators.

    Singular values of the stacked vec-matrix are counted relative to the
    largest one, so the result does not depend on the overall scale.
    """
    if isinstance(operators, np.ndarray) and operators.ndim == 3:
        if operators.shape[0] == 0:
            raise ValueError("operator list is empty")
        A = vec_matrix(operators)
    else:
        A = vec_matrix(_stack(operators))
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rank_rel_tol * s[0]))


def kron(*factors) -> np.ndarray:
    """Kronecker product of one or more matrices, left to right."""
    if not factors:
        raise ValueError("kron needs at least one factor")
    out = as_matrix(factors[0])
    for f in factors[1:]:
        out = np.kron(out, as_matrix(f))
    return out


def is_unitary(U, tol: float = 1e-9) -> bool:
    A = as_matrix(U, square=True)
    return float(np.max(np.abs(dag(A) @ A - np.eye(A.shape[0])))) <= tol


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix."""
    Z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    Z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (Z + dag(Z))
