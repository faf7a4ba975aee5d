"""Dense symmetric linear algebra for small matrices (dimension up to ~200).

Cholesky factorization, cyclic Jacobi eigendecomposition and reduction of
the generalized problem ``A u = lam M u`` to standard form through the
Cholesky factor of ``M``. Tolerances are fixed module constants.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels

SYMMETRY_TOL = 1e-12
PIVOT_TOL = 1e-12
JACOBI_TOL = 1e-12
MAX_SWEEPS = 100


class LinalgError(ArithmeticError):
    pass


class NotPositiveDefinite(LinalgError):
    pass


class NoConvergence(LinalgError):
    pass


class NotSymmetric(LinalgError, ValueError):
    pass


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in ascending order; ``eigenvectors[:, j]`` pairs with ``eigenvalues[j]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0


def _as_square(A, name="matrix"):
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    return A


def check_symmetric(A, name="matrix"):
    scale = np.max(np.abs(A)) if A.size else 0.0
    if np.max(np.abs(A - A.T), initial=0.0) > SYMMETRY_TOL * scale:
        raise NotSymmetric(f"{name} is not symmetric")


def cholesky(M):
    """Lower-triangular ``L`` with ``L @ L.T == M``.

    Raises NotPositiveDefinite when a pivot falls to ``1e-12 * trace(M) / n``
    or below.
    """
    M = _as_square(M, "M")
    check_symmetric(M, "M")
    n = M.shape[0]
    L = np.zeros_like(M)
    floor = PIVOT_TOL * np.trace(M) / n if n else 0.0
    for j in range(n):
        piv = M[j, j] - L[j, :j] @ L[j, :j]
        if piv <= floor or piv <= 0.0:
            raise NotPositiveDefinite(f"pivot {j} is {piv:.3e}")
        L[j, j] = np.sqrt(piv)
        if j + 1 < n:
            L[j + 1:, j] = (M[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return L


def solve_lower(L, B):
    """Forward substitution ``L X = B`` (B may be a vector or a matrix)."""
    B = np.array(B, dtype=float)
    X = np.empty_like(B)
    for i in range(L.shape[0]):
        X[i] = (B[i] - L[i, :i] @ X[:i]) / L[i, i]
    return X


def solve_upper(U, B):
    """Back substitution ``U X = B``."""
    B = np.array(B, dtype=float)
    X = np.empty_like(B)
    for i in range(U.shape[0] - 1, -1, -1):
        X[i] = (B[i] - U[i, i + 1:] @ X[i + 1:]) / U[i, i]
    return X


def _fix_signs(V):
    # first significant component of each column made positive
    for j in range(V.shape[1]):
        col = V[:, j]
        cutoff = 1e-12 * np.max(np.abs(col))
        idx = np.flatnonzero(np.abs(col) > cutoff)
        if idx.size and col[idx[0]] < 0:
            V[:, j] = -col
    return V


def sym_eigen(A):
    """Eigendecomposition of a real symmetric matrix by cyclic Jacobi sweeps."""
    A = _as_square(A, "A")
    check_symmetric(A, "A")
    n = A.shape[0]
    W = np.ascontiguousarray(0.5 * (A + A.T))
    V = np.eye(n)
    scale = np.linalg.norm(W)
    sweeps = kernels.jacobi_sweeps(W, V, JACOBI_TOL * scale if scale > 0 else 0.0, MAX_SWEEPS)
    if sweeps < 0:
        raise NoConvergence(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")
    lam = np.diag(W).copy()
    order = np.argsort(lam, kind="stable")
    return EigenDecomposition(lam[order], _fix_signs(V[:, order]), sweeps)


def gen_eigen(A, M):
    """Solve ``A u = lam M u`` for symmetric ``A`` and positive definite ``M``.

    Eigenvectors are M-orthonormal: ``U.T @ M @ U == I``.
    """
    A = _as_square(A, "A")
    check_symmetric(A, "A")
    L = cholesky(M)
    if A.shape != L.shape:
        raise ValueError("A and M must have the same shape")
    C = solve_lower(L, solve_lower(L, A).T)
    C = 0.5 * (C + C.T)
    dec = sym_eigen(C)
    U = solve_upper(L.T, dec.eigenvectors)
    return EigenDecomposition(dec.eigenvalues, _fix_signs(U), dec.sweeps)


def lambda_max(A):
    """Largest eigenvalue of a symmetric matrix."""
    return float(sym_eigen(A).eigenvalues[-1])
