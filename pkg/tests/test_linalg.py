import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fabadapt.linalg import (NotPositiveDefinite, NotSymmetric, check_symmetric, cholesky,
                             gen_eigen, lambda_max, solve_lower, solve_upper, sym_eigen)
from fabadapt.rng import Stream


def rand_sym(seed, n):
    G = Stream(seed, "linalg").normal((n, n))
    return G + G.T


def rand_pd(seed, n):
    G = Stream(seed, "pd").normal((n, n))
    return G @ G.T / n + np.eye(n)


def test_cholesky_identity():
    np.testing.assert_array_equal(cholesky(np.eye(3)), np.eye(3))


def test_cholesky_small():
    L = cholesky(np.array([[4.0, 2.0], [2.0, 3.0]]))
    np.testing.assert_allclose(L, [[2.0, 0.0], [1.0, np.sqrt(2.0)]], atol=1e-15)


def test_cholesky_indefinite():
    with pytest.raises(NotPositiveDefinite):
        cholesky(np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_cholesky_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        cholesky(np.array([[1.0, 0.5], [0.0, 1.0]]))


@pytest.mark.parametrize("seed", range(5))
def test_cholesky_round_trip(seed):
    s = Stream(seed, "tri")
    n = 7
    L = np.tril(s.normal((n, n)), -1) + np.diag(s.uniform(n, 0.5, 2.0))
    np.testing.assert_allclose(cholesky(L @ L.T), L, atol=1e-9)


def test_triangular_solves():
    M = rand_pd(0, 6)
    L = cholesky(M)
    b = Stream(1, "rhs").normal(6)
    y = solve_lower(L, b)
    x = solve_upper(L.T, y)
    np.testing.assert_allclose(M @ x, b, atol=1e-10)


def test_sym_eigen_diagonal():
    d = sym_eigen(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_allclose(d.eigenvalues, [1, 2, 3])


def test_sym_eigen_swap():
    d = sym_eigen(np.array([[0.0, 1.0], [1.0, 0.0]]))
    np.testing.assert_allclose(d.eigenvalues, [-1, 1], atol=1e-14)


@pytest.mark.parametrize("seed", range(6))
def test_sym_eigen_invariants(seed):
    A = rand_sym(seed, 8)
    d = sym_eigen(A)
    V, lam = d.eigenvectors, d.eigenvalues
    assert np.all(np.diff(lam) >= 0)
    np.testing.assert_allclose(V @ np.diag(lam) @ V.T, A, atol=1e-9)
    np.testing.assert_allclose(V.T @ V, np.eye(8), atol=1e-9)
    assert np.max(np.abs(A @ V - V * lam)) <= 1e-9 * np.max(np.sum(np.abs(A), axis=1))


def test_sym_eigen_permutation_invariant():
    A = rand_sym(3, 9)
    P = np.eye(9)[Stream(3, "perm").raw(9).argsort()]
    np.testing.assert_allclose(sym_eigen(P @ A @ P.T).eigenvalues, sym_eigen(A).eigenvalues,
                               atol=1e-12)


def test_sym_eigen_deterministic_signs():
    A = rand_sym(4, 5)
    V1 = sym_eigen(A).eigenvectors
    V2 = sym_eigen(A.copy()).eigenvectors
    np.testing.assert_array_equal(V1, V2)


def test_gen_eigen_identity_mass():
    d = gen_eigen(np.diag([1.0, 3.0]), np.eye(2))
    np.testing.assert_allclose(d.eigenvalues, [1, 3])
    np.testing.assert_allclose(np.abs(d.eigenvectors), np.eye(2), atol=1e-14)


def test_gen_eigen_pencil_identity():
    M = rand_pd(5, 6)
    np.testing.assert_allclose(gen_eigen(M, M).eigenvalues, np.ones(6), atol=1e-10)


@pytest.mark.parametrize("seed", range(4))
def test_gen_eigen_m_orthonormal(seed):
    G = Stream(seed, "psd").normal((4, 10))
    A = G.T @ G
    M = rand_pd(seed, 10)
    d = gen_eigen(A, M)
    U = d.eigenvectors
    np.testing.assert_allclose(U.T @ M @ U, np.eye(10), atol=1e-9)
    resid = A @ U - (M @ U) * d.eigenvalues
    assert np.max(np.abs(resid)) <= 1e-9 * np.max(np.abs(A))
    assert d.eigenvalues.min() >= -1e-9


def test_gen_eigen_bad_mass():
    with pytest.raises(NotPositiveDefinite):
        gen_eigen(np.eye(2), np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_lambda_max():
    assert lambda_max(np.diag([1.0, -4.0, 2.5])) == pytest.approx(2.5)


def test_check_symmetric_tolerance():
    A = np.array([[1.0, 1.0], [1.0 + 1e-14, 1.0]])
    check_symmetric(A)
    with pytest.raises(NotSymmetric):
        check_symmetric(np.array([[1.0, 1.0], [1.1, 1.0]]))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 7), st.integers(0, 10 ** 6))
def test_sym_eigen_trace_and_reconstruction(n, seed):
    A = rand_sym(seed, n)
    d = sym_eigen(A)
    assert d.eigenvalues.sum() == pytest.approx(np.trace(A), abs=1e-9)
    np.testing.assert_allclose(d.eigenvectors @ np.diag(d.eigenvalues) @ d.eigenvectors.T, A,
                               atol=1e-9)
