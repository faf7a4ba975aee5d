import os
import subprocess
import sys

import numpy as np
import pytest

from fabadapt import kernels
from fabadapt.lp import solve_lp
from fabadapt.rng import Stream
from conftest import BACKENDS
from test_lp import random_feasible_lp

needs_ext = pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled extension not built")


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")


def test_pure_python_switch():
    env = dict(os.environ, FABADAPT_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import fabadapt; print(fabadapt.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


@needs_ext
@pytest.mark.parametrize("seed", range(30))
def test_simplex_parity(seed):
    p = random_feasible_lp(seed)
    a = solve_lp(p, backend="cython")
    b = solve_lp(p, backend="python")
    assert a.status == b.status
    assert a.iterations == b.iterations
    np.testing.assert_allclose(a.x, b.x, atol=1e-12)
    np.testing.assert_allclose(a.duals, b.duals, atol=1e-12)


@needs_ext
@pytest.mark.parametrize("n", [2, 5, 12, 30])
def test_jacobi_parity(n):
    G = Stream(n, "jac").normal((n, n))
    A = np.ascontiguousarray(G + G.T)
    outs = []
    for name in ("cython", "python"):
        _, jac = kernels.get_backend(name)
        Ak, V = A.copy(), np.eye(n)
        sweeps = jac(Ak, V, 1e-12 * np.linalg.norm(A), 100)
        outs.append((sweeps, Ak, V))
    assert outs[0][0] == outs[1][0]
    np.testing.assert_allclose(outs[0][1], outs[1][1], atol=1e-11)
    np.testing.assert_allclose(outs[0][2], outs[1][2], atol=1e-11)


def test_jacobi_diagonalizes(backend):
    _, jac = kernels.get_backend(backend)
    G = Stream(1, "jac").normal((6, 6))
    A = np.ascontiguousarray(G + G.T)
    Ak, V = A.copy(), np.eye(6)
    sweeps = jac(Ak, V, 1e-12, 100)
    assert sweeps >= 0
    np.testing.assert_allclose(V @ np.diag(np.diag(Ak)) @ V.T, A, atol=1e-10)
