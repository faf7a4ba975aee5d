"""Compare the compiled and numpy kernels on the workloads the package runs.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Reports the median wall time per call for each backend and checks the
two backends return the same numbers.
"""
import argparse
import statistics
import time

import numpy as np

from fabadapt import kernels
from fabadapt.fa_core import PieceLp, as_plf, random_instance
from fabadapt.lp import LpProblem, solve_lp
from fabadapt.rng import Stream


def _time(fn, repeat):
    out, times = None, []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return statistics.median(times), out


def piece_lps(backend, count=40):
    inst = random_instance(3)
    plf = as_plf(inst)
    plp = PieceLp(plf, plf.feasible.center(), 5.0)
    return np.array([solve_lp(plp.problem(i), backend=backend).objective for i in range(count)])


def dense_lp(backend, m=120, n=80):
    s = Stream(11, "bench")
    A = s.normal((m, n))
    x0 = s.uniform(n)
    b = A @ x0 + s.uniform(m)
    c = s.normal(n)
    sol = solve_lp(LpProblem(c, A, "<=", b, lower=0.0, upper=10.0, maximize=True), backend=backend)
    return np.array([sol.objective])


def jacobi(backend, n=60):
    run = kernels.get_backend(backend)[1]
    s = Stream(5, "bench")
    G = s.normal((n, n))
    A = np.ascontiguousarray(G + G.T)
    V = np.eye(n)
    run(A, V, 1e-12 * np.linalg.norm(A), 100)
    return np.sort(np.diag(A))


WORKLOADS = [("40 piece LPs (n=50)", piece_lps), ("dense LP 120x80", dense_lp),
             ("Jacobi 60x60", jacobi)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = ["python"]
    try:
        kernels.get_backend("cython")
        backends.insert(0, "cython")
    except ImportError:
        print("compiled extension not built; timing the numpy kernels only")
    print(f"{'workload':<24}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for name, fn in WORKLOADS:
        res = {b: _time(lambda: fn(b), args.repeat) for b in backends}
        row = f"{name:<24}" + "".join(f"{res[b][0] * 1e3:>10.2f}ms" for b in backends)
        if len(backends) == 2:
            row += f"{res['python'][0] / res['cython'][0]:>9.1f}x"
            diff = np.max(np.abs(res["python"][1] - res["cython"][1]))
            if diff > 1e-9 * max(1.0, np.max(np.abs(res["python"][1]))):
                row += f"  MISMATCH {diff:.2e}"
        print(row)


if __name__ == "__main__":
    main()
