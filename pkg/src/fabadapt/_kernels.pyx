# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: bounded primal simplex iterations and cyclic Jacobi sweeps.

Both functions mutate their array arguments in place and mirror the numpy
versions in ``_pykernels`` step for step (same pricing, ratio test and
tie-breaking), so either backend may be swapped in.
"""
import numpy as np

from libc.math cimport fabs, sqrt, INFINITY

cdef enum:
    AT_LOWER = 0
    AT_UPPER = 1
    FREE_ZERO = 2
    BASIC = 3
    FIXED = 4

cdef double TIE_EPS = 1e-12
cdef double HARRIS_TOL = 1e-9
cdef double DEGEN_STEP = 1e-12


def run_simplex(double[:, ::1] T, double[::1] beta, double[::1] d,
                const double[::1] lo, const double[::1] hi,
                Py_ssize_t[::1] basis, signed char[::1] status, double[::1] xval,
                double opt_tol, double piv_tol, Py_ssize_t max_iter,
                Py_ssize_t bland_after, bint use_bland):
    """Iterate the bounded primal simplex on a dense tableau.

    Returns ``(code, iterations, degenerate_pivots, bland_active)`` where code
    is 0 (optimal), 1 (unbounded ray found) or 2 (iteration cap reached).
    """
    cdef Py_ssize_t m = T.shape[0]
    cdef Py_ssize_t N = T.shape[1]
    cdef Py_ssize_t i, j, k, q, r, iters = 0, ndegen = 0, nnz
    cdef double dj, score, best, a, rate, ratio, rmin, tmax, t, piv, f, bestpiv
    cdef double colmax, pivmin, relaxed, harris
    cdef int direction, code = 0
    cdef signed char st
    cdef Py_ssize_t[::1] nz = np.empty(N, dtype=np.intp)
    cdef double[::1] ratios = np.empty(m, dtype=np.float64)

    while True:
        if iters >= max_iter:
            code = 2
            break

        # pricing
        q = -1
        best = 0.0
        for j in range(N):
            st = status[j]
            if st == BASIC or st == FIXED:
                continue
            dj = d[j]
            if st == AT_LOWER:
                if dj >= -opt_tol:
                    continue
                score = -dj
            elif st == AT_UPPER:
                if dj <= opt_tol:
                    continue
                score = dj
            else:
                if fabs(dj) <= opt_tol:
                    continue
                score = fabs(dj)
            if use_bland:
                q = j
                break
            if score > best:
                best = score
                q = j
        if q < 0:
            code = 0
            break

        direction = 1 if d[q] < 0 else -1

        # ratio test; pivots must be large relative to the column
        if lo[q] > -INFINITY and hi[q] < INFINITY:
            tmax = hi[q] - lo[q]
        else:
            tmax = INFINITY
        colmax = 1.0
        for i in range(m):
            if fabs(T[i, q]) > colmax:
                colmax = fabs(T[i, q])
        pivmin = piv_tol * colmax
        rmin = INFINITY
        harris = INFINITY
        for i in range(m):
            ratios[i] = INFINITY
            a = T[i, q]
            if fabs(a) <= pivmin:
                continue
            rate = -direction * a
            k = basis[i]
            if rate < 0:
                if lo[k] == -INFINITY:
                    continue
                ratio = (beta[i] - lo[k]) / (-rate)
                relaxed = ratio + HARRIS_TOL / (-rate)
            else:
                if hi[k] == INFINITY:
                    continue
                ratio = (hi[k] - beta[i]) / rate
                relaxed = ratio + HARRIS_TOL / rate
            if ratio < 0:
                ratio = 0.0
            ratios[i] = ratio
            if ratio < rmin:
                rmin = ratio
            if relaxed < harris:
                harris = relaxed

        r = -1
        if rmin < tmax:
            # second pass: Harris -- the largest pivot among rows whose exact
            # ratio fits under the relaxed bound (Dantzig), or the lowest-indexed
            # leaving variable among exact ties (Bland)
            if harris > tmax:
                harris = tmax
            if harris < rmin:
                harris = rmin
            bestpiv = -1.0
            for i in range(m):
                if use_bland:
                    if ratios[i] > rmin + TIE_EPS:
                        continue
                    if r < 0 or basis[i] < basis[r]:
                        r = i
                else:
                    if ratios[i] > harris or ratios[i] == INFINITY:
                        continue
                    if fabs(T[i, q]) > bestpiv:
                        bestpiv = fabs(T[i, q])
                        r = i
            t = ratios[r]
        else:
            if tmax == INFINITY:
                code = 1
                break
            t = tmax

        if t <= DEGEN_STEP:
            ndegen += 1
            if ndegen > bland_after:
                use_bland = True

        if t > 0:
            for i in range(m):
                a = T[i, q]
                if a != 0.0:
                    beta[i] -= direction * a * t
        xval[q] += direction * t

        if r < 0:
            # bound flip of the entering variable
            if direction > 0:
                status[q] = AT_UPPER
                xval[q] = hi[q]
            else:
                status[q] = AT_LOWER
                xval[q] = lo[q]
            iters += 1
            continue

        k = basis[r]
        rate = -direction * T[r, q]
        if lo[k] == hi[k]:
            status[k] = FIXED
            xval[k] = lo[k]
        elif rate < 0:
            status[k] = AT_LOWER
            xval[k] = lo[k]
        else:
            status[k] = AT_UPPER
            xval[k] = hi[k]
        beta[r] = xval[q]
        basis[r] = q
        status[q] = BASIC

        piv = T[r, q]
        nnz = 0
        for j in range(N):
            if T[r, j] != 0.0:
                T[r, j] /= piv
                nz[nnz] = j
                nnz += 1
        T[r, q] = 1.0
        for i in range(m):
            if i == r:
                continue
            f = T[i, q]
            if f == 0.0:
                continue
            for k in range(nnz):
                j = nz[k]
                T[i, j] -= f * T[r, j]
            T[i, q] = 0.0
        f = d[q]
        if f != 0.0:
            for k in range(nnz):
                j = nz[k]
                d[j] -= f * T[r, j]
        d[q] = 0.0
        iters += 1

    return code, iters, ndegen, use_bland


def jacobi_sweeps(double[:, ::1] A, double[:, ::1] V, double tol, Py_ssize_t max_sweeps):
    """Cyclic-by-row Jacobi rotations until the off-diagonal norm <= tol.

    ``A`` is overwritten with a (numerically) diagonal matrix and ``V`` is
    post-multiplied by the accumulated rotations. Returns the number of
    sweeps performed, or -1 when ``max_sweeps`` was exhausted.
    """
    cdef Py_ssize_t n = A.shape[0]
    cdef Py_ssize_t p, q, k, sweep
    cdef double off, apq, tau, t, c, s, x, y

    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n):
            for q in range(n):
                if p != q:
                    off += A[p, q] * A[p, q]
        if sqrt(off) <= tol:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                if tau >= 0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    x = A[k, p]
                    y = A[k, q]
                    A[k, p] = c * x - s * y
                    A[k, q] = s * x + c * y
                for k in range(n):
                    x = A[p, k]
                    y = A[q, k]
                    A[p, k] = c * x - s * y
                    A[q, k] = s * x + c * y
                A[p, q] = 0.0
                A[q, p] = 0.0
                for k in range(n):
                    x = V[k, p]
                    y = V[k, q]
                    V[k, p] = c * x - s * y
                    V[k, q] = s * x + c * y
    return -1
