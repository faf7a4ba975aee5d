"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``.

Same pricing rule, Harris ratio test and tie-breaking as the Cython code; used when
the extension is unavailable or ``FABADAPT_PURE_PYTHON=1`` is set.
"""
import numpy as np

AT_LOWER, AT_UPPER, FREE_ZERO, BASIC, FIXED = 0, 1, 2, 3, 4

TIE_EPS = 1e-12
HARRIS_TOL = 1e-9
DEGEN_STEP = 1e-12


def run_simplex(T, beta, d, lo, hi, basis, status, xval,
                opt_tol, piv_tol, max_iter, bland_after, use_bland):
    m, N = T.shape
    iters = 0
    ndegen = 0
    code = 0
    use_bland = bool(use_bland)

    while True:
        if iters >= max_iter:
            code = 2
            break

        score = np.zeros(N)
        low = status == AT_LOWER
        upp = status == AT_UPPER
        fre = status == FREE_ZERO
        score[low] = np.where(d[low] < -opt_tol, -d[low], 0.0)
        score[upp] = np.where(d[upp] > opt_tol, d[upp], 0.0)
        score[fre] = np.where(np.abs(d[fre]) > opt_tol, np.abs(d[fre]), 0.0)
        eligible = np.flatnonzero(score > 0.0)
        if eligible.size == 0:
            break
        q = int(eligible[0]) if use_bland else int(np.argmax(score))

        direction = 1 if d[q] < 0 else -1
        tmax = hi[q] - lo[q] if (np.isfinite(lo[q]) and np.isfinite(hi[q])) else np.inf

        col = T[:, q]
        rate = -direction * col
        kb = basis
        ratios = np.full(m, np.inf)
        relaxed = np.full(m, np.inf)
        colmax = max(1.0, np.abs(col).max()) if m else 1.0
        usable = np.abs(col) > piv_tol * colmax
        dec = usable & (rate < 0) & np.isfinite(lo[kb])
        inc = usable & (rate > 0) & np.isfinite(hi[kb])
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios[dec] = (beta[dec] - lo[kb[dec]]) / (-rate[dec])
            ratios[inc] = (hi[kb[inc]] - beta[inc]) / rate[inc]
            relaxed[dec] = ratios[dec] + HARRIS_TOL / (-rate[dec])
            relaxed[inc] = ratios[inc] + HARRIS_TOL / rate[inc]
        np.maximum(ratios, 0.0, out=ratios)
        rmin = ratios.min() if m else np.inf

        r = -1
        if rmin < tmax:
            if use_bland:
                ties = np.flatnonzero(ratios <= rmin + TIE_EPS)
                r = int(ties[np.argmin(kb[ties])])
            else:
                harris = min(max(relaxed.min(), rmin), tmax)
                cand = np.flatnonzero(ratios <= harris)
                r = int(cand[np.argmax(np.abs(col[cand]))])
            t = ratios[r]
        else:
            if tmax == np.inf:
                code = 1
                break
            t = tmax

        if t <= DEGEN_STEP:
            ndegen += 1
            if ndegen > bland_after:
                use_bland = True

        if t > 0:
            beta -= direction * col * t
        xval[q] += direction * t

        if r < 0:
            if direction > 0:
                status[q] = AT_UPPER
                xval[q] = hi[q]
            else:
                status[q] = AT_LOWER
                xval[q] = lo[q]
            iters += 1
            continue

        k = basis[r]
        rate_r = -direction * T[r, q]
        if lo[k] == hi[k]:
            status[k] = FIXED
            xval[k] = lo[k]
        elif rate_r < 0:
            status[k] = AT_LOWER
            xval[k] = lo[k]
        else:
            status[k] = AT_UPPER
            xval[k] = hi[k]
        beta[r] = xval[q]
        basis[r] = q
        status[q] = BASIC

        pivot(T, d, r, q)
        iters += 1

    return code, iters, ndegen, use_bland


def pivot(T, d, r, q):
    """Gauss-Jordan pivot on entry (r, q) of the tableau and reduced costs."""
    nzc = np.flatnonzero(T[r])
    T[r, nzc] /= T[r, q]
    T[r, q] = 1.0
    prow = T[r, nzc]
    f = T[:, q].copy()
    f[r] = 0.0
    rows = np.flatnonzero(f)
    if rows.size:
        T[np.ix_(rows, nzc)] -= np.outer(f[rows], prow)
        T[rows, q] = 0.0
    if d[q] != 0.0:
        d[nzc] -= d[q] * prow
    d[q] = 0.0


def jacobi_sweeps(A, V, tol, max_sweeps):
    n = A.shape[0]
    offmask = ~np.eye(n, dtype=bool)
    for sweep in range(max_sweeps + 1):
        off = np.sqrt(np.sum(A[offmask] ** 2))
        if off <= tol:
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
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                x = A[:, p].copy()
                y = A[:, q].copy()
                A[:, p] = c * x - s * y
                A[:, q] = s * x + c * y
                x = A[p, :].copy()
                y = A[q, :].copy()
                A[p, :] = c * x - s * y
                A[q, :] = s * x + c * y
                A[p, q] = 0.0
                A[q, p] = 0.0
                x = V[:, p].copy()
                y = V[:, q].copy()
                V[:, p] = c * x - s * y
                V[:, q] = s * x + c * y
    return -1
