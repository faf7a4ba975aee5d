"""Dense two-phase bounded-variable simplex with dual values.

Problems are stated as

    min / max  c^T x
    s.t.       A_i x  (<=, =, >=)  b_i      for each row i
               lower <= x <= upper          (infinite bounds allowed)

Every row gets a slack ``s_i`` with ``A_i x + s_i = b_i``; the relation is
encoded in the slack bounds. Phase 1 adds an artificial only for rows whose
slack would violate its bounds at the starting point, so equality rows are
handled without big-M terms. Row duals are read off the slack reduced costs.

Dual sign convention (Lagrangian ``c^T x - y^T (A x - b)``): for minimization
``<=`` rows have ``y <= 0`` and ``>=`` rows ``y >= 0``; for maximization the
signs flip. Reduced costs are ``c - A^T y``.
"""
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import kernels
from ._pykernels import pivot as _gj_pivot

OPT_TOL = 1e-9
PIVOT_TOL = 1e-9
FEAS_TOL = 1e-9
PHASE1_TOL = 1e-8
DEGEN_TOL = 1e-9

LE, EQ, GE = "<=", "=", ">="
_SENSE_ALIASES = {"<=": LE, "<": LE, "le": LE, "L": LE,
                  "=": EQ, "==": EQ, "eq": EQ, "E": EQ,
                  ">=": GE, ">": GE, "ge": GE, "G": GE}


class LpError(RuntimeError):
    pass


class NumericalBreakdown(LpError):
    pass


class LpFailure(LpError):
    """Raised by callers that need an optimal solution and did not get one."""

    def __init__(self, status, message=""):
        super().__init__(message or f"LP status {status.value}")
        self.status = status


class LpStatus(Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass
class LpProblem:
    c: np.ndarray
    A: np.ndarray
    senses: list
    b: np.ndarray
    lower: np.ndarray = None
    upper: np.ndarray = None
    maximize: bool = False

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        n = self.c.size
        self.A = np.asarray(self.A, dtype=float).reshape(-1, n)
        self.b = np.asarray(self.b, dtype=float).ravel()
        m = self.A.shape[0]
        if isinstance(self.senses, str):
            self.senses = [self.senses] * m
        self.senses = [_SENSE_ALIASES[s] for s in self.senses]
        if len(self.senses) != m or self.b.size != m:
            raise ValueError("senses and b must have one entry per row")
        self.lower = np.zeros(n) if self.lower is None else np.broadcast_to(
            np.asarray(self.lower, dtype=float), (n,)).copy()
        self.upper = np.full(n, np.inf) if self.upper is None else np.broadcast_to(
            np.asarray(self.upper, dtype=float), (n,)).copy()
        for arr, name in ((self.c, "c"), (self.A, "A"), (self.b, "b")):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} has non-finite entries")
        if np.any(np.isnan(self.lower)) or np.any(np.isnan(self.upper)):
            raise ValueError("bounds contain NaN")

    @property
    def shape(self):
        return self.A.shape


@dataclass
class LpSolution:
    status: LpStatus
    x: np.ndarray
    objective: float
    duals: np.ndarray
    reduced_costs: np.ndarray
    iterations: int = 0
    primal_degenerate: bool = False
    dual_degenerate: bool = False
    info: dict = field(default_factory=dict)

    @property
    def optimal(self):
        return self.status is LpStatus.OPTIMAL


def _fail(status, n, m, iters, **info):
    nan = np.full(n, np.nan)
    return LpSolution(status, nan, np.nan, np.full(m, np.nan), nan.copy(), iters, info=info)


def solve_lp(problem: LpProblem, backend=None) -> LpSolution:
    """Solve ``problem``; deterministic for identical input."""
    run = kernels.run_simplex if backend is None else kernels.get_backend(backend)[0]
    p = problem
    m, n = p.A.shape
    sign = -1.0 if p.maximize else 1.0
    c = sign * p.c

    if np.any(p.lower > p.upper) or np.any(p.lower == np.inf) or np.any(p.upper == -np.inf):
        return _fail(LpStatus.INFEASIBLE, n, m, 0, reason="bounds")

    sense = np.array(p.senses, dtype=object)
    is_le, is_ge = sense == LE, sense == GE
    slo = np.where(is_ge, -np.inf, 0.0)
    shi = np.where(is_le, np.inf, 0.0)
    lo = np.concatenate([p.lower, slo])
    hi = np.concatenate([p.upper, shi])

    # nonbasic structurals start at a finite bound, else free at zero
    lo_fin, hi_fin = np.isfinite(p.lower), np.isfinite(p.upper)
    status = np.empty(n + m, dtype=np.int8)
    status[:n] = np.where(lo_fin, kernels.AT_LOWER,
                          np.where(hi_fin, kernels.AT_UPPER, kernels.FREE_ZERO))
    xval = np.zeros(n + m)
    xval[:n] = np.where(lo_fin, p.lower, np.where(hi_fin, p.upper, 0.0))
    resid = p.b - p.A @ xval[:n]

    # rows whose slack would leave its bounds get an artificial
    below = resid < slo - FEAS_TOL
    above = resid > shi + FEAS_TOL
    need = below | above
    need_art = np.flatnonzero(need)
    na = need_art.size
    N = n + m + na
    bound = np.where(below, slo, shi)[need]
    sigma = np.ones(m)
    sigma[need] = np.where(resid[need] - bound > 0, 1.0, -1.0)
    status[n:] = kernels.BASIC
    status[n + need_art] = np.where(slo[need] == shi[need], kernels.FIXED,
                                    np.where(below[need], kernels.AT_LOWER, kernels.AT_UPPER))
    xval[n + need_art] = bound

    T = np.zeros((m, N))
    T[:, :n] = p.A * sigma[:, None]
    T[np.arange(m), n + np.arange(m)] = sigma
    art_cols = n + m + np.arange(na)
    T[need_art, art_cols] = 1.0
    basis = n + np.arange(m, dtype=np.intp)
    basis[need_art] = art_cols
    beta = resid.copy()
    beta[need_art] = sigma[need_art] * (resid[need_art] - bound)
    lo = np.concatenate([lo, np.zeros(na)])
    hi = np.concatenate([hi, np.full(na, np.inf)])
    status = np.concatenate([status, np.full(na, kernels.BASIC, dtype=np.int8)])
    xval = np.concatenate([xval, np.zeros(na)])
    art_row = dict(zip(art_cols.tolist(), need_art.tolist()))

    max_iter = 50 * (m + N) + 1000
    bland_after = 3 * (m + n)
    iters = 0
    ndegen = 0
    use_bland = False

    if na:
        d = -T[need_art].sum(axis=0)
        d[n + m:] = 0.0
        code, it, nd, use_bland = run(T, beta, d, lo, hi, basis, status, xval,
                                      OPT_TOL, PIVOT_TOL, max_iter, bland_after, use_bland)
        iters += it
        ndegen += nd
        if code == 2:
            raise NumericalBreakdown("phase 1 iteration cap reached")
        infeas = beta[basis >= n + m].sum()
        infeas += xval[n + m:][status[n + m:] != kernels.BASIC].sum()
        if code == 1 or infeas > PHASE1_TOL * max(1.0, np.max(np.abs(p.b), initial=0.0)):
            return _fail(LpStatus.INFEASIBLE, n, m, iters, phase1=float(infeas))
        # drive remaining artificials out of the basis, fix all at zero
        for r in np.flatnonzero(basis >= n + m):
            row = np.abs(T[r, :n + m])
            row[status[:n + m] == kernels.BASIC] = 0.0
            row[status[:n + m] == kernels.FIXED] *= 0.5  # prefer variables that can move
            j = int(np.argmax(row)) if row.size else -1
            if j >= 0 and row[j] > 1e-7:
                art = basis[r]
                _gj_pivot(T, np.zeros(N), r, j)
                basis[r] = j
                beta[r] = xval[j]
                status[j] = kernels.BASIC
                status[art] = kernels.FIXED
                xval[art] = 0.0
        hi[n + m:] = 0.0
        for col in range(n + m, N):
            if status[col] != kernels.BASIC:
                status[col] = kernels.FIXED
                xval[col] = 0.0

    cfull = np.concatenate([c, np.zeros(m + na)])
    d = cfull - cfull[basis] @ T
    d[basis] = 0.0
    code, it, nd, use_bland = run(T, beta, d, lo, hi, basis, status, xval,
                                  OPT_TOL, PIVOT_TOL, max_iter, bland_after, use_bland)
    iters += it
    ndegen += nd
    if code == 2:
        raise NumericalBreakdown("phase 2 iteration cap reached")
    if code == 1:
        return _fail(LpStatus.UNBOUNDED, n, m, iters)

    vals = xval.copy()
    vals[basis] = beta
    x = vals[:n]
    if m and np.max(np.abs(p.A @ x + vals[n:n + m] - p.b)) > FEAS_TOL:
        vals = _polish(p, basis, vals, sigma, art_row)
        x = vals[:n]
    y = -sign * d[n:n + m]
    rc = sign * d[:n]

    nonbasic = (status != kernels.BASIC) & (status != kernels.FIXED)
    nonbasic[n + m:] = False
    dual_deg = bool(np.any(np.abs(d[nonbasic]) <= DEGEN_TOL))
    bvals = vals[basis]
    at_bound = (np.abs(bvals - lo[basis]) <= DEGEN_TOL) | (np.abs(bvals - hi[basis]) <= DEGEN_TOL)
    primal_deg = bool(np.any(at_bound & (basis < n + m)))

    return LpSolution(LpStatus.OPTIMAL, x.copy(), float(p.c @ x), y, rc, iters,
                      primal_deg, dual_deg,
                      info={"degenerate_pivots": ndegen, "bland": bool(use_bland),
                            "slacks": vals[n:n + m].copy()})


def _polish(p, basis, vals, sigma, art_row):
    """Recompute basic values from the original data for the current basis."""
    m, n = p.A.shape
    full = np.hstack([p.A, np.eye(m), np.zeros((m, len(art_row)))])
    for col, i in art_row.items():
        full[i, col] = sigma[i]
    nb = np.ones(full.shape[1], dtype=bool)
    nb[basis] = False
    rhs = p.b - full[:, nb] @ vals[nb]
    try:
        vals = vals.copy()
        vals[basis] = np.linalg.solve(full[:, basis], rhs)
    except np.linalg.LinAlgError:
        pass
    return vals
