"""Sequential linearization for the FA problem and the exact solver for the original problem."""
import logging
from dataclasses import dataclass, field

import numpy as np

from ..lp import LpFailure, LpProblem, LpStatus, solve_lp
from .counterpart import PieceLp, fa_box_batch
from .instances import Box, SpecialPLFInstance, as_plf, eval_f

log = logging.getLogger(__name__)

STEP_TOLERANCE = "StepTolerance"
MAX_ITER = "MaxIter"
STALLED = "Stalled"

CUT_TOL = 1e-9


@dataclass(frozen=True)
class FaParams:
    delta: float
    eps_tol: float = 1e-6
    max_iter: int = 100
    patience: int = 5

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")
        if self.eps_tol <= 0:
            raise ValueError("eps_tol must be positive")
        if self.max_iter < 1 or self.patience < 1:
            raise ValueError("max_iter and patience must be at least 1")


@dataclass
class FaSolveReport:
    iterates: list = field(default_factory=list)    # (x, f~(x)) including the start point
    x_best: np.ndarray = None
    value_best: float = np.inf
    termination: str = ""
    iterations: int = 0
    master_values: list = field(default_factory=list)

    def record(self, x, value):
        x = np.array(x, dtype=float)
        self.iterates.append((x, float(value)))
        if value < self.value_best:
            self.x_best, self.value_best = x, float(value)
            return True
        return False

    def to_json(self):
        return {"iterates": [{"x": x.tolist(), "value": v} for x, v in self.iterates],
                "x_best": None if self.x_best is None else self.x_best.tolist(),
                "value_best": self.value_best,
                "termination": self.termination,
                "iterations": self.iterations,
                "master_values": list(self.master_values)}

    @classmethod
    def from_json(cls, d):
        r = cls([(np.array(it["x"]), float(it["value"])) for it in d["iterates"]],
                None if d.get("x_best") is None else np.array(d["x_best"]),
                float(d["value_best"]), d["termination"], int(d["iterations"]),
                list(d.get("master_values", [])))
        return r


def linearize(instance, x, delta, method="auto"):
    """Values and gradients of every FA piece at ``x``.

    ``method`` is "lp" (one piece LP each), "box" (vectorized exact solve,
    box feasible sets only) or "auto" (box when possible).
    """
    if method == "box" or (method == "auto" and isinstance(as_plf(instance).feasible, Box)):
        values, grads, _ = fa_box_batch(instance, x, delta)
        return values, grads
    plp = PieceLp(instance, x, delta)
    evs = [plp.evaluate(i) for i in range(plp.instance.m)]
    return np.array([e.value for e in evs]), np.array([e.gradient for e in evs])


def solve_master(values, grads, x_hat, feasible, step_bound=None, initial=16):
    """``min t  s.t.  values[i] + grads[i].(x - x_hat) <= t,  x in S``.

    Cuts are added lazily: start from the ``initial`` largest values and add
    every violated cut after each solve until none remain, which gives the
    optimum of the full LP. ``step_bound`` optionally confines ``x`` to an
    infinity-norm box around ``x_hat``. Returns ``(x, t)``.
    """
    x_hat = np.asarray(x_hat, dtype=float)
    n = x_hat.size
    m = values.size
    rhs_all = grads @ x_hat - values
    if isinstance(feasible, Box):
        lo, hi = feasible.lower.copy(), feasible.upper.copy()
        S_A, S_b = np.zeros((0, n)), np.zeros(0)
    else:
        lo, hi = np.full(n, -np.inf), np.full(n, np.inf)
        S_A, S_b = feasible.as_rows()
    if step_bound is not None:
        lo = np.maximum(lo, x_hat - step_bound)
        hi = np.minimum(hi, x_hat + step_bound)
    active = list(np.argsort(-values, kind="stable")[:initial])
    in_set = np.zeros(m, dtype=bool)
    in_set[active] = True
    obj = np.zeros(n + 1)
    obj[n] = 1.0
    lower = np.concatenate([lo, [-np.inf]])
    upper = np.concatenate([hi, [np.inf]])
    while True:
        idx = np.array(active)
        A = np.vstack([np.column_stack([grads[idx], -np.ones(idx.size)]),
                       np.column_stack([S_A, np.zeros(S_A.shape[0])])])
        b = np.concatenate([rhs_all[idx], S_b])
        sol = solve_lp(LpProblem(obj, A, "<=", b, lower, upper))
        if sol.status is not LpStatus.OPTIMAL:
            raise LpFailure(sol.status, f"master LP is {sol.status.value}")
        x, t = sol.x[:n], sol.x[n]
        viol = values + grads @ (x - x_hat) - t
        viol[in_set] = -np.inf
        new = np.flatnonzero(viol > CUT_TOL)
        if new.size == 0:
            return x, float(t)
        new = new[np.argsort(-viol[new], kind="stable")][:64]
        in_set[new] = True
        active.extend(new.tolist())


def algorithm_fa(instance, x0, params: FaParams, step_bound=None, callback=None) -> FaSolveReport:
    """Minimize the FA counterpart by repeated master LPs over linearized pieces."""
    inst = as_plf(instance)
    S = inst.feasible
    x_hat = np.asarray(x0, dtype=float)
    if not S.contains(x_hat):
        raise ValueError("x0 is not in the feasible set")
    norm = inst.norm
    report = FaSolveReport()
    values, grads = linearize(inst, x_hat, params.delta)
    report.record(x_hat, values.max())
    stall = 0
    for it in range(1, params.max_iter + 1):
        x_new, t = solve_master(values, grads, x_hat, S, step_bound)
        if isinstance(S, Box):
            x_new = S.clip(x_new)
        report.master_values.append(t)
        report.iterations = it
        step = norm(x_new - x_hat)
        log.debug("FA iter %d: master %.6g step %.3g", it, t, step)
        if step <= params.eps_tol:
            report.termination = STEP_TOLERANCE
            break
        x_hat = x_new
        values, grads = linearize(inst, x_hat, params.delta)
        improved = report.record(x_hat, values.max())
        if callback is not None:
            callback(it, x_hat, values.max())
        stall = 0 if improved else stall + 1
        if stall >= params.patience:
            report.termination = STALLED
            break
    else:
        report.termination = MAX_ITER
    log.info("FA finished: %s after %d iterations, best %.8g",
             report.termination, report.iterations, report.value_best)
    return report


def _charnes_cooper_pair(s, i, j, sense):
    """Optimize the single ratio ``(U_i - L_j)/(U_i + L_j)`` over S."""
    n = s.n
    num = np.concatenate([s.a[i] - s.c[j], [s.g[i] - s.h[j]]])
    den = np.concatenate([s.a[i] + s.c[j], [s.g[i] + s.h[j]]])
    S_A, S_b = s.feasible.as_rows()
    # variables (xb, th): den.(xb, th) == 1, A xb - b th <= 0
    A = np.vstack([den, np.column_stack([S_A, -S_b])])
    b = np.concatenate([[1.0], np.zeros(S_A.shape[0])])
    lower = np.concatenate([np.full(n, -np.inf), [0.0]])
    sol = solve_lp(LpProblem(num, A, ["="] + ["<="] * S_A.shape[0], b, lower,
                             maximize=(sense == "max")))
    if sol.status is not LpStatus.OPTIMAL:
        raise LpFailure(sol.status)
    return sol.x[:n] / sol.x[n], sol.objective


def solve_original(instance: SpecialPLFInstance, sense="min"):
    """Global optimizer of ``(max_i U_i - min_j L_j) / (max_i U_i + min_j L_j)`` over S.

    Minimization: the ratio increases in ``U`` and decreases in ``L`` (both
    positive), so replacing ``U`` by an upper epigraph variable and ``L`` by a
    lower one is exact, and the Charnes-Cooper substitution
    ``th = 1/(U + L)``, ``xb = th x``, ``u = th U``, ``l = th L`` gives one LP:

        min u - l  s.t.  u + l = 1,  a_i.xb + g_i th <= u,  l <= c_j.xb + h_j th,
                         A xb <= b th,  l >= 0,  th >= 0.

    Maximization is not an epigraph problem; it is solved exactly as the
    best of the ``|I| * |J|`` single-ratio LPs.
    """
    s = instance
    if sense == "max":
        best, best_x = -np.inf, None
        for i in range(s.n_num):
            for j in range(s.n_den):
                x, v = _charnes_cooper_pair(s, i, j, "max")
                if v > best:
                    best, best_x = v, x
        return _into(s.feasible, best_x)
    if sense != "min":
        raise ValueError("sense must be 'min' or 'max'")
    n, nI, nJ = s.n, s.n_num, s.n_den
    S_A, S_b = s.feasible.as_rows()
    k = S_A.shape[0]
    nv = n + 3  # xb, u, l, th
    U, Lc, TH = n, n + 1, n + 2
    rows, rhs, senses = [], [], []
    r = np.zeros(nv); r[U] = r[Lc] = 1.0
    rows.append(r[None]); rhs.append([1.0]); senses.append("=")
    blk = np.zeros((nI, nv)); blk[:, :n] = s.a; blk[:, TH] = s.g; blk[:, U] = -1.0
    rows.append(blk); rhs.append(np.zeros(nI)); senses += ["<="] * nI
    blk = np.zeros((nJ, nv)); blk[:, :n] = -s.c; blk[:, TH] = -s.h; blk[:, Lc] = 1.0
    rows.append(blk); rhs.append(np.zeros(nJ)); senses += ["<="] * nJ
    blk = np.zeros((k, nv)); blk[:, :n] = S_A; blk[:, TH] = -S_b
    rows.append(blk); rhs.append(np.zeros(k)); senses += ["<="] * k
    obj = np.zeros(nv); obj[U], obj[Lc] = 1.0, -1.0
    lower = np.full(nv, -np.inf); lower[Lc] = lower[TH] = 0.0
    sol = solve_lp(LpProblem(obj, np.vstack(rows), senses, np.concatenate(rhs), lower))
    if sol.status is not LpStatus.OPTIMAL:
        raise LpFailure(sol.status, f"original problem LP is {sol.status.value}")
    th = sol.x[TH]
    if th <= 1e-12:
        raise LpFailure(sol.status, "Charnes-Cooper scale collapsed to zero")
    x = _into(s.feasible, sol.x[:n] / th)
    # cross-check against the expanded piecewise form
    f_exp = eval_f(as_plf(s), x, check=False)
    if abs(f_exp - sol.objective) > 1e-7 * max(1.0, abs(f_exp)):
        log.warning("original LP value %.12g differs from expanded evaluation %.12g",
                    sol.objective, f_exp)
    return x


def _into(S, x):
    return S.clip(x) if isinstance(S, Box) else x
