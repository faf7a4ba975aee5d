"""Bandgap optimization by linear fractional programs (plain and fabrication-adaptive)."""
import csv
import json
import logging
from dataclasses import dataclass, field

import numpy as np

from ..fa_core.algorithm import linearize, solve_master
from ..fa_core.counterpart import fa_box_batch
from ..fa_core.instances import Box, PLFInstance, WeightedL1Norm
from ..linalg import gen_eigen
from ..lp import LpFailure, LpProblem, LpStatus, solve_lp
from .family import gap_midgap
from .reduction import BandWindow, reduce_operators
from .relaxation import build_linear_inequalities, check_sdp_inclusions, cross_polytope_vectors

log = logging.getLogger(__name__)


class GapClosed(ArithmeticError):
    pass


@dataclass(frozen=True)
class LfpResult:
    x: np.ndarray
    lam_l: float
    lam_u: float
    objective: float


def lfp_solve(data, box, require_open=True, lower=None, upper=None) -> LfpResult:
    """Maximize ``2 (lam_u - lam_l) / (lam_u + lam_l)`` s.t. ``B x + g <= lam_l``,
    ``C x + h >= lam_u``, ``x`` in the box (optionally narrowed to ``[lower, upper]``).

    Charnes-Cooper with ``th = 1 / (lam_u + lam_l)``: variables ``(xb, l, u, th) >= 0``,

        max 2 (u - l)  s.t.  u + l = 1,  B xb + g th <= l,  C xb + h th >= u,
                             th lo <= xb <= th hi.
    """
    lo = box.lower if lower is None else np.maximum(box.lower, lower)
    hi = box.upper if upper is None else np.minimum(box.upper, upper)
    n = lo.size
    nb, nc = data.n_b, data.n_c
    nv = n + 3
    L, U, TH = n, n + 1, n + 2
    A = np.zeros((1 + nb + nc + 2 * n, nv))
    A[0, L] = A[0, U] = 1.0
    A[1:1 + nb, :n] = data.B
    A[1:1 + nb, TH] = data.g
    A[1:1 + nb, L] = -1.0
    A[1 + nb:1 + nb + nc, :n] = -data.C
    A[1 + nb:1 + nb + nc, TH] = -data.h
    A[1 + nb:1 + nb + nc, U] = 1.0
    r0 = 1 + nb + nc
    A[r0:r0 + n, :n] = np.eye(n)
    A[r0:r0 + n, TH] = -hi
    A[r0 + n:, :n] = -np.eye(n)
    A[r0 + n:, TH] = lo
    b = np.zeros(A.shape[0])
    b[0] = 1.0
    obj = np.zeros(nv)
    obj[U], obj[L] = 2.0, -2.0
    sol = solve_lp(LpProblem(obj, A, ["="] + ["<="] * (A.shape[0] - 1), b, maximize=True))
    if sol.status is not LpStatus.OPTIMAL:
        raise LpFailure(sol.status, f"LFP is {sol.status.value}")
    th = sol.x[TH]
    if th <= 1e-12:
        raise LpFailure(sol.status, "Charnes-Cooper scale collapsed to zero")
    x = np.clip(sol.x[:n] / th, lo, hi)
    res = LfpResult(x, sol.x[L] / th, sol.x[U] / th, sol.objective)
    if require_open and res.objective <= 0:
        raise GapClosed(f"LFP optimum {res.objective:.4g} does not open a gap")
    return res


@dataclass(frozen=True)
class BandgapParams:
    eps_tol: float = 1e-6
    max_iter: int = 20
    step_bound: float = 0.1      # infinity-norm trust region per outer iteration; None disables
    dcg_rounds: int = 10
    dcg_tol: float = 1e-7
    dcg_max_cuts: int = 20


@dataclass
class BandgapTrace:
    iterates: list = field(default_factory=list)
    gaps: list = field(default_factory=list)
    fa_values: list = field(default_factory=list)
    lfp_objectives: list = field(default_factory=list)
    violations: list = field(default_factory=list)
    raw_violations: list = field(default_factory=list)
    dcg_rounds: list = field(default_factory=list)
    cuts: list = field(default_factory=list)
    repaired: list = field(default_factory=list)
    termination: str = ""

    def record(self, x, gap, fa_value=None):
        self.iterates.append(np.array(x, dtype=float))
        self.gaps.append(float(gap))
        self.fa_values.append(None if fa_value is None else float(fa_value))

    @property
    def x_final(self):
        return self.iterates[-1]

    @property
    def gap_final(self):
        return self.gaps[-1]

    @property
    def max_violation(self):
        return max(self.violations, default=0.0)

    def to_json(self):
        return {"iterates": [x.tolist() for x in self.iterates], "gaps": self.gaps,
                "fa_values": self.fa_values, "lfp_objectives": self.lfp_objectives,
                "violations": self.violations,
                "raw_violations": self.raw_violations, "dcg_rounds": self.dcg_rounds,
                "cuts": self.cuts, "repaired": self.repaired, "termination": self.termination}

    @classmethod
    def from_json(cls, d):
        tr = cls()
        for k, v in d.items():
            setattr(tr, k, v)
        tr.iterates = [np.array(x, dtype=float) for x in d["iterates"]]
        return tr

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)
            fh.write("\n")

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iter", "gap_midgap", "fa_value"])
            for k, (g, f) in enumerate(zip(self.gaps, self.fa_values)):
                w.writerow([k, repr(g), "" if f is None else repr(f)])


def _vectors(window, K):
    vl = cross_polytope_vectors(window.below, K)
    vu = vl if window.above == window.below else cross_polytope_vectors(window.above, K)
    return vl, vu


def _trust(x_hat, step_bound):
    if step_bound is None:
        return None, None
    return x_hat - step_bound, x_hat + step_bound


def _exact_bounds(reduced, x):
    """Smallest lam_l and largest lam_u satisfying the reduced inclusions at ``x``."""
    lam_l = max(gen_eigen(reduced.lower(t, x), reduced.Ml[t]).eigenvalues[-1]
                for t in range(reduced.n_k))
    lam_u = min(gen_eigen(reduced.upper(t, x), reduced.Mu[t]).eigenvalues[0]
                for t in range(reduced.n_k))
    return lam_l, lam_u


@dataclass(frozen=True)
class DcgOutcome:
    result: LfpResult
    violation: float       # largest eigen-violation of the returned point
    raw_violation: float   # same, before any repair
    rounds: int
    cuts: int
    repaired: bool


def _worst(reduced, res):
    found = check_sdp_inclusions(reduced, res.x, res.lam_l, res.lam_u, 0.0)
    return found[0].amount if found else 0.0


def solve_with_dcg(reduced, data, box, params, lower=None, upper=None) -> DcgOutcome:
    """LFP solve plus delayed constraint generation.

    Each round adds up to ``dcg_max_cuts`` eigenvector cuts violated by more than
    ``dcg_tol`` and re-solves. If violations remain after ``dcg_rounds`` rounds,
    ``lam_l``/``lam_u`` are recomputed exactly at the final ``x``, which satisfies
    the inclusions; ``repaired`` reports that this happened.
    """
    res = lfp_solve(data, box, False, lower, upper)
    rounds = cuts = 0
    while rounds < params.dcg_rounds:
        found = check_sdp_inclusions(reduced, res.x, res.lam_l, res.lam_u, params.dcg_tol)
        if not found:
            break
        for v in found[:params.dcg_max_cuts]:
            if v.side == "lower":
                data.add_lower_cut(reduced, v.t, v.vector)
            else:
                data.add_upper_cut(reduced, v.t, v.vector)
            cuts += 1
        res = lfp_solve(data, box, False, lower, upper)
        rounds += 1
    raw = viol = _worst(reduced, res)
    repaired = viol > params.dcg_tol
    if repaired:
        lam_l, lam_u = _exact_bounds(reduced, res.x)
        res = LfpResult(res.x, lam_l, lam_u, 2.0 * (lam_u - lam_l) / (lam_u + lam_l))
        viol = _worst(reduced, res)
        log.info("DCG left violation %.2e after %d rounds; bounds recomputed at x", raw, rounds)
    return DcgOutcome(res, viol, raw, rounds, cuts, repaired)


def bandgap_optimize(family, x0, window=None, K=3, dcg=True,
                     params=BandgapParams()) -> BandgapTrace:
    """Successive LFP relaxations around the current design, stepping within the trust box."""
    window = window or BandWindow.default(family)
    box = family.box
    norm = WeightedL1Norm.unit(family.n_x)
    vl, vu = _vectors(window, K)
    x_hat = np.asarray(x0, dtype=float)
    tr = BandgapTrace()
    tr.record(x_hat, gap_midgap(family, x_hat, window.m))
    for it in range(1, params.max_iter + 1):
        red = reduce_operators(family, x_hat, window)
        data = build_linear_inequalities(red, vl, vu)
        lo, hi = _trust(x_hat, params.step_bound)
        if dcg:
            out = solve_with_dcg(red, data, box, params, lo, hi)
        else:
            res = lfp_solve(data, box, False, lo, hi)
            v = _worst(red, res)
            out = DcgOutcome(res, v, v, 0, 0, False)
        res = out.result
        tr.lfp_objectives.append(float(res.objective))
        tr.violations.append(float(out.violation))
        tr.raw_violations.append(float(out.raw_violation))
        tr.dcg_rounds.append(out.rounds)
        tr.cuts.append(out.cuts)
        tr.repaired.append(out.repaired)
        step = norm(res.x - x_hat)
        log.debug("bandgap iter %d: lfp %.5f step %.3g viol %.2e", it, res.objective, step,
                  out.violation)
        if step <= params.eps_tol:
            tr.termination = "StepTolerance"
            break
        x_hat = res.x
        tr.record(x_hat, gap_midgap(family, x_hat, window.m))
    else:
        tr.termination = "MaxIter"
    return tr


def surrogate_instance(family, x_hat, window, K):
    """PLF instance whose pieces are minus the gap ratios of the linear relaxation at ``x_hat``.

    Piece ``(i, j)`` (row-major, ``i`` over upper rows ``C``, ``j`` over lower
    rows ``B``) is ``-2 ((C_i - B_j) x + h_i - g_j) / ((C_i + B_j) x + h_i + g_j)``,
    so the instance value is minus the relaxed gap-midgap ratio and its FA
    counterpart is minus the worst relaxed gap over the ball.
    """
    vl, vu = _vectors(window, K)
    red = reduce_operators(family, x_hat, window)
    data = build_linear_inequalities(red, vl, vu)
    B, g, C, h = data.B, data.g, data.C, data.h
    a = 2.0 * (B[None, :, :] - C[:, None, :]).reshape(-1, family.n_x)
    num0 = 2.0 * (g[None, :] - h[:, None]).ravel()
    c = (C[:, None, :] + B[None, :, :]).reshape(-1, family.n_x)
    den0 = (h[:, None] + g[None, :]).ravel()
    return PLFInstance(a, num0, c, den0, family.box, WeightedL1Norm.unit(family.n_x))


def fa_bandgap_optimize(family, x0, window=None, K=3, delta=0.0,
                        params=BandgapParams()) -> BandgapTrace:
    """Fabrication-adaptive bandgap optimization: one FA master step per relinearization."""
    window = window or BandWindow.default(family)
    box = family.box
    norm = WeightedL1Norm.unit(family.n_x)
    x_hat = np.asarray(x0, dtype=float)
    tr = BandgapTrace()
    for it in range(1, params.max_iter + 1):
        plf = surrogate_instance(family, x_hat, window, K)
        values, grads = linearize(plf, x_hat, delta)
        tr.record(x_hat, gap_midgap(family, x_hat, window.m), -values.max())
        x_new, t = solve_master(values, grads, x_hat, box, params.step_bound)
        x_new = box.clip(x_new)
        tr.lfp_objectives.append(-t)
        step = norm(x_new - x_hat)
        log.debug("FA-B iter %d: fa gap %.5f step %.3g", it, -values.max(), step)
        if step <= params.eps_tol:
            tr.termination = "StepTolerance"
            return tr
        x_hat = x_new
    tr.termination = "MaxIter"
    plf = surrogate_instance(family, x_hat, window, K)
    values, _ = linearize(plf, x_hat, delta)
    tr.record(x_hat, gap_midgap(family, x_hat, window.m), -values.max())
    return tr


def bandgap_zad(family, x_hat, sigma, window=None, K=3):
    """Smallest true gap found within L1 distance ``sigma`` of ``x_hat`` in the box.

    Candidates: ``x_hat``, the clipped axis moves ``x_hat +- r e_j`` for
    ``r`` in {sigma/4, sigma/2, 3 sigma/4, sigma}, and the worst point of the
    linearized surrogate. All candidates lie in the ball, so the result is
    an upper bound on the exact worst gap.
    """
    window = window or BandWindow.default(family)
    box = family.box
    x_hat = np.asarray(x_hat, dtype=float)
    m = window.m
    best = gap_midgap(family, x_hat, m)
    if sigma <= 0:
        return best
    for r in (0.25 * sigma, 0.5 * sigma, 0.75 * sigma, sigma):
        for j in range(family.n_x):
            for s in (1.0, -1.0):
                z = x_hat.copy()
                z[j] += s * r
                z = box.clip(z)
                best = min(best, gap_midgap(family, z, m))
    values, _, Y = fa_box_batch(surrogate_instance(family, x_hat, window, K), x_hat, sigma)
    y = box.clip(Y[int(np.argmax(values))])
    return min(best, gap_midgap(family, y, m))


def bandgap_zad_sweep(family, x_hat, sigmas, window=None, K=3):
    vals = [bandgap_zad(family, x_hat, s, window, K) for s in sigmas]
    return np.minimum.accumulate(np.array(vals))
