"""FA counterpart ``f~(x) = max { f(y) : y in S, ||y - x|| <= delta }`` and its gradients.

Each fractional piece is evaluated by one Charnes-Cooper homogenized LP

    max  a.yb + g*th
    s.t. yb - th*x <= q          (pi1)
         -yb + th*x <= q         (pi2)
         w.q <= th*delta         (gamma)
         c.yb + h*th == 1        (tau)
         th*b - A yb >= 0        (lam)      S = {A x <= b}
         th >= 0

whose optimum gives the piece value, the worst point ``y = yb / th`` and the
gradient ``th * (pi1 - pi2)``. Internally the LP is posed in the shifted
variable ``d = yb - th*x``; that leaves every constraint row unchanged, so the
row duals are those of the LP above.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..linalg import lambda_max
from ..lp import LpFailure, LpProblem, LpStatus, NumericalBreakdown, solve_lp
from .instances import Box, as_plf

THETA_TOL = 1e-10
TIE_TOL = 1e-12


class ThetaZero(ArithmeticError):
    pass


@dataclass(frozen=True)
class PieceEvaluation:
    value: float
    theta: float
    ybar: np.ndarray
    gradient: np.ndarray
    piece: int = 0
    degenerate: bool = False

    @property
    def y(self):
        """The maximizing point of the piece over the ball intersected with S."""
        return self.ybar / self.theta


class FaValue(NamedTuple):
    value: float
    piece: int


def _rows(feasible):
    return feasible.as_rows()


class PieceLp:
    """Reusable constraint skeleton of the piece LP for one instance and point."""

    def __init__(self, instance, x, delta):
        inst = as_plf(instance)
        self.instance = inst
        self.x = np.asarray(x, dtype=float)
        self.delta = float(delta)
        n = inst.n
        AS, bS = _rows(inst.feasible)
        k = AS.shape[0]
        self.n, self.k = n, k
        w = inst.norm.weights
        # columns: d (n, free), q (n, free), th (1, >= 0)
        nrow = 2 * n + 2 + k
        A = np.zeros((nrow, 2 * n + 1))
        I = np.eye(n)
        A[:n, :n] = I
        A[:n, n:2 * n] = -I
        A[n:2 * n, :n] = -I
        A[n:2 * n, n:2 * n] = -I
        A[2 * n, n:2 * n] = w
        A[2 * n, 2 * n] = -self.delta
        # row 2n+1 (tau) depends on the piece
        A[2 * n + 2:, :n] = -AS
        A[2 * n + 2:, 2 * n] = bS - AS @ self.x
        self.A = A
        self.b = np.zeros(nrow)
        self.b[2 * n + 1] = 1.0
        self.senses = ["<="] * (2 * n + 1) + ["="] + [">="] * k
        self.lower = np.concatenate([np.full(2 * n, -np.inf), [0.0]])
        self.upper = np.full(2 * n + 1, np.inf)

    def problem(self, i):
        a, g, c, h = self.instance.piece(i)
        n, x = self.n, self.x
        A = self.A.copy()
        A[2 * n + 1, :n] = c
        A[2 * n + 1, n:2 * n] = 0.0
        A[2 * n + 1, 2 * n] = c @ x + h
        obj = np.concatenate([a, np.zeros(n), [a @ x + g]])
        return LpProblem(obj, A, self.senses, self.b, self.lower, self.upper, maximize=True)

    def evaluate(self, i):
        sol = solve_lp(self.problem(i))
        if sol.status is not LpStatus.OPTIMAL:
            raise LpFailure(sol.status, f"piece {i} LP is {sol.status.value}")
        n = self.n
        th = float(sol.x[2 * n])
        if th <= THETA_TOL:
            raise ThetaZero(f"piece {i}: theta = {th:.3e}")
        ybar = th * self.x + sol.x[:n]
        grad = th * (sol.duals[:n] - sol.duals[n:2 * n])
        return PieceEvaluation(sol.objective, th, ybar, grad, i, sol.dual_degenerate)


def fa_piece_eval(instance, i, x, delta) -> PieceEvaluation:
    """FA value, worst point and gradient of piece ``i`` at ``x``."""
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    return PieceLp(instance, x, delta).evaluate(i)


def piece_dual_value(instance, i, x, delta):
    """Optimal value of the dual of the piece LP, solved as its own LP.

    Used only to cross-check strong duality; variables are
    ``(pi1, pi2, gamma, lam, tau)``.
    """
    inst = as_plf(instance)
    a, g, c, h = inst.piece(i)
    x = np.asarray(x, dtype=float)
    AS, bS = _rows(inst.feasible)
    n, k = inst.n, AS.shape[0]
    w = inst.norm.weights
    I = np.eye(n)
    nv = 2 * n + 1 + k + 1
    rows, rhs, senses = [], [], []
    # yb columns: pi1 - pi2 + A^T lam + c tau == a
    blk = np.zeros((n, nv))
    blk[:, :n], blk[:, n:2 * n] = I, -I
    blk[:, 2 * n + 1:2 * n + 1 + k] = AS.T
    blk[:, -1] = c
    rows.append(blk); rhs.append(a); senses += ["="] * n
    # q columns (free): -pi1 - pi2 + w gamma == 0
    blk = np.zeros((n, nv))
    blk[:, :n], blk[:, n:2 * n] = -I, -I
    blk[:, 2 * n] = w
    rows.append(blk); rhs.append(np.zeros(n)); senses += ["="] * n
    # th column (th >= 0): -x.pi1 + x.pi2 - delta gamma - b.lam + h tau >= g
    r = np.zeros((1, nv))
    r[0, :n], r[0, n:2 * n] = -x, x
    r[0, 2 * n] = -delta
    r[0, 2 * n + 1:2 * n + 1 + k] = -bS
    r[0, -1] = h
    rows.append(r); rhs.append([g]); senses += [">="]
    lower = np.concatenate([np.zeros(nv - 1), [-np.inf]])
    obj = np.zeros(nv)
    obj[-1] = 1.0
    sol = solve_lp(LpProblem(obj, np.vstack(rows), senses, np.concatenate(rhs), lower))
    if sol.status is not LpStatus.OPTIMAL:
        raise LpFailure(sol.status)
    return sol.objective


def box_knapsack(P, x, box, weights, delta):
    """Maximize ``P[r] @ y`` over the box intersected with ``{y : ||y - x||_w <= delta}``, per row.

    This is a fractional knapsack: spend the budget on coordinates in order of
    |coefficient| / weight, each up to its distance to the favourable bound.
    Returns the maximizers ``Y`` and the marginal rates ``mu`` (zero when the
    budget is not exhausted), which are the multipliers of the ball constraint.
    """
    P = np.atleast_2d(P)
    w = weights
    room = np.where(P >= 0, box.upper - x, x - box.lower)
    room = np.where(P == 0, 0.0, np.maximum(room, 0.0))
    rate = np.abs(P) / w
    order = np.argsort(-rate, axis=1, kind="stable")
    cost = np.take_along_axis(room * w, order, axis=1)
    before = np.cumsum(cost, axis=1) - cost
    w_sorted = w[order]
    step_sorted = np.clip((delta - before) / w_sorted, 0.0, np.take_along_axis(room, order, axis=1))
    step = np.empty_like(step_sorted)
    np.put_along_axis(step, order, step_sorted, axis=1)
    Y = x + np.sign(P) * step
    # the first coordinate (in rate order) that the budget cannot fully pay for
    short = (before + cost > delta) & (np.take_along_axis(rate, order, axis=1) > 0)
    has = short.any(axis=1)
    first = np.argmax(short, axis=1)
    mu = np.where(has, np.take_along_axis(rate, order, axis=1)[np.arange(P.shape[0]), first], 0.0)
    return Y, mu


def _box_bounds(inst, box, x, delta):
    """Exact extremes of every numerator and denominator over box-and-ball, combined
    into an upper bound on each FA piece."""
    w = inst.norm.weights
    Y, _ = box_knapsack(inst.a, x, box, w, delta)
    nmax = np.einsum("ij,ij->i", inst.a, Y) + inst.g
    Y, _ = box_knapsack(-inst.c, x, box, w, delta)
    dmin = np.einsum("ij,ij->i", inst.c, Y) + inst.h
    Y, _ = box_knapsack(inst.c, x, box, w, delta)
    dmax = np.einsum("ij,ij->i", inst.c, Y) + inst.h
    return np.where(nmax >= 0, nmax / dmin, nmax / dmax)


DINKELBACH_MAX = 200


def fa_box_batch(instance, x, delta):
    """Values, gradients and maximizers of every FA piece when S is a box.

    Dinkelbach iteration on all pieces at once: with the current ratio ``v``,
    maximize ``(a - v c) @ y`` over box-and-ball by :func:`box_knapsack`, then
    update ``v`` to the ratio at the maximizer; this stops at the exact optimum
    after finitely many vertices. At the optimum the gradient in ``x`` is
    ``sign(p) * min(|p|, mu w) / (c @ y + h)`` with ``p = a - v c``, the same
    multipliers the piece LP returns when it is nondegenerate.
    """
    inst = as_plf(instance)
    box = inst.feasible
    if not isinstance(box, Box):
        raise TypeError("fa_box_batch needs a box feasible set")
    x = np.asarray(x, dtype=float)
    w = inst.norm.weights
    a, g, c, h = inst.a, inst.g, inst.c, inst.h
    v = (a @ x + g) / (c @ x + h)
    for _ in range(DINKELBACH_MAX):
        P = a - v[:, None] * c
        Y, mu = box_knapsack(P, x, box, w, delta)
        v_new = (np.einsum("ij,ij->i", a, Y) + g) / (np.einsum("ij,ij->i", c, Y) + h)
        if np.all(v_new <= v + 1e-15 * np.maximum(1.0, np.abs(v))):
            break
        v = np.maximum(v, v_new)
    else:
        raise NumericalBreakdown("Dinkelbach iteration did not settle")
    P = a - v[:, None] * c
    Y, mu = box_knapsack(P, x, box, w, delta)
    den = np.einsum("ij,ij->i", c, Y) + h
    grads = np.sign(P) * np.minimum(np.abs(P), mu[:, None] * w) / den[:, None]
    return v, grads, Y


def fa_eval_pieces(instance, x, delta, pieces=None):
    """Evaluate the listed pieces (all by default); returns a list of PieceEvaluation."""
    plp = PieceLp(instance, x, delta)
    idx = range(plp.instance.m) if pieces is None else pieces
    return [plp.evaluate(i) for i in idx]


def fa_eval(instance, x, delta, prune=True) -> FaValue:
    """``f~(x)`` and the lowest-index piece attaining it.

    On a box, pieces whose exact numerator/denominator bound cannot reach the
    running best are skipped; this never changes the result.
    """
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    plp = PieceLp(instance, x, delta)
    inst = plp.instance
    if prune and isinstance(inst.feasible, Box) and inst.m > 1:
        ub = _box_bounds(inst, inst.feasible, plp.x, float(delta))
        order = np.argsort(-ub, kind="stable")
    else:
        ub = np.full(inst.m, np.inf)
        order = np.arange(inst.m)
    best, best_i = -np.inf, -1
    for i in order:
        if ub[i] < best - TIE_TOL:
            break
        v = plp.evaluate(int(i)).value
        if v > best + TIE_TOL or (abs(v - best) <= TIE_TOL and i < best_i):
            best, best_i = v, int(i)
    return FaValue(float(best), best_i)


def fa_counterpart_closed_form(A, b, norm, x, delta):
    """Unconstrained FA counterpart of ``max_i a_i.x + b_i``: ``max_i a_i.x + b_i + delta ||a_i||_*``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    dual = np.max(np.abs(A) / norm.weights, axis=1)
    return float(np.max(A @ np.asarray(x, dtype=float) + b + delta * dual))


def fa_eigen_l1(A0, As, x, delta):
    """Unconstrained FA counterpart of ``lambda_max(A0 + sum_i x_i As[i])`` under the unit L1 norm.

    The L1 ball is the convex hull of ``x +- delta e_j`` and ``lambda_max`` is
    convex, so the maximum sits at one of these 2n points.
    """
    A0 = np.asarray(A0, dtype=float)
    As = np.asarray(As, dtype=float)
    x = np.asarray(x, dtype=float)

    def lam(z):
        return lambda_max(A0 + np.tensordot(z, As, axes=1))

    if delta == 0:
        return lam(x)
    best = -np.inf
    for j in range(x.size):
        for s in (1.0, -1.0):
            z = x.copy()
            z[j] += s * delta
            best = max(best, lam(z))
    return float(best)
