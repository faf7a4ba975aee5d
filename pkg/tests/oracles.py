"""Slow, obviously-correct reference computations used to check the solvers."""
import itertools

import numpy as np

from fabadapt.fa_core import as_plf, eval_f


def grid_search_fa(instance, x, delta, step=1e-3):
    """``max f(y)`` over a grid on box-and-ball (n = 2, box feasible set only)."""
    inst = as_plf(instance)
    box = inst.feasible
    w = inst.norm.weights
    x = np.asarray(x, dtype=float)
    axes = [np.arange(box.lower[k], box.upper[k] + step / 2, step) for k in range(2)]
    Y0, Y1 = np.meshgrid(*axes, indexing="ij")
    inside = w[0] * np.abs(Y0 - x[0]) + w[1] * np.abs(Y1 - x[1]) <= delta + 1e-12
    pts = np.column_stack([Y0[inside], Y1[inside]])
    pts = np.vstack([pts, x])
    num = pts @ inst.a.T + inst.g
    den = pts @ inst.c.T + inst.h
    return float(np.max(num / den))


def ball_box_vertices(box, x, delta, weights):
    """Candidate vertices of box-and-ball in 2-D: box corners, ball vertices,
    and the points where ball edges cross box edges (a superset of the true vertices)."""
    x = np.asarray(x, dtype=float)
    pts = [x]
    for s in itertools.product((0, 1), repeat=2):
        pts.append(np.where(np.array(s) == 1, box.upper, box.lower))
    for k in range(2):
        for sg in (1, -1):
            e = np.zeros(2)
            e[k] = sg * delta / weights[k]
            pts.append(x + e)
    # ball edges: w0 |y0 - x0| + w1 |y1 - x1| = delta, intersect lines y_k = bound
    for k in range(2):
        o = 1 - k
        for bnd in (box.lower[k], box.upper[k]):
            rest = delta - weights[k] * abs(bnd - x[k])
            if rest < 0:
                continue
            for sg in (1, -1):
                y = np.empty(2)
                y[k] = bnd
                y[o] = x[o] + sg * rest / weights[o]
                pts.append(y)
    P = np.array(pts)
    keep = [p for p in P if box.contains(p, 1e-12)
            and weights @ np.abs(p - x) <= delta + 1e-12]
    return np.array(keep)


def vertex_enumeration_fa(instance, x, delta):
    """Exact ``max f`` over box-and-ball for n = 2: each linear-fractional
    piece attains its maximum at a vertex of the polygon."""
    inst = as_plf(instance)
    V = ball_box_vertices(inst.feasible, x, delta, inst.norm.weights)
    return float(max(eval_f(inst, v, check=False) for v in V))


def central_difference(fn, x, h=1e-5):
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        g[k] = (fn(x + e) - fn(x - e)) / (2 * h)
    return g


def bisection_ratio_max(num, den, box, lo=-10.0, hi=10.0, tol=1e-10):
    """``max_x (num[0] @ x + num[1]) / (den[0] @ x + den[1])`` over a box by bisection
    on the level ``v``: the level is reachable iff ``max (a - v c) @ x + g - v h >= 0``,
    and over a box that inner maximum is a closed form."""
    a, g = num
    c, h = den
    for _ in range(200):
        v = 0.5 * (lo + hi)
        p = a - v * c
        best = np.sum(np.where(p > 0, p * box.upper, p * box.lower)) + g - v * h
        if best >= 0:
            lo = v
        else:
            hi = v
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def cross_polytope_brute(N, K):
    """Integer points with sum |k_i| = K and k_N >= 0 by scanning the whole cube."""
    out = []
    for k in itertools.product(range(-K, K + 1), repeat=N):
        if sum(abs(v) for v in k) == K and k[-1] >= 0:
            out.append(k)
    return sorted(out)


def lp_brute_force_vertices(c, A, b):
    """``max c @ x`` s.t. ``A x <= b`` in 2-D by intersecting constraint pairs."""
    best = -np.inf
    for i, j in itertools.combinations(range(len(b)), 2):
        M = A[[i, j]]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        x = np.linalg.solve(M, b[[i, j]])
        if np.all(A @ x <= b + 1e-9):
            best = max(best, c @ x)
    return best
