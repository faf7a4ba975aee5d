"""Feasible sets, norms and piecewise linear fractional (PLF) objectives.

A PLF objective is ``f(x) = max_i (a_i.x + g_i) / (c_i.x + h_i)``. The
special form ``(max_i U_i - min_j L_j) / (max_i U_i + min_j L_j)`` with affine
``U_i`` and ``L_j`` expands to ``|I| * |J|`` ordinary pieces.
"""
import json
from dataclasses import dataclass

import numpy as np

from ..lp import LpProblem, LpStatus, solve_lp
from ..rng import INSTANCE, Stream

DENOM_TOL = 1e-12
MEMBER_TOL = 1e-9


class InstanceError(ValueError):
    pass


class DenominatorNonPositive(InstanceError):
    pass


class OutsideFeasibleSet(InstanceError):
    pass


def _vec(v, n=None, name="vector"):
    v = np.array(v, dtype=float).ravel()
    if n is not None and v.size != n:
        raise InstanceError(f"{name} has length {v.size}, expected {n}")
    if not np.all(np.isfinite(v)):
        raise InstanceError(f"{name} has non-finite entries")
    return v


class Box:
    """``{x : lower <= x <= upper}``."""

    def __init__(self, lower, upper, n=None):
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        if n is not None:
            lower = np.broadcast_to(lower, (n,))
            upper = np.broadcast_to(upper, (n,))
        self.lower = _vec(lower, name="lower")
        self.upper = _vec(upper, self.lower.size, "upper")
        if np.any(self.lower > self.upper):
            raise InstanceError("box has lower > upper")
        self.lower.flags.writeable = False
        self.upper.flags.writeable = False

    @property
    def n(self):
        return self.lower.size

    def contains(self, x, tol=MEMBER_TOL):
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def clip(self, x):
        return np.clip(x, self.lower, self.upper)

    def center(self):
        return 0.5 * (self.lower + self.upper)

    def as_rows(self):
        """The box as ``A x <= b``."""
        I = np.eye(self.n)
        return np.vstack([I, -I]), np.concatenate([self.upper, -self.lower])

    def minimize_linear(self, c, const=0.0):
        c = np.asarray(c, dtype=float)
        return float(const + np.sum(np.where(c >= 0, c * self.lower, c * self.upper)))

    def sample(self, stream, count):
        u = stream.uniform((count, self.n))
        return self.lower + u * (self.upper - self.lower)

    def to_json(self):
        return {"lower": self.lower.tolist(), "upper": self.upper.tolist()}

    def __repr__(self):
        return f"Box(n={self.n})"


class Polyhedron:
    """``{x : A x <= b}``; optionally checked nonempty and bounded with 2n LPs."""

    def __init__(self, A, b, check=False):
        self.A = np.array(A, dtype=float)
        if self.A.ndim != 2:
            raise InstanceError("A must be a matrix")
        self.b = _vec(b, self.A.shape[0], "b")
        self.A.flags.writeable = False
        self.b.flags.writeable = False
        if check:
            self.bounding_box()

    @property
    def n(self):
        return self.A.shape[1]

    def contains(self, x, tol=MEMBER_TOL):
        return bool(np.all(self.A @ np.asarray(x, dtype=float) <= self.b + tol))

    def as_rows(self):
        return self.A, self.b

    def _extreme(self, c, maximize=False):
        n = self.n
        sol = solve_lp(LpProblem(c, self.A, "<=", self.b, np.full(n, -np.inf),
                                 np.full(n, np.inf), maximize=maximize))
        if sol.status is LpStatus.INFEASIBLE:
            raise InstanceError("polyhedron is empty")
        if sol.status is LpStatus.UNBOUNDED:
            raise InstanceError("polyhedron is unbounded")
        return sol

    def bounding_box(self):
        lo, hi = np.empty(self.n), np.empty(self.n)
        for j in range(self.n):
            e = np.zeros(self.n)
            e[j] = 1.0
            lo[j] = self._extreme(e).objective
            hi[j] = self._extreme(e, maximize=True).objective
        return Box(lo, hi)

    def minimize_linear(self, c, const=0.0):
        return float(const + self._extreme(np.asarray(c, dtype=float)).objective)

    def center(self):
        """Average of the 2n coordinate-extreme points (a point of S)."""
        pts = []
        for j in range(self.n):
            e = np.zeros(self.n)
            e[j] = 1.0
            pts.append(self._extreme(e).x)
            pts.append(self._extreme(e, maximize=True).x)
        return np.mean(pts, axis=0)

    def to_json(self):
        return {"A": self.A.tolist(), "b": self.b.tolist()}


class WeightedL1Norm:
    """``||v|| = sum_i w_i |v_i|`` with dual norm ``max_i |a_i| / w_i``."""

    def __init__(self, weights):
        self.weights = _vec(weights, name="weights")
        if np.any(self.weights <= 0):
            raise InstanceError("norm weights must be positive")
        self.weights.flags.writeable = False

    @classmethod
    def unit(cls, n):
        return cls(np.ones(n))

    def __call__(self, v):
        return float(np.sum(self.weights * np.abs(v)))

    def dual(self, a):
        return float(np.max(np.abs(a) / self.weights))

    def diameter(self, box):
        return self(box.upper - box.lower)


def _feasible_from_json(d, n):
    if "box" in d:
        return Box(d["box"]["lower"], d["box"]["upper"], n)
    if "polyhedron" in d:
        return Polyhedron(d["polyhedron"]["A"], d["polyhedron"]["b"])
    raise InstanceError("instance has neither 'box' nor 'polyhedron'")


def _feasible_to_json(S):
    return {"box": S.to_json()} if isinstance(S, Box) else {"polyhedron": S.to_json()}


@dataclass(frozen=True, eq=False)
class PLFInstance:
    """``max_i (a[i] @ x + g[i]) / (c[i] @ x + h[i])`` over ``feasible``.

    Construction checks that every denominator is positive on S.
    """

    a: np.ndarray
    g: np.ndarray
    c: np.ndarray
    h: np.ndarray
    feasible: object
    norm: WeightedL1Norm = None
    validate: bool = True

    def __post_init__(self):
        a = np.atleast_2d(np.array(self.a, dtype=float))
        m, n = a.shape
        c = np.atleast_2d(np.array(self.c, dtype=float)).reshape(m, n)
        g, h = _vec(self.g, m, "g"), _vec(self.h, m, "h")
        if self.feasible.n != n:
            raise InstanceError("feasible set dimension does not match pieces")
        norm = self.norm if self.norm is not None else WeightedL1Norm.unit(n)
        if norm.weights.size != n:
            raise InstanceError("norm dimension does not match pieces")
        for arr in (a, c, g, h):
            if not np.all(np.isfinite(arr)):
                raise InstanceError("piece data must be finite")
            arr.flags.writeable = False
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "norm", norm)
        if self.validate:
            self.check_denominators()

    @property
    def n(self):
        return self.a.shape[1]

    @property
    def m(self):
        return self.a.shape[0]

    def piece(self, i):
        return self.a[i], self.g[i], self.c[i], self.h[i]

    def min_denominators(self):
        S = self.feasible
        if isinstance(S, Box):
            return np.array([S.minimize_linear(self.c[i], self.h[i]) for i in range(self.m)])
        # identical denominators share one LP
        out = np.empty(self.m)
        cache = {}
        for i in range(self.m):
            key = (self.c[i].tobytes(), self.h[i])
            if key not in cache:
                cache[key] = S.minimize_linear(self.c[i], self.h[i])
            out[i] = cache[key]
        return out

    def check_denominators(self):
        dmin = self.min_denominators()
        bad = np.flatnonzero(dmin <= DENOM_TOL)
        if bad.size:
            raise DenominatorNonPositive(
                f"piece {bad[0]} has denominator {dmin[bad[0]]:.3e} on the feasible set")

    def to_json(self):
        d = {"n": self.n,
             "pieces": [{"num": [*self.a[i], self.g[i]], "den": [*self.c[i], self.h[i]]}
                        for i in range(self.m)],
             "weights": self.norm.weights.tolist()}
        d.update(_feasible_to_json(self.feasible))
        return d

    @classmethod
    def from_json(cls, d):
        n = int(d["n"])
        num = np.array([p["num"] for p in d["pieces"]], dtype=float).reshape(-1, n + 1)
        den = np.array([p["den"] for p in d["pieces"]], dtype=float).reshape(-1, n + 1)
        return cls(num[:, :n], num[:, n], den[:, :n], den[:, n], _feasible_from_json(d, n),
                   WeightedL1Norm(d.get("weights", np.ones(n))))


@dataclass(frozen=True, eq=False)
class SpecialPLFInstance:
    """``(max_i U_i - min_j L_j) / (max_i U_i + min_j L_j)`` with ``U_i = a[i] @ x + g[i]``
    and ``L_j = c[j] @ x + h[j]``, all positive on S."""

    a: np.ndarray
    g: np.ndarray
    c: np.ndarray
    h: np.ndarray
    feasible: object
    norm: WeightedL1Norm = None
    validate: bool = True

    def __post_init__(self):
        a = np.atleast_2d(np.array(self.a, dtype=float))
        n = a.shape[1]
        c = np.atleast_2d(np.array(self.c, dtype=float)).reshape(-1, n)
        g, h = _vec(self.g, a.shape[0], "g"), _vec(self.h, c.shape[0], "h")
        if self.feasible.n != n:
            raise InstanceError("feasible set dimension does not match pieces")
        norm = self.norm if self.norm is not None else WeightedL1Norm.unit(n)
        for arr in (a, c, g, h):
            if not np.all(np.isfinite(arr)):
                raise InstanceError("piece data must be finite")
            arr.flags.writeable = False
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "norm", norm)
        if self.validate:
            S = self.feasible
            for name, M, k in (("numerator", a, g), ("denominator", c, h)):
                for i in range(M.shape[0]):
                    if S.minimize_linear(M[i], k[i]) <= DENOM_TOL:
                        raise DenominatorNonPositive(f"{name} piece {i} is not positive on S")

    @property
    def n(self):
        return self.a.shape[1]

    @property
    def n_num(self):
        return self.a.shape[0]

    @property
    def n_den(self):
        return self.c.shape[0]

    def ratio(self, x):
        """The ratio-of-extremes form evaluated directly."""
        x = np.asarray(x, dtype=float)
        U = np.max(self.a @ x + self.g)
        L = np.min(self.c @ x + self.h)
        return float((U - L) / (U + L))

    def to_json(self):
        d = {"n": self.n,
             "pieces_num": np.column_stack([self.a, self.g]).tolist(),
             "pieces_den": np.column_stack([self.c, self.h]).tolist(),
             "weights": self.norm.weights.tolist()}
        d.update(_feasible_to_json(self.feasible))
        return d

    @classmethod
    def from_json(cls, d):
        n = int(d["n"])
        num = np.array(d["pieces_num"], dtype=float).reshape(-1, n + 1)
        den = np.array(d["pieces_den"], dtype=float).reshape(-1, n + 1)
        return cls(num[:, :n], num[:, n], den[:, :n], den[:, n], _feasible_from_json(d, n),
                   WeightedL1Norm(d.get("weights", np.ones(n))))


def expand_special(s: SpecialPLFInstance) -> PLFInstance:
    """Rewrite the ratio of extremes as ``|I| * |J|`` pieces, ordered ``(i, j)`` row-major.

    Piece ``i * |J| + j`` has numerator ``U_i - L_j`` and denominator ``U_i + L_j``.
    """
    nI, nJ = s.n_num, s.n_den
    a = (s.a[:, None, :] - s.c[None, :, :]).reshape(nI * nJ, s.n)
    c = (s.a[:, None, :] + s.c[None, :, :]).reshape(nI * nJ, s.n)
    g = (s.g[:, None] - s.h[None, :]).ravel()
    h = (s.g[:, None] + s.h[None, :]).ravel()
    # positivity of U_i + L_j follows from positivity of U_i and L_j
    return PLFInstance(a, g, c, h, s.feasible, s.norm, validate=False)


def as_plf(instance):
    return expand_special(instance) if isinstance(instance, SpecialPLFInstance) else instance


def piece_values(instance: PLFInstance, x):
    x = np.asarray(x, dtype=float)
    den = instance.c @ x + instance.h
    if np.any(den <= DENOM_TOL):
        i = int(np.flatnonzero(den <= DENOM_TOL)[0])
        raise DenominatorNonPositive(f"piece {i} has denominator {den[i]:.3e} at x")
    return (instance.a @ x + instance.g) / den


def eval_f(instance, x, return_index=False, check=True):
    """Objective value at ``x``; with ``return_index`` also the lowest maximizing piece."""
    instance = as_plf(instance)
    x = np.asarray(x, dtype=float)
    if check and not instance.feasible.contains(x):
        raise OutsideFeasibleSet("x is not in the feasible set")
    vals = piece_values(instance, x)
    i = int(np.argmax(vals))  # first occurrence on ties
    return (float(vals[i]), i) if return_index else float(vals[i])


def random_instance(seed, n=50, nI=20, nJ=30, lower=1.0, upper=2.0):
    """Random special instance with all data i.i.d. uniform on [0, 1] and ``S = [lower, upper]^n``.

    Draw order from the ``instance`` stream: ``a`` (nI x n), ``g`` (nI), ``c`` (nJ x n), ``h`` (nJ).
    """
    if min(n, nI, nJ) < 1:
        raise InstanceError("n, nI and nJ must be positive")
    if not lower < upper:
        raise InstanceError("lower must be below upper")
    s = Stream(seed, INSTANCE)
    a = s.uniform((nI, n))
    g = s.uniform(nI)
    c = s.uniform((nJ, n))
    h = s.uniform(nJ)
    return SpecialPLFInstance(a, g, c, h, Box(lower, upper, n), WeightedL1Norm.unit(n))


def load_instance(path):
    with open(path) as fh:
        d = json.load(fh)
    if "pieces_num" in d:
        return SpecialPLFInstance.from_json(d)
    return PLFInstance.from_json(d)


def save_instance(instance, path):
    with open(path, "w") as fh:
        json.dump(instance.to_json(), fh, indent=1)
        fh.write("\n")
