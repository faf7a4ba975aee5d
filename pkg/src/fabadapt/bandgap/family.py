"""Affine families of generalized symmetric eigenproblems ``A(k_t, x) u = lam M u``."""
import json
from dataclasses import dataclass

import numpy as np

from ..fa_core.instances import Box
from ..linalg import NotPositiveDefinite, check_symmetric, cholesky, gen_eigen, sym_eigen
from ..rng import INSTANCE, Stream

PSD_TOL = 1e-9


class FamilyError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class EigenFamily:
    """``A(k_t, x) = A0[t] + sum_i A[t, i] * x_i`` for index points ``t = 0..n_k-1``.

    Shapes: ``A0`` is (n_k, dim, dim), ``A`` is (n_k, n_x, dim, dim), ``M`` is
    (dim, dim); the design box is ``[lower, upper]`` with ``lower > 0``.
    """

    A0: np.ndarray
    A: np.ndarray
    M: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        A0 = np.array(self.A0, dtype=float)
        A = np.array(self.A, dtype=float)
        M = np.array(self.M, dtype=float)
        if A0.ndim != 3 or A.ndim != 4 or A.shape[0] != A0.shape[0] or A.shape[2:] != A0.shape[1:]:
            raise FamilyError("inconsistent family shapes")
        lower = np.broadcast_to(np.asarray(self.lower, dtype=float), (A.shape[1],)).copy()
        upper = np.broadcast_to(np.asarray(self.upper, dtype=float), (A.shape[1],)).copy()
        if np.any(lower <= 0) or np.any(lower > upper):
            raise FamilyError("design box must satisfy 0 < lower <= upper")
        for arr in (A0, A, M, lower, upper):
            arr.flags.writeable = False
        object.__setattr__(self, "A0", A0)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def n_k(self):
        return self.A0.shape[0]

    @property
    def n_x(self):
        return self.A.shape[1]

    @property
    def dim(self):
        return self.A0.shape[1]

    @property
    def box(self):
        return Box(self.lower, self.upper)

    def matrix(self, t, x):
        return self.A0[t] + np.tensordot(np.asarray(x, dtype=float), self.A[t], axes=1)

    def eigen(self, t, x):
        return gen_eigen(self.matrix(t, x), self.M)

    def eigenvalues(self, x):
        """(n_k, dim) array of generalized eigenvalues, ascending per row."""
        return np.array([self.eigen(t, x).eigenvalues for t in range(self.n_k)])

    def validate(self, stream=None, vertices=8):
        """Symmetry, ``M`` positive definite, and ``A(k_t, x)`` PSD at box vertices.

        Checks the all-lower and all-upper vertices plus ``vertices`` random ones.
        """
        check_symmetric(self.M, "M")
        try:
            cholesky(self.M)
        except NotPositiveDefinite as exc:
            raise FamilyError("M is not positive definite") from exc
        for t in range(self.n_k):
            check_symmetric(self.A0[t], f"A0[{t}]")
            for i in range(self.n_x):
                check_symmetric(self.A[t, i], f"A[{t},{i}]")
        pts = [self.lower, self.upper]
        if vertices:
            s = stream or Stream(0, "validate")
            pick = s.uniform((vertices, self.n_x)) < 0.5
            pts += [np.where(p, self.upper, self.lower) for p in pick]
        for x in pts:
            for t in range(self.n_k):
                lam = sym_eigen(self.matrix(t, x)).eigenvalues
                if lam[0] < -PSD_TOL * max(1.0, abs(lam[-1])):
                    raise FamilyError(f"A(k_{t}, x) is not PSD at a box vertex")
        return True

    def to_json(self):
        return {"n_k": self.n_k, "n_x": self.n_x, "dim": self.dim,
                "A0": self.A0.tolist(), "A": self.A.tolist(), "M": self.M.tolist(),
                "lower": self.lower.tolist(), "upper": self.upper.tolist()}

    @classmethod
    def from_json(cls, d):
        return cls(d["A0"], d["A"], d["M"], d["lower"], d["upper"])


def save_family(family, path):
    with open(path, "w") as fh:
        json.dump(family.to_json(), fh)
        fh.write("\n")


def load_family(path):
    with open(path) as fh:
        return EigenFamily.from_json(json.load(fh))


def default_band(family):
    return family.dim // 2


def gap_midgap(family, x, m=None):
    """``2 (min_t lam_{m+1} - max_t lam_m) / (min_t lam_{m+1} + max_t lam_m)``, ``m`` 1-based."""
    m = default_band(family) if m is None else m
    if not 1 <= m < family.dim:
        raise ValueError("band index out of range")
    lam = family.eigenvalues(x)
    lo = lam[:, m - 1].max()
    hi = lam[:, m].min()
    return float(2.0 * (hi - lo) / (hi + lo))


def random_toy_family(seed, n_k=4, n_x=8, dim=12, rank=2, lower=0.1, upper=1.0):
    """Seeded synthetic family with PSD parts.

    Every ``A[t, i] = G^T G`` with a Gaussian ``rank x dim`` factor; ``A0[t]`` is
    ``G0^T G0 / dim + 0.1 I`` (positive definite) and ``M = H^T H / dim + I``.
    The ``instance`` stream draws M first, then per t: ``A0`` then the n_x parts.
    """
    if dim < 4 or n_x < 1 or n_k < 1:
        raise FamilyError("need dim >= 4, n_x >= 1, n_k >= 1")
    s = Stream(seed, INSTANCE)
    H = s.normal((dim, dim))
    M = H.T @ H / dim + np.eye(dim)
    A0 = np.empty((n_k, dim, dim))
    A = np.empty((n_k, n_x, dim, dim))
    for t in range(n_k):
        G0 = s.normal((dim, dim))
        A0[t] = G0.T @ G0 / dim + 0.1 * np.eye(dim)
        for i in range(n_x):
            G = s.normal((rank, dim))
            A[t, i] = G.T @ G
    M = 0.5 * (M + M.T)
    A0 = 0.5 * (A0 + A0.transpose(0, 2, 1))
    A = 0.5 * (A + A.transpose(0, 1, 3, 2))
    fam = EigenFamily(A0, A, M, np.full(n_x, lower), np.full(n_x, upper))
    fam.validate(Stream(seed, "validate"))
    return fam
