"""Linear inequalities standing in for the eigenvalue bounds of the reduced operators.

``lam_max(L(x)) <= lam_l`` (with identity-like reduced mass) holds iff
``b^T L(x) b <= lam_l b^T Ml b`` for every vector ``b``; keeping only a finite
set of vectors gives linear inequalities in ``(x, lam_l)``. The same holds for
``lam_min(U(x)) >= lam_u`` with the inequality reversed.
"""
from dataclasses import dataclass, field
from math import comb

import numpy as np

from ..linalg import sym_eigen

COMBINATORIAL_LIMIT = 10 ** 6
MASS_TOL = 1e-12


class CombinatorialLimit(ValueError):
    pass


class DegenerateVector(ValueError):
    pass


def cross_polytope_count(N, K):
    """``|B_K|``: integer points of the half L1 sphere of radius K in dimension N.

    The last coordinate is fixed by the others, so this counts points of
    ``Z^(N-1)`` with L1 norm at most K.
    """
    d = N - 1
    return sum(2 ** i * comb(d, i) * comb(K, i) for i in range(min(d, K) + 1))


@dataclass(frozen=True)
class ApproxVectors:
    N: int
    K: int
    integers: np.ndarray    # (count, N) integer points k with sum |k_i| = K, k_N >= 0
    vectors: np.ndarray     # integers / K

    def __len__(self):
        return self.vectors.shape[0]


def cross_polytope_vectors(N, K) -> ApproxVectors:
    """All ``k / K`` with integer ``k``, ``sum |k_i| = K`` and ``k_N >= 0``, in lexicographic order."""
    if N < 1 or K < 1:
        raise ValueError("N and K must be positive")
    count = cross_polytope_count(N, K)
    if count > COMBINATORIAL_LIMIT:
        raise CombinatorialLimit(f"{count} vectors for N={N}, K={K}")
    out = np.empty((count, N), dtype=np.int64)
    row = 0
    prefix = [0] * N

    def rec(pos, budget):
        nonlocal row
        if pos == N - 1:
            prefix[pos] = budget
            out[row] = prefix
            row += 1
            return
        for v in range(-budget, budget + 1):
            prefix[pos] = v
            rec(pos + 1, budget - abs(v))

    rec(0, K)
    assert row == count
    ints = out
    ints.flags.writeable = False
    vecs = ints / float(K)
    vecs.flags.writeable = False
    return ApproxVectors(N, K, ints, vecs)


def _quad_rows(A0, A, Mt, vecs):
    """Rows ``(b^T A_i b / b^T M b)_i`` and constants ``b^T A0 b / b^T M b`` for each ``b``."""
    vecs = np.atleast_2d(vecs)
    mass = np.einsum("pa,ab,pb->p", vecs, Mt, vecs)
    if np.any(mass <= MASS_TOL):
        raise DegenerateVector("vector with b^T M b <= 1e-12")
    const = np.einsum("pa,ab,pb->p", vecs, A0, vecs) / mass
    rows = np.einsum("pa,iab,pb->pi", vecs, A, vecs) / mass[:, None]
    return rows, const


@dataclass
class LfpData:
    """``B x + g <= lam_l`` and ``C x + h >= lam_u``, rows tagged with their index point t."""

    B: np.ndarray
    g: np.ndarray
    C: np.ndarray
    h: np.ndarray
    b_tags: list = field(default_factory=list)   # (t, vector) per B row
    c_tags: list = field(default_factory=list)

    @property
    def n_b(self):
        return self.B.shape[0]

    @property
    def n_c(self):
        return self.C.shape[0]

    def scaled(self, factor):
        return LfpData(self.B * factor, self.g * factor, self.C * factor, self.h * factor,
                       list(self.b_tags), list(self.c_tags))

    def add_lower_cut(self, reduced, t, v):
        r, c0 = _quad_rows(reduced.L0[t], reduced.L[t], reduced.Ml[t], v)
        self.B = np.vstack([self.B, r])
        self.g = np.concatenate([self.g, c0])
        self.b_tags.append((t, np.array(v)))

    def add_upper_cut(self, reduced, t, v):
        r, c0 = _quad_rows(reduced.U0[t], reduced.U[t], reduced.Mu[t], v)
        self.C = np.vstack([self.C, r])
        self.h = np.concatenate([self.h, c0])
        self.c_tags.append((t, np.array(v)))


def build_linear_inequalities(reduced, vecs_lower: ApproxVectors, vecs_upper: ApproxVectors = None) -> LfpData:
    """Rows ordered t-major: row ``t * len(vecs) + p`` uses vector ``p`` at index point ``t``."""
    vecs_upper = vecs_upper or vecs_lower
    Nl, Nu = reduced.L0.shape[1], reduced.U0.shape[1]
    if vecs_lower.N != Nl or vecs_upper.N != Nu:
        raise ValueError("vector dimension does not match the reduced operators")
    B, g, C, h, bt, ct = [], [], [], [], [], []
    for t in range(reduced.n_k):
        r, c0 = _quad_rows(reduced.L0[t], reduced.L[t], reduced.Ml[t], vecs_lower.vectors)
        B.append(r); g.append(c0)
        bt += [(t, v) for v in vecs_lower.vectors]
        r, c0 = _quad_rows(reduced.U0[t], reduced.U[t], reduced.Mu[t], vecs_upper.vectors)
        C.append(r); h.append(c0)
        ct += [(t, v) for v in vecs_upper.vectors]
    return LfpData(np.vstack(B), np.concatenate(g), np.vstack(C), np.concatenate(h), bt, ct)


@dataclass(frozen=True)
class Violation:
    side: str          # "lower" or "upper"
    t: int
    vector: np.ndarray  # unit L1 norm, last nonzero component made nonnegative
    amount: float       # minus the offending eigenvalue


def _l1_unit(v):
    v = v / np.sum(np.abs(v))
    nz = np.flatnonzero(np.abs(v) > 1e-15)
    if nz.size and v[nz[-1]] < 0:
        v = -v
    return v


def check_sdp_inclusions(reduced, x, lam_l, lam_u, tol=0.0):
    """Eigenvectors certifying ``lam_l Ml - L(x)`` or ``U(x) - lam_u Mu`` is not PSD.

    Returns a list of Violation sorted by decreasing amount (ties by side, t).
    """
    found = []
    for t in range(reduced.n_k):
        for side, S in (("lower", lam_l * reduced.Ml[t] - reduced.lower(t, x)),
                        ("upper", reduced.upper(t, x) - lam_u * reduced.Mu[t])):
            dec = sym_eigen(0.5 * (S + S.T))
            for lam, v in zip(dec.eigenvalues, dec.eigenvectors.T):
                if lam < -tol:
                    found.append(Violation(side, t, _l1_unit(v), float(-lam)))
    found.sort(key=lambda v: (-v.amount, v.side, v.t))
    return found


def max_violation(reduced, x, lam_l, lam_u):
    v = check_sdp_inclusions(reduced, x, lam_l, lam_u, tol=0.0)
    return v[0].amount if v else 0.0
