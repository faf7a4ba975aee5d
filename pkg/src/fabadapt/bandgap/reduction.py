"""Projection of a family onto windows of eigenvectors around the target band."""
from dataclasses import dataclass

import numpy as np

from .family import default_band


@dataclass(frozen=True)
class BandWindow:
    """Band ``m`` (1-based) with ``below`` eigenvectors ``u_{m-below+1}..u_m`` and
    ``above`` eigenvectors ``u_{m+1}..u_{m+above}``."""

    m: int
    below: int = 3
    above: int = 3

    def check(self, dim):
        if not 1 <= self.m < dim:
            raise ValueError(f"band index {self.m} outside 1..{dim - 1}")
        if self.below < 1 or self.above < 1:
            raise ValueError("window sizes must be at least 1")
        if self.m - self.below < 0 or self.m + self.above > dim:
            raise ValueError("window extends past the spectrum")

    @property
    def lower_slice(self):
        return slice(self.m - self.below, self.m)

    @property
    def upper_slice(self):
        return slice(self.m, self.m + self.above)

    @classmethod
    def default(cls, family, below=3, above=3):
        return cls(default_band(family), below, above)


@dataclass(frozen=True, eq=False)
class ReducedOperators:
    """Per-t reduced families ``L0[t] + sum_i L[t, i] x_i`` (lower window) and
    ``U0[t] + sum_i U[t, i] x_i`` (upper window) with reduced masses ``Ml[t]``, ``Mu[t]``."""

    L0: np.ndarray
    L: np.ndarray
    Ml: np.ndarray
    U0: np.ndarray
    U: np.ndarray
    Mu: np.ndarray
    x_hat: np.ndarray
    window: BandWindow

    @property
    def n_k(self):
        return self.L0.shape[0]

    @property
    def n_x(self):
        return self.L.shape[1]

    def lower(self, t, x):
        return self.L0[t] + np.tensordot(np.asarray(x, dtype=float), self.L[t], axes=1)

    def upper(self, t, x):
        return self.U0[t] + np.tensordot(np.asarray(x, dtype=float), self.U[t], axes=1)


def _project(P, family, t):
    A0 = P.T @ family.A0[t] @ P
    A = np.einsum("ja,ijk,kb->iab", P, family.A[t], P)
    sym = lambda X: 0.5 * (X + np.swapaxes(X, -1, -2))
    return sym(A0), sym(A), sym(P.T @ family.M @ P)


def reduce_operators(family, x_hat, window: BandWindow = None) -> ReducedOperators:
    """Rayleigh-Ritz projection onto the eigenvectors of ``A(k_t, x_hat)`` in ``window``."""
    window = window or BandWindow.default(family)
    window.check(family.dim)
    x_hat = np.asarray(x_hat, dtype=float)
    parts = {k: [] for k in ("L0", "L", "Ml", "U0", "U", "Mu")}
    for t in range(family.n_k):
        V = family.eigen(t, x_hat).eigenvectors  # M-orthonormal, sign-fixed
        for side, sl in (("L", window.lower_slice), ("U", window.upper_slice)):
            A0, A, Mr = _project(V[:, sl], family, t)
            parts[side + "0"].append(A0)
            parts[side].append(A)
            parts["M" + side.lower()].append(Mr)
    arr = {k: np.array(v) for k, v in parts.items()}
    return ReducedOperators(arr["L0"], arr["L"], arr["Ml"], arr["U0"], arr["U"], arr["Mu"],
                            x_hat.copy(), window)
