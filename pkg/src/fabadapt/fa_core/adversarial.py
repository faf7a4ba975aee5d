"""Adversarial adaptivity: the worst objective value within distance sigma of a candidate."""
import csv
from dataclasses import dataclass

import numpy as np

from .counterpart import fa_eval


@dataclass(frozen=True)
class ZadCurve:
    sigmas: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.sigmas, dtype=float)
        if s.ndim != 1 or np.any(s < 0) or np.any(np.diff(s) < 0):
            raise ValueError("sigmas must be ascending and nonnegative")

    def at(self, sigma):
        i = int(np.argmin(np.abs(self.sigmas - sigma)))
        return float(self.values[i])


def zad(instance, x_hat, sigma):
    """``max f(y)`` over feasible ``y`` with ``||y - x_hat|| <= sigma``."""
    return fa_eval(instance, x_hat, sigma).value


def default_grid(delta, points=11):
    return np.linspace(0.0, float(delta), points)


def zad_sweep(instance, x_hat, sigmas, jobs=1) -> ZadCurve:
    """ZAD on a grid of radii.

    Balls are nested, so the exact curve is nondecreasing; a running maximum
    removes LP round-off (at most ~1e-12) that could break that order.
    """
    sigmas = np.asarray(sigmas, dtype=float)
    if jobs > 1 and sigmas.size > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(jobs) as ex:
            vals = list(ex.map(lambda s: zad(instance, x_hat, s), sigmas))
    else:
        vals = [zad(instance, x_hat, s) for s in sigmas]
    return ZadCurve(sigmas, np.maximum.accumulate(np.array(vals)))


def write_curves_csv(path, sigmas, columns):
    """``columns`` maps header name to values; written in the given order."""
    names = list(columns)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sigma", *names])
        for k, s in enumerate(sigmas):
            w.writerow([repr(float(s)), *(repr(float(columns[c][k])) for c in names)])


def write_curve_csv(path, curve: ZadCurve):
    write_curves_csv(path, curve.sigmas, {"value": curve.values})


def read_curves_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, data = rows[0], np.array(rows[1:], dtype=float)
    return {h: data[:, k] for k, h in enumerate(header)}
