"""Fabrication-adaptive optimization of piecewise linear fractional objectives.

Subpackages: ``fa_core`` (instances, FA counterparts, Algorithm FA, ZAD) and
``bandgap`` (toy eigenproblem families and the LFP bandgap algorithms).
Modules ``lp`` and ``linalg`` hold the dense LP and eigen solvers they use.
"""
from .kernels import BACKEND

__version__ = "0.1.0"
