"""Backend selection for the hot loops.

The compiled extension ``fabadapt._kernels`` is used when it imports;
otherwise (or with ``FABADAPT_PURE_PYTHON=1``) the numpy versions from
``fabadapt._pykernels`` are used. ``BACKEND`` names the active one.
"""
import os

from . import _pykernels

if os.environ.get("FABADAPT_PURE_PYTHON", "") == "1":
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

run_simplex = _impl.run_simplex
jacobi_sweeps = _impl.jacobi_sweeps

AT_LOWER = _pykernels.AT_LOWER
AT_UPPER = _pykernels.AT_UPPER
FREE_ZERO = _pykernels.FREE_ZERO
BASIC = _pykernels.BASIC
FIXED = _pykernels.FIXED


def get_backend(name):
    """Return the ``(run_simplex, jacobi_sweeps)`` pair for ``name``."""
    if name == "python":
        return _pykernels.run_simplex, _pykernels.jacobi_sweeps
    if name == "cython":
        from . import _kernels
        return _kernels.run_simplex, _kernels.jacobi_sweeps
    raise ValueError(f"unknown backend {name!r}")
