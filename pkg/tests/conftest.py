import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from fabadapt import kernels  # noqa: E402


def _backends():
    out = ["python"]
    try:
        kernels.get_backend("cython")
        out.insert(0, "cython")
    except ImportError:
        pass
    return out


BACKENDS = _backends()


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param
