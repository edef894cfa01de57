"""Backend selection for the fringe-fit kernels.

The compiled extension is used when it imports; otherwise the numpy
implementation.  Set ``CLOCKINTERF_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _fringe_py

if os.environ.get("CLOCKINTERF_PURE_PYTHON", "") not in ("", "0"):
    _impl = _fringe_py
    BACKEND = "python"
else:
    try:
        from . import _fringe_kernel as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _fringe_py
        BACKEND = "python"

fringe_model = _impl.fringe_model
fringe_cost = _impl.fringe_cost
fringe_normal_equations = _impl.fringe_normal_equations


def compiled_available() -> bool:
    try:
        from . import _fringe_kernel  # noqa: F401
    except ImportError:
        return False
    return True


def get_backend(name: str):
    """Return the kernel module for ``"python"`` or ``"cython"``."""
    if name == "python":
        return _fringe_py
    if name == "cython":
        from . import _fringe_kernel
        return _fringe_kernel
    raise ValueError(f"unknown backend {name!r}")
