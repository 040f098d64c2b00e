"""Hot simulation kernels.

The compiled Cython module is used when it was built; otherwise the
pure-Python fallback is selected. Setting ``MAZEROBOT_BACKEND=python`` forces
the fallback (used by the equivalence tests and the benchmark).
"""
import os

from . import fallback
from .fallback import (CTL_FIRST_RETURN, CTL_FLAG_HITS, CTL_LAST_MARK, CTL_MARKS,
                       CTL_STATE, CTL_STEP)

CTL_SIZE = 8

try:
    from . import _kernels as compiled
except ImportError:  # extension not built
    compiled = None

if compiled is not None and os.environ.get("MAZEROBOT_BACKEND", "").lower() != "python":
    kernels = compiled
    BACKEND = "cython"
else:
    kernels = fallback
    BACKEND = "python"


def get_kernels(name: str | None = None):
    """Kernel module by name (``"cython"`` or ``"python"``); default is the active one."""
    if name is None:
        return kernels
    if name == "python":
        return fallback
    if name == "cython":
        if compiled is None:
            raise RuntimeError("compiled kernels are not built")
        return compiled
    raise ValueError(f"unknown backend {name!r}")


__all__ = ["BACKEND", "kernels", "fallback", "compiled", "get_kernels", "CTL_SIZE",
           "CTL_STATE", "CTL_STEP", "CTL_FLAG_HITS", "CTL_MARKS", "CTL_FIRST_RETURN",
           "CTL_LAST_MARK"]
