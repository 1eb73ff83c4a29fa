"""Kernel backend selection: compiled extension with NumPy fallback.

The compiled module is preferred when importable. Set SEIZDET_KERNELS=py to
force the NumPy path or SEIZDET_KERNELS=c to require the extension (raising
if it is missing). Both backends satisfy the same contract; tests compare
them directly.
"""

from __future__ import annotations

import os

from . import _kernels_np

try:
    from . import _convkernels as _compiled
except ImportError:  # extension not built on this install
    _compiled = None


def available_backends() -> tuple[str, ...]:
    return ("c", "py") if _compiled is not None else ("py",)


def get_backend(name: str):
    if name == "py":
        return _kernels_np
    if name == "c":
        if _compiled is None:
            raise ImportError("compiled kernel extension is not available")
        return _compiled
    raise ValueError(f"unknown kernel backend {name!r}; expected 'c' or 'py'")


def _select() -> str:
    choice = os.environ.get("SEIZDET_KERNELS", "").strip().lower()
    if choice in ("c", "compiled"):
        get_backend("c")
        return "c"
    if choice in ("py", "python", "numpy"):
        return "py"
    if choice:
        raise ValueError(f"SEIZDET_KERNELS={choice!r} not understood (use 'c' or 'py')")
    return "c" if _compiled is not None else "py"


BACKEND = _select()
_impl = get_backend(BACKEND)

conv2d_forward = _impl.conv2d_forward
conv2d_backward = _impl.conv2d_backward
maxpool2_forward = _impl.maxpool2_forward
maxpool2_backward = _impl.maxpool2_backward
