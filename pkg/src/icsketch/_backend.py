"""Kernel selection.

The compiled kernel is used when importable. Set ``ICSKETCH_BACKEND=python``
to force the pure-Python kernel, or ``=compiled`` to fail loudly when the
extension is missing.
"""
from __future__ import annotations

import os

from . import _kernel_py

try:
    from . import _kernel as _kernel_c
except ImportError:  # extension not built
    _kernel_c = None

_KERNELS = {"python": _kernel_py.SketchKernel}
if _kernel_c is not None:
    _KERNELS["compiled"] = _kernel_c.SketchKernel


def available() -> list[str]:
    return sorted(_KERNELS)


def kernel_class(name: str | None = None):
    if name is None:
        name = os.environ.get("ICSKETCH_BACKEND", "auto")
    if name == "auto":
        name = "compiled" if "compiled" in _KERNELS else "python"
    try:
        return _KERNELS[name]
    except KeyError:
        raise ImportError(f"kernel backend {name!r} unavailable (have {available()})") from None


DEFAULT = kernel_class().backend
