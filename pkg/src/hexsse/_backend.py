"""Kernel backend selection.

The compiled extension is used when importable; otherwise the pure-Python
kernels take over.  Set HEXSSE_BACKEND=python or HEXSSE_BACKEND=compiled to
force one (forcing `compiled` raises if the extension is missing).
"""
from __future__ import annotations

import os

_choice = os.environ.get("HEXSSE_BACKEND", "").strip().lower()
if _choice not in ("", "compiled", "python"):
    raise RuntimeError(f"HEXSSE_BACKEND must be 'compiled' or 'python', not {_choice!r}")

if _choice == "python":
    from . import _pykernels as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        if _choice == "compiled":
            raise
        from . import _pykernels as kernels

BACKEND = kernels.BACKEND_NAME


def get_kernels(name: str | None = None):
    """Kernel module for `name` ('compiled' | 'python'), default the active one."""
    if name is None:
        return kernels
    if name == "python":
        from . import _pykernels
        return _pykernels
    if name == "compiled":
        from . import _kernels  # type: ignore[attr-defined]
        return _kernels
    raise ValueError(f"unknown backend {name!r}")
