"""Gate kernels: compiled extension when built, numpy fallback otherwise.

Set TRIQET_BACKEND=python (or =cython) to force a backend; the benchmark
and the backend-equivalence tests import both modules directly.
"""

import os

from . import py_kernels

_requested = os.environ.get("TRIQET_BACKEND", "").lower()

if _requested == "python":
    _active = py_kernels
elif _requested in ("", "cython"):
    try:
        from . import _kernels as _active  # type: ignore[no-redef]
    except ImportError:
        if _requested == "cython":
            raise
        _active = py_kernels
else:
    raise ValueError(f"TRIQET_BACKEND must be 'cython' or 'python', got {_requested!r}")

BACKEND = "python" if _active is py_kernels else "cython"

apply_rotation = _active.apply_rotation
apply_cnot = _active.apply_cnot
apply_cz = _active.apply_cz
