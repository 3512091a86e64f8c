"""Backend selection for the hot loops.

Set ``SLRC_BACKEND=numpy`` to force the pure-numpy kernels (slow, but free of
JIT compilation); the default is ``numba`` whenever numba can be imported.
"""

from __future__ import annotations

import os

_requested = os.environ.get("SLRC_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"SLRC_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

BACKEND = "numba" if (_requested == "numba" and HAVE_NUMBA) else "numpy"


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, otherwise a no-op decorator.

    Kernels are always compiled when numba exists so the benchmark can compare
    both paths regardless of ``SLRC_BACKEND``.
    """
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn
