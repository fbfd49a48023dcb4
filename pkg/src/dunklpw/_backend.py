"""Numerical backend selection.

The Bessel-series evaluator is the innermost hot loop of the package (it
runs once per kernel-matrix entry and per expression evaluation node).  When
numba is importable it is compiled with ``@njit``; a pure-numpy fallback is
always available.  The environment variable ``DUNKLPW_BACKEND`` forces the
choice:

* ``DUNKLPW_BACKEND=numpy``   never use numba, even if installed
* ``DUNKLPW_BACKEND=numba``   require numba, raise if it is missing
* unset or ``auto``           use numba when importable

``benchmarks/backend_bench.py`` compares the two paths.
"""

from __future__ import annotations

import os

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:
    njit = None
    HAS_NUMBA = False

_requested = os.environ.get("DUNKLPW_BACKEND", "auto").strip().lower() or "auto"
if _requested not in ("auto", "numba", "numpy"):
    raise ValueError(
        f"DUNKLPW_BACKEND={_requested!r} not recognized; use 'numba', 'numpy' or 'auto'"
    )
if _requested == "numba" and not HAS_NUMBA:
    raise ImportError("DUNKLPW_BACKEND=numba requested but numba is not importable")

USE_NUMBA = HAS_NUMBA if _requested == "auto" else _requested == "numba"


def backend_name() -> str:
    """Name of the active backend, ``'numba'`` or ``'numpy'``."""
    return "numba" if USE_NUMBA else "numpy"


def compile_elementwise(func):
    """Return ``func`` njit-compiled under the numba backend, unchanged otherwise.

    ``func`` must be written in nopython-compatible style (flat-array loops,
    scalar arithmetic only).
    """
    if USE_NUMBA:
        return njit(cache=True, fastmath=False)(func)
    return func
