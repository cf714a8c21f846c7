"""Kernel backend selection.

Hot numeric kernels are written once and compiled with numba when it is
available.  Setting the environment variable STOCHRELAX_NUMBA to 0 (or
"false"/"off"/"no"), or NUMBA_DISABLE_JIT=1, forces the pure-numpy
fallback: the same functions run as plain Python.  The flag is read at
import time; results are identical on both paths up to last-digit
floating-point noise.
"""

from __future__ import annotations

import os


def _jit_disabled() -> bool:
    v = os.environ.get("STOCHRELAX_NUMBA", "").strip().lower()
    if v in {"0", "false", "off", "no"}:
        return True
    if os.environ.get("NUMBA_DISABLE_JIT", "").strip() == "1":
        return True
    return False


NUMBA_ENABLED = False
if not _jit_disabled():
    try:
        import numba as _numba  # noqa: F401

        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False


if NUMBA_ENABLED:
    import numba

    def jit_kernel(fn):
        """Compile fn as a cached, nogil, nopython kernel."""
        return numba.njit(cache=True, nogil=True)(fn)

else:

    def jit_kernel(fn):
        """Fallback: leave fn as plain Python."""
        return fn


def backend_name() -> str:
    return "numba" if NUMBA_ENABLED else "python"
