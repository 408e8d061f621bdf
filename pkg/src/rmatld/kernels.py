"""Backend dispatch for the hot Monte Carlo kernels.

The numba backend is used when available; set RMATLD_DISABLE_NUMBA=1 to
force the pure-numpy reference implementation (same recurrences, same
draws, same results up to floating-point associativity).
"""

import os

from . import _kernels_numpy

if os.environ.get("RMATLD_DISABLE_NUMBA", "") not in ("", "0"):
    BACKEND = "numpy"
    _impl = _kernels_numpy
else:
    try:
        from . import _kernels_numba as _impl

        BACKEND = "numba"
    except ImportError:
        BACKEND = "numpy"
        _impl = _kernels_numpy

walk_batch = _impl.walk_batch
kappa_batch = _impl.kappa_batch
