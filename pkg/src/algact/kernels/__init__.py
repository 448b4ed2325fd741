"""Hot inner loops.

The numba implementations are used when numba imports cleanly; setting
``ALGACT_NO_NUMBA=1`` in the environment forces the pure-numpy path.
Both paths perform the same floating-point operations in the same order.
"""

import os

import numpy as np

from . import _numpy as numpy_impl

try:
    if os.environ.get("ALGACT_NO_NUMBA", "") not in ("", "0"):
        raise ImportError("disabled by ALGACT_NO_NUMBA")
    from . import _numba as numba_impl
except ImportError:
    numba_impl = None

BACKEND = "numba" if numba_impl is not None else "numpy"
_impl = numba_impl if numba_impl is not None else numpy_impl

scatter_conv = _impl.scatter_conv
gather_conv = _impl.gather_conv
sample_keys = _impl.sample_keys
digits = _impl.digits
window_values = _impl.window_values
mc_phases = _impl.mc_phases


def stream_key(seed: int, stream: int) -> np.uint64:
    """64-bit key for a (seed, stream) pair; shared by both backends."""
    mask = (1 << 64) - 1

    def mix(z):
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
        return z ^ (z >> 31)

    if seed < 0:
        raise ValueError("seed must be nonnegative")
    # as uint64: keys >= 2^63 would overflow a signed numba argument
    return np.uint64(mix((mix((seed + 0x9E3779B97F4A7C15) & mask) ^ (stream * 0xD1B54A32D192ED03)) & mask))
