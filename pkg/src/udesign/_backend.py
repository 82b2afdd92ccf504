"""Kernel backend selection: compiled Cython module if importable, numpy otherwise."""

import os

from . import _fallback

try:
    from . import _kernels
except ImportError:
    _kernels = None

BACKENDS = {"python": _fallback}
if _kernels is not None:
    BACKENDS["cython"] = _kernels

if _kernels is None or os.environ.get("UDESIGN_PURE_PYTHON", "") not in ("", "0"):
    BACKEND = "python"
else:
    BACKEND = "cython"

_impl = BACKENDS[BACKEND]
pair_power_sum = _impl.pair_power_sum
power_sum = _impl.power_sum
potential_and_gradient = _impl.potential_and_gradient
monomial_traces = _impl.monomial_traces
