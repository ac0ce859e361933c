"""Numeric kernel backend selection.

Prefers the compiled Cython extension and falls back to the pure-Python
implementation when the extension was not built.  Set ``ECBW_PURE_PYTHON=1``
to force the fallback (used by the backend-parity tests and the benchmark).
"""

import os

from . import pykernels

if os.environ.get("ECBW_PURE_PYTHON"):
    _impl = pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl

        BACKEND = "c"
    except ImportError:
        _impl = pykernels
        BACKEND = "python"

correction = _impl.correction
modified_isr = _impl.modified_isr
modified_fsr = _impl.modified_fsr
isr_weights = _impl.isr_weights
fsr_weights = _impl.fsr_weights
roulette_index = _impl.roulette_index
roulette_draws = _impl.roulette_draws

__all__ = [
    "BACKEND",
    "correction",
    "modified_isr",
    "modified_fsr",
    "isr_weights",
    "fsr_weights",
    "roulette_index",
    "roulette_draws",
    "pykernels",
]
