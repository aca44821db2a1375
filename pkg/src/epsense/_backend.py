"""Kernel backend selection.

The compiled extension is preferred; set ``EPSENSE_PURE_PYTHON=1`` to force
the numpy fallback (used by the benchmark and the equivalence tests).
"""
import os

from . import _fallback

BACKEND = "python"
pauli_word_matrix = _fallback.pauli_word_matrix
faddeev_leverrier = _fallback.faddeev_leverrier

if os.environ.get("EPSENSE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        BACKEND = "compiled"
        pauli_word_matrix = _kernels.pauli_word_matrix
        faddeev_leverrier = _kernels.faddeev_leverrier
