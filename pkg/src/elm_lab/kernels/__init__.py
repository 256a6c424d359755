"""Hot-kernel backend selection.

The compiled Cython extension is used when available; the numpy fallback
otherwise.  Set ELM_LAB_KERNEL=python or ELM_LAB_KERNEL=cython to force a
backend (forcing cython raises if the extension is not built).
"""

from __future__ import annotations

import os

import numpy as np

_requested = os.environ.get("ELM_LAB_KERNEL", "auto").lower()

if _requested not in ("auto", "python", "cython"):
    raise ValueError(f"ELM_LAB_KERNEL must be auto|python|cython, got {_requested!r}")

if _requested == "python":
    from . import _fallback as _impl

    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        if _requested == "cython":
            raise
        from . import _fallback as _impl  # type: ignore[no-redef]

        BACKEND = "python"


def _as_c_double(a) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=np.float64)


def mixture_log_pdf(log_theta, weights, alphas) -> np.ndarray:
    """Mixture-of-Dirichlet log density at points given by their log coordinates."""
    return _impl.mixture_log_pdf(
        _as_c_double(log_theta), _as_c_double(weights), _as_c_double(alphas)
    )


def entropy_bits_from_log_pdf(log_pdf) -> float:
    """Shannon entropy (bits) of the normalized masses exp(log_pdf)."""
    return float(_impl.entropy_bits_from_log_pdf(_as_c_double(log_pdf)))


def quantized_entropy_bits(log_theta, weights, alphas) -> float:
    """Normalized mixture density on a grid, reduced to Shannon entropy in bits."""
    return float(
        _impl.quantized_entropy_bits(
            _as_c_double(log_theta), _as_c_double(weights), _as_c_double(alphas)
        )
    )
