"""Pure-numpy implementations of the hot kernels (import-time fallback)."""

from __future__ import annotations

import numpy as np
from scipy.special import gammaln, logsumexp


def _log_weight_minus_log_beta(weights: np.ndarray, alphas: np.ndarray) -> np.ndarray:
    log_beta = gammaln(alphas).sum(axis=1) - gammaln(alphas.sum(axis=1))
    with np.errstate(divide="ignore"):
        return np.log(weights) - log_beta


def mixture_log_pdf(log_theta: np.ndarray, weights: np.ndarray,
                    alphas: np.ndarray) -> np.ndarray:
    """Log density of a Dirichlet mixture at each point, given log coordinates."""
    lwb = _log_weight_minus_log_beta(weights, alphas)
    # (n, M): per-component log of weight * density
    comp = log_theta @ (alphas - 1.0).T + lwb
    if alphas.shape[0] == 1:
        return comp[:, 0]
    return logsumexp(comp, axis=1)


def entropy_bits_from_log_pdf(log_pdf: np.ndarray) -> float:
    """Shannon entropy (bits) of the normalized masses exp(log_pdf)."""
    m = log_pdf.max()
    w = np.exp(log_pdf - m)
    total = w.sum()
    nz = w[w > 0.0]
    acc = float((nz * np.log(nz)).sum())
    return (np.log(total) - acc / total) / np.log(2.0)


def quantized_entropy_bits(log_theta: np.ndarray, weights: np.ndarray,
                           alphas: np.ndarray) -> float:
    """Fused: mixture log pdf on a grid, normalize, Shannon entropy in bits."""
    return entropy_bits_from_log_pdf(mixture_log_pdf(log_theta, weights, alphas))
