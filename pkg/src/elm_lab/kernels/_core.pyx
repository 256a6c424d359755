# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: mixture-of-Dirichlet log densities on point sets and
discrete Shannon entropies.  Mirrors elm_lab.kernels._fallback exactly."""

from libc.math cimport exp, log, lgamma, INFINITY

import numpy as np

cdef double LOG2 = 0.6931471805599453


cdef void _prepare(const double[:, ::1] alphas, const double[::1] weights,
                   double[::1] logw_minus_logb) noexcept nogil:
    cdef Py_ssize_t M = alphas.shape[0]
    cdef Py_ssize_t K = alphas.shape[1]
    cdef Py_ssize_t j, k
    cdef double logb, a0
    for j in range(M):
        logb = 0.0
        a0 = 0.0
        for k in range(K):
            logb += lgamma(alphas[j, k])
            a0 += alphas[j, k]
        logb -= lgamma(a0)
        if weights[j] > 0.0:
            logw_minus_logb[j] = log(weights[j]) - logb
        else:
            logw_minus_logb[j] = -INFINITY


def mixture_log_pdf(const double[:, ::1] log_theta, const double[::1] weights,
                    const double[:, ::1] alphas):
    """Log density of a Dirichlet mixture at each point, given log coordinates."""
    cdef Py_ssize_t n = log_theta.shape[0]
    cdef Py_ssize_t K = log_theta.shape[1]
    cdef Py_ssize_t M = alphas.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    lwb_arr = np.empty(M, dtype=np.float64)
    cdef double[::1] lwb = lwb_arr
    cdef Py_ssize_t i, j, k
    cdef double s, m, acc
    _prepare(alphas, weights, lwb)
    with nogil:
        for i in range(n):
            m = -INFINITY
            for j in range(M):
                s = lwb[j]
                for k in range(K):
                    s += (alphas[j, k] - 1.0) * log_theta[i, k]
                if s > m:
                    m = s
            if M == 1:
                out[i] = m
                continue
            acc = 0.0
            for j in range(M):
                s = lwb[j]
                for k in range(K):
                    s += (alphas[j, k] - 1.0) * log_theta[i, k]
                acc += exp(s - m)
            out[i] = m + log(acc)
    return out_arr


def entropy_bits_from_log_pdf(const double[::1] log_pdf):
    """Shannon entropy (bits) of the normalized masses exp(log_pdf)."""
    cdef Py_ssize_t n = log_pdf.shape[0]
    cdef Py_ssize_t i
    cdef double m = -INFINITY
    cdef double total = 0.0
    cdef double acc = 0.0
    cdef double w
    for i in range(n):
        if log_pdf[i] > m:
            m = log_pdf[i]
    for i in range(n):
        w = exp(log_pdf[i] - m)
        total += w
        if w > 0.0:
            acc += w * log(w)
    # H = log(total) - acc/total, in nats; convert to bits
    return (log(total) - acc / total) / LOG2


def quantized_entropy_bits(const double[:, ::1] log_theta, const double[::1] weights,
                           const double[:, ::1] alphas):
    """Fused: mixture log pdf on a grid, normalize, Shannon entropy in bits."""
    log_pdf = mixture_log_pdf(log_theta, weights, alphas)
    return entropy_bits_from_log_pdf(log_pdf)
