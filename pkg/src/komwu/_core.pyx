# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops for the tree-form and cardinality-set kernels.

Mirrors the function signatures in ``komwu._pure``; one of the two modules
is selected at import time by ``komwu._backend``.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log, INFINITY


cdef inline double _logaddexp(double a, double b) nogil:
    cdef double m
    if a == -INFINITY:
        return b
    if b == -INFINITY:
        return a
    m = a if a > b else b
    return m + log(exp(a - m) + exp(b - m))


def tree_log_partials(const double[::1] logb,
                      const int[::1] first_seq,
                      const int[::1] n_actions,
                      const int[::1] bottomup,
                      const int[::1] child_start,
                      const int[::1] child_dp,
                      double[::1] logk,
                      double[::1] csum):
    """Bottom-up pass: per-decision-point log partial kernels against ones.

    ``logk[j]`` receives log K_j(b, 1); ``csum[s]`` the summed child log
    kernels hanging off sequence ``s`` (``csum[0]`` covers the root).
    """
    cdef Py_ssize_t n_dp = first_seq.shape[0]
    cdef Py_ssize_t oi, j, s, s0, s1, c
    cdef double m, acc, term
    for oi in range(n_dp):
        j = bottomup[oi]
        s0 = first_seq[j]
        s1 = s0 + n_actions[j]
        m = -INFINITY
        for s in range(s0, s1):
            acc = 0.0
            for c in range(child_start[s], child_start[s + 1]):
                acc += logk[child_dp[c]]
            csum[s] = acc
            term = logb[s] + acc
            if term > m:
                m = term
        acc = 0.0
        for s in range(s0, s1):
            acc += exp(logb[s] + csum[s] - m)
        logk[j] = m + log(acc)
    acc = 0.0
    for c in range(child_start[0], child_start[1]):
        acc += logk[child_dp[c]]
    csum[0] = acc


def tree_marginals(const double[::1] logb,
                   const int[::1] first_seq,
                   const int[::1] n_actions,
                   const int[::1] bottomup,
                   const int[::1] parent_seq,
                   const double[::1] logk,
                   const double[::1] csum,
                   double[::1] x):
    """Top-down pass turning partial kernels into the marginal iterate."""
    cdef Py_ssize_t n_dp = first_seq.shape[0]
    cdef Py_ssize_t oi, j, s, s0, s1
    cdef double xp, lk
    x[0] = 1.0
    for oi in range(n_dp - 1, -1, -1):
        j = bottomup[oi]
        xp = x[parent_seq[j]]
        lk = logk[j]
        s0 = first_seq[j]
        s1 = s0 + n_actions[j]
        for s in range(s0, s1):
            x[s] = xp * exp(logb[s] + csum[s] - lk)


def nset_excl_log_esym(const double[::1] lw, Py_ssize_t t_all, Py_ssize_t t_excl,
                       double[::1] out):
    """Log elementary-symmetric ratios via prefix/suffix coefficient tables.

    ``out[k] = log e_{t_excl}(w without k) - log e_{t_all}(w)`` for weights
    ``w = exp(lw)``; all quantities stay in the log domain.
    """
    cdef Py_ssize_t d = lw.shape[0]
    cdef Py_ssize_t width = t_all + 1
    cdef cnp.ndarray[double, ndim=2] A_arr = np.full((d + 1, width), -np.inf)
    cdef cnp.ndarray[double, ndim=2] B_arr = np.full((d + 1, width), -np.inf)
    cdef double[:, ::1] A = A_arr
    cdef double[:, ::1] B = B_arr
    cdef Py_ssize_t k, h
    cdef double m, acc, norm

    for k in range(d + 1):
        A[k, 0] = 0.0
        B[k, 0] = 0.0
    for k in range(1, d + 1):
        for h in range(1, width):
            A[k, h] = _logaddexp(A[k - 1, h], lw[k - 1] + A[k - 1, h - 1])
    for k in range(d - 1, -1, -1):
        for h in range(1, width):
            B[k, h] = _logaddexp(B[k + 1, h], lw[k] + B[k + 1, h - 1])

    norm = A[d, t_all]
    for k in range(d):
        m = -INFINITY
        for h in range(t_excl + 1):
            acc = A[k, h] + B[k + 1, t_excl - h]
            if acc > m:
                m = acc
        if m == -INFINITY:
            out[k] = -INFINITY
            continue
        acc = 0.0
        for h in range(t_excl + 1):
            acc += exp(A[k, h] + B[k + 1, t_excl - h] - m)
        out[k] = m + log(acc) - norm
