"""Pure numpy/Python fallback for the hot kernel loops.

Same signatures as the compiled ``komwu._core`` extension; ``komwu._backend``
picks one of the two at import time. Kept deliberately close to the compiled
code so the two can be cross-checked.
"""

import math

import numpy as np

NAME = "pure"


def tree_log_partials(logb, first_seq, n_actions, bottomup, child_start,
                      child_dp, logk, csum):
    """Bottom-up pass: per-decision-point log partial kernels against ones."""
    for j in bottomup:
        s0 = first_seq[j]
        s1 = s0 + n_actions[j]
        m = -math.inf
        for s in range(s0, s1):
            c0, c1 = child_start[s], child_start[s + 1]
            acc = float(logk[child_dp[c0:c1]].sum()) if c1 > c0 else 0.0
            csum[s] = acc
            term = logb[s] + acc
            if term > m:
                m = term
        acc = 0.0
        for s in range(s0, s1):
            acc += math.exp(logb[s] + csum[s] - m)
        logk[j] = m + math.log(acc)
    c0, c1 = child_start[0], child_start[1]
    csum[0] = float(logk[child_dp[c0:c1]].sum()) if c1 > c0 else 0.0


def tree_marginals(logb, first_seq, n_actions, bottomup, parent_seq,
                   logk, csum, x):
    """Top-down pass turning partial kernels into the marginal iterate."""
    x[0] = 1.0
    for j in bottomup[::-1]:
        xp = x[parent_seq[j]]
        lk = logk[j]
        s0 = first_seq[j]
        s1 = s0 + n_actions[j]
        for s in range(s0, s1):
            x[s] = xp * math.exp(logb[s] + csum[s] - lk)


def nset_excl_log_esym(lw, t_all, t_excl, out):
    """Log elementary-symmetric ratios via prefix/suffix coefficient tables.

    ``out[k] = log e_{t_excl}(w without k) - log e_{t_all}(w)`` for weights
    ``w = exp(lw)``.
    """
    d = lw.shape[0]
    width = t_all + 1
    A = np.full((d + 1, width), -np.inf)
    B = np.full((d + 1, width), -np.inf)
    A[:, 0] = 0.0
    B[:, 0] = 0.0
    for k in range(1, d + 1):
        A[k, 1:] = np.logaddexp(A[k - 1, 1:], lw[k - 1] + A[k - 1, :-1])
    for k in range(d - 1, -1, -1):
        B[k, 1:] = np.logaddexp(B[k + 1, 1:], lw[k] + B[k + 1, :-1])

    terms = A[:d, : t_excl + 1] + B[1:, t_excl::-1]
    m = terms.max(axis=1)
    safe = m > -np.inf
    res = np.full(d, -np.inf)
    res[safe] = m[safe] + np.log(
        np.exp(terms[safe] - m[safe, None]).sum(axis=1))
    out[:] = res - A[d, t_all]
