"""0/1-polyhedral kernel domains.

Each domain wraps a polytope whose vertices have 0/1 coordinates and exposes

- ``kernel(x, y)``: the exact linear-domain kernel, the sum over vertices of
  the product of ``x[k] * y[k]`` over the vertex support (used for testing
  against brute-force vertex sums), and
- ``marginals(logb)``: the batched log-domain marginal map taking log-weights
  ``log b`` to the convex combination of vertices with weights proportional
  to the per-vertex products of ``b``. This is the production path consumed
  by the learner and never leaves the log domain.

``marginals_by_kernel_evaluations`` keeps the generic d+1-kernel-call route
as a slow reference implementation.
"""

import math
from abc import ABC, abstractmethod

import numpy as np

from . import _backend
from .tfsdp import TreeFormDecisionProblem


def _check_vector(v, d, name):
    v = np.ascontiguousarray(v, dtype=float)
    if v.shape != (d,):
        raise ValueError(f"{name} has shape {v.shape}, expected ({d},)")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite entries")
    return v


class KernelDomain(ABC):
    """A polytope with 0/1 vertices, seen through its kernel."""

    @property
    @abstractmethod
    def dimension(self):
        """Ambient dimension d."""

    @abstractmethod
    def kernel(self, x, y):
        """Sum over vertices of the product of x[k]*y[k] over the support."""

    @abstractmethod
    def marginals(self, logb):
        """Mixture-of-vertices iterate for weights b given as log b."""


class NSetDomain(KernelDomain):
    """Convex hull of the 0/1 vectors with exactly ``n`` ones."""

    def __init__(self, d, n, backend=None):
        if d < 1:
            raise ValueError("dimension must be positive")
        if not 1 <= n <= d:
            raise ValueError(f"n={n} out of range for dimension {d}")
        self.d = int(d)
        self.n = int(n)
        self._impl = _backend.get_backend(backend) if backend else _backend.DEFAULT

    @property
    def dimension(self):
        return self.d

    def kernel(self, x, y):
        x = _check_vector(x, self.d, "x")
        y = _check_vector(y, self.d, "y")
        w = x * y
        # coefficient of z^n in prod_k (w[k] z + 1)
        coeff = np.zeros(self.n + 1)
        coeff[0] = 1.0
        for k in range(self.d):
            coeff[1:] = coeff[1:] + w[k] * coeff[:-1]
        return float(coeff[self.n])

    def marginals(self, logb):
        logb = _check_vector(logb, self.d, "logb")
        d, n = self.d, self.n
        if n == d:
            return np.ones(d)
        out = np.empty(d)
        if n <= d - n:
            self._impl.nset_excl_log_esym(logb, n, n, out)
            log_ratio = out
        else:
            # complement trick: count the d-n left-out coordinates with
            # weights 1/b, so the tables stay O(d * (d-n))
            m = d - n
            lw = np.ascontiguousarray(-logb)
            self._impl.nset_excl_log_esym(lw, m, m - 1, out)
            log_ratio = lw + out
        return np.clip(1.0 - np.exp(log_ratio), 0.0, 1.0)

    def marginals_with_counts(self, logb):
        """Instrumented pure-Python marginals: returns (x, DP cell updates).

        Counts every prefix/suffix table cell filled and every term combined,
        which is the operation count of the batched evaluation.
        """
        logb = _check_vector(logb, self.d, "logb")
        d, n = self.d, self.n
        if n == d:
            return np.ones(d), 0
        if n <= d - n:
            lw, t_all, t_excl = logb, n, n
        else:
            lw, t_all, t_excl = -logb, d - n, d - n - 1
        width = t_all + 1
        count = 0
        A = np.full((d + 1, width), -np.inf)
        B = np.full((d + 1, width), -np.inf)
        A[:, 0] = 0.0
        B[:, 0] = 0.0
        for k in range(1, d + 1):
            for h in range(1, width):
                A[k, h] = np.logaddexp(A[k - 1, h], lw[k - 1] + A[k - 1, h - 1])
                count += 1
        for k in range(d - 1, -1, -1):
            for h in range(1, width):
                B[k, h] = np.logaddexp(B[k + 1, h], lw[k] + B[k + 1, h - 1])
                count += 1
        log_ratio = np.empty(d)
        norm = A[d, t_all]
        for k in range(d):
            terms = A[k, : t_excl + 1] + B[k + 1, t_excl::-1]
            count += t_excl + 1
            m = terms.max()
            log_ratio[k] = (m + math.log(np.exp(terms - m).sum()) - norm
                            if m > -np.inf else -np.inf)
        if n > d - n:
            log_ratio = lw + log_ratio
        return np.clip(1.0 - np.exp(log_ratio), 0.0, 1.0), count


class HypercubeDomain(KernelDomain):
    """The unit hypercube; vertices are all 0/1 vectors."""

    def __init__(self, d):
        if d < 1:
            raise ValueError("dimension must be positive")
        self.d = int(d)

    @property
    def dimension(self):
        return self.d

    def kernel(self, x, y):
        x = _check_vector(x, self.d, "x")
        y = _check_vector(y, self.d, "y")
        return float(np.prod(x * y + 1.0))

    def marginals(self, logb):
        logb = _check_vector(logb, self.d, "logb")
        # coordinate k has marginal b/(b+1), a stable sigmoid of log b
        out = np.empty(self.d)
        pos = logb >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-logb[pos]))
        e = np.exp(logb[~pos])
        out[~pos] = e / (1.0 + e)
        return out


class DagFlowDomain(KernelDomain):
    """Unit flows on a DAG; vertices are indicator vectors of source->sink paths."""

    def __init__(self, num_nodes, edges, source=0, sink=None):
        if sink is None:
            sink = num_nodes - 1
        self.num_nodes = int(num_nodes)
        self.source = int(source)
        self.sink = int(sink)
        self.edges = [(int(t), int(h)) for t, h in edges]
        if not self.edges:
            raise ValueError("flow domain needs at least one edge")
        for t, h in self.edges:
            if not (0 <= t < num_nodes and 0 <= h < num_nodes):
                raise ValueError(f"edge ({t},{h}) references an unknown node")
        self._topo = self._toposort()
        self._check_edges_on_paths()
        # edge ids grouped by tail/head for the forward/backward sweeps
        self._out = [[] for _ in range(num_nodes)]
        self._in = [[] for _ in range(num_nodes)]
        for e, (t, h) in enumerate(self.edges):
            self._out[t].append(e)
            self._in[h].append(e)

    @property
    def dimension(self):
        return len(self.edges)

    def _toposort(self):
        indeg = [0] * self.num_nodes
        succ = [[] for _ in range(self.num_nodes)]
        for t, h in self.edges:
            indeg[h] += 1
            succ[t].append(h)
        ready = [v for v in range(self.num_nodes) if indeg[v] == 0]
        order = []
        while ready:
            v = ready.pop()
            order.append(v)
            for w in succ[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    ready.append(w)
        if len(order) != self.num_nodes:
            raise ValueError("graph has a cycle")
        return order

    def _check_edges_on_paths(self):
        fwd = self._reachable(self.source, forward=True)
        bwd = self._reachable(self.sink, forward=False)
        if self.sink not in fwd:
            raise ValueError("no path from source to sink")
        for e, (t, h) in enumerate(self.edges):
            if t not in fwd or h not in bwd:
                raise ValueError(f"edge {e} ({t}->{h}) lies on no "
                                 "source->sink path")

    def _reachable(self, start, forward):
        adj = [[] for _ in range(self.num_nodes)]
        for t, h in self.edges:
            if forward:
                adj[t].append(h)
            else:
                adj[h].append(t)
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    def kernel(self, x, y):
        x = _check_vector(x, self.dimension, "x")
        y = _check_vector(y, self.dimension, "y")
        w = x * y
        f = np.zeros(self.num_nodes)
        f[self.source] = 1.0
        for v in self._topo:
            for e in self._out[v]:
                f[self.edges[e][1]] += f[v] * w[e]
        return float(f[self.sink])

    def marginals(self, logb):
        logb = _check_vector(logb, self.dimension, "logb")
        fwd = np.full(self.num_nodes, -np.inf)
        bwd = np.full(self.num_nodes, -np.inf)
        fwd[self.source] = 0.0
        for v in self._topo:
            for e in self._out[v]:
                h = self.edges[e][1]
                fwd[h] = np.logaddexp(fwd[h], fwd[v] + logb[e])
        bwd[self.sink] = 0.0
        for v in reversed(self._topo):
            for e in self._out[v]:
                h = self.edges[e][1]
                bwd[v] = np.logaddexp(bwd[v], logb[e] + bwd[h])
        total = fwd[self.sink]
        x = np.empty(self.dimension)
        for e, (t, h) in enumerate(self.edges):
            x[e] = math.exp(fwd[t] + logb[e] + bwd[h] - total)
        return np.clip(x, 0.0, 1.0)


class ProductDomain(KernelDomain):
    """Cartesian product of two kernel domains; the kernel factorizes."""

    def __init__(self, left, right):
        self.left = left
        self.right = right

    @property
    def dimension(self):
        return self.left.dimension + self.right.dimension

    def _split(self, v):
        dl = self.left.dimension
        return v[:dl], v[dl:]

    def kernel(self, x, y):
        x = _check_vector(x, self.dimension, "x")
        y = _check_vector(y, self.dimension, "y")
        xl, xr = self._split(x)
        yl, yr = self._split(y)
        return self.left.kernel(xl, yl) * self.right.kernel(xr, yr)

    def marginals(self, logb):
        logb = _check_vector(logb, self.dimension, "logb")
        ll, lr = self._split(logb)
        return np.concatenate([self.left.marginals(ll),
                               self.right.marginals(lr)])


class SequenceFormDomain(KernelDomain):
    """Sequence-form strategy polytope of a tree-form decision problem.

    The kernel and marginals run in O(number of sequences) via a bottom-up
    partial-kernel pass and a top-down ratio propagation.
    """

    def __init__(self, tfsdp, backend=None):
        if not isinstance(tfsdp, TreeFormDecisionProblem):
            raise TypeError("expected a TreeFormDecisionProblem")
        self.tfsdp = tfsdp
        self._impl = _backend.get_backend(backend) if backend else _backend.DEFAULT

    @property
    def dimension(self):
        return self.tfsdp.n_seqs

    def kernel(self, x, y):
        """Linear-domain kernel for arbitrary x, y (testing path)."""
        t = self.tfsdp
        x = _check_vector(x, t.n_seqs, "x")
        y = _check_vector(y, t.n_seqs, "y")
        w = x * y
        vals = np.empty(t.n_decision_points)
        for j in t.bottomup:
            s0, s1 = t.seq_range(j)
            total = 0.0
            for s in range(s0, s1):
                prod = w[s]
                for c in range(t.child_start[s], t.child_start[s + 1]):
                    prod *= vals[t.child_dp[c]]
                total += prod
            vals[j] = total
        root = w[0]
        for c in range(t.child_start[0], t.child_start[1]):
            root *= vals[t.child_dp[c]]
        return float(root)

    def log_partials(self, logb):
        """Per-decision-point log partial kernels against the all-ones vector.

        Returns ``(logk, csum)`` where ``logk[j] = log K_j(b, 1)`` and
        ``csum[s]`` is the summed child log kernel below sequence ``s``.
        """
        t = self.tfsdp
        logb = _check_vector(logb, t.n_seqs, "logb")
        logb = np.ascontiguousarray(logb)
        logk = np.empty(t.n_decision_points)
        csum = np.empty(t.n_seqs)
        self._impl.tree_log_partials(logb, t.first_seq, t.n_actions,
                                     t.bottomup, t.child_start, t.child_dp,
                                     logk, csum)
        return logk, csum

    def log_kernel_ones(self, logb):
        """log K(b, 1) including the empty-sequence weight."""
        logk, csum = self.log_partials(logb)
        return float(logb[0] + csum[0])

    def marginals(self, logb):
        t = self.tfsdp
        logb = _check_vector(logb, t.n_seqs, "logb")
        logb = np.ascontiguousarray(logb)
        logk = np.empty(t.n_decision_points)
        csum = np.empty(t.n_seqs)
        self._impl.tree_log_partials(logb, t.first_seq, t.n_actions,
                                     t.bottomup, t.child_start, t.child_dp,
                                     logk, csum)
        x = np.empty(t.n_seqs)
        self._impl.tree_marginals(logb, t.first_seq, t.n_actions, t.bottomup,
                                  t.parent_seq, logk, csum, x)
        return x


def marginals_by_kernel_evaluations(domain, b):
    """Generic d+1-kernel-evaluation marginals; slow reference path.

    Evaluates ``1 - K(b, e_bar_k) / K(b, 1)`` coordinate by coordinate in the
    linear domain, where ``e_bar_k`` is all-ones with a zero at ``k``.
    """
    d = domain.dimension
    b = _check_vector(b, d, "b")
    ones = np.ones(d)
    denom = domain.kernel(b, ones)
    x = np.empty(d)
    for k in range(d):
        masked = ones.copy()
        masked[k] = 0.0
        x[k] = 1.0 - domain.kernel(b, masked) / denom
    return x
