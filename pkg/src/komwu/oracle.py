"""Brute-force reference implementations: vertex enumeration, naive kernel
sums, and the explicit update over the simplex of vertices.

Everything here is allowed to be exponential; it exists to cross-check the
efficient kernel paths and the learner, and to derive expected values for
tests.
"""

import itertools
import math
from dataclasses import dataclass
from functools import singledispatch

import numpy as np

from .domains import (DagFlowDomain, HypercubeDomain, NSetDomain,
                      ProductDomain, SequenceFormDomain)
from .learning import as_schedule

DEFAULT_CAP = 100_000


class CapacityError(RuntimeError):
    """Raised when a domain has more vertices than the enumeration cap."""


@dataclass(frozen=True)
class VertexSet:
    """All vertices of a domain as a dense 0/1 matrix (one row per vertex)."""

    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        m = self.matrix
        if m.ndim != 2:
            raise ValueError("vertex matrix must be 2-d")
        if not np.all((m == 0) | (m == 1)):
            raise ValueError("vertex coordinates must be 0/1")
        if len({tuple(row) for row in np.asarray(m, dtype=bool)}) != m.shape[0]:
            raise ValueError("duplicate vertices")

    def __len__(self):
        return self.matrix.shape[0]

    @property
    def dimension(self):
        return self.matrix.shape[1]


@singledispatch
def vertex_count(domain):
    """Exact number of vertices, without enumerating them."""
    raise TypeError(f"unsupported domain type {type(domain).__name__}")


@vertex_count.register
def _(domain: NSetDomain):
    return math.comb(domain.d, domain.n)


@vertex_count.register
def _(domain: HypercubeDomain):
    return 2 ** domain.d


@vertex_count.register
def _(domain: DagFlowDomain):
    counts = [0] * domain.num_nodes
    counts[domain.source] = 1
    for v in domain._topo:
        for e in domain._out[v]:
            counts[domain.edges[e][1]] += counts[v]
    return counts[domain.sink]


@vertex_count.register
def _(domain: ProductDomain):
    return vertex_count(domain.left) * vertex_count(domain.right)


@vertex_count.register
def _(domain: SequenceFormDomain):
    return domain.tfsdp.vertex_count()


def _check_cap(domain, cap):
    n = vertex_count(domain)
    if n > cap:
        raise CapacityError(f"domain has {n} vertices, over the cap of {cap}")
    return n


@singledispatch
def enumerate_vertices(domain, cap=DEFAULT_CAP):
    """All vertices of the domain as a :class:`VertexSet`."""
    raise TypeError(f"unsupported domain type {type(domain).__name__}")


@enumerate_vertices.register
def _(domain: NSetDomain, cap=DEFAULT_CAP):
    n = _check_cap(domain, cap)
    mat = np.zeros((n, domain.d), dtype=bool)
    for r, support in enumerate(itertools.combinations(range(domain.d), domain.n)):
        mat[r, list(support)] = True
    return VertexSet(mat, f"nset(d={domain.d},n={domain.n})")


@enumerate_vertices.register
def _(domain: HypercubeDomain, cap=DEFAULT_CAP):
    n = _check_cap(domain, cap)
    mat = np.zeros((n, domain.d), dtype=bool)
    for r, bits in enumerate(itertools.product((0, 1), repeat=domain.d)):
        mat[r] = bits
    return VertexSet(mat, f"cube(d={domain.d})")


@enumerate_vertices.register
def _(domain: DagFlowDomain, cap=DEFAULT_CAP):
    _check_cap(domain, cap)
    rows = []

    def walk(v, used):
        if v == domain.sink:
            rows.append(tuple(used))
            return
        for e in domain._out[v]:
            walk(domain.edges[e][1], used + [e])

    walk(domain.source, [])
    mat = np.zeros((len(rows), domain.dimension), dtype=bool)
    for r, used in enumerate(rows):
        mat[r, list(used)] = True
    return VertexSet(mat, f"flows({domain.num_nodes} nodes)")


@enumerate_vertices.register
def _(domain: ProductDomain, cap=DEFAULT_CAP):
    _check_cap(domain, cap)
    left = enumerate_vertices(domain.left, cap=cap)
    right = enumerate_vertices(domain.right, cap=cap)
    nl, nr = len(left), len(right)
    mat = np.zeros((nl * nr, domain.dimension), dtype=bool)
    mat[:, :left.dimension] = np.repeat(left.matrix, nr, axis=0)
    mat[:, left.dimension:] = np.tile(right.matrix, (nl, 1))
    return VertexSet(mat, f"product[{left.label} x {right.label}]")


@enumerate_vertices.register
def _(domain: SequenceFormDomain, cap=DEFAULT_CAP):
    _check_cap(domain, cap)
    t = domain.tfsdp
    per_dp = {}
    for j in t.bottomup:
        rows = []
        s0, s1 = t.seq_range(j)
        for s in range(s0, s1):
            kids = [per_dp[int(t.child_dp[c])]
                    for c in range(t.child_start[s], t.child_start[s + 1])]
            for combo in itertools.product(*kids):
                rows.append((s,) + tuple(itertools.chain.from_iterable(combo)))
        per_dp[int(j)] = rows
    roots = [per_dp[int(t.child_dp[c])]
             for c in range(t.child_start[0], t.child_start[1])]
    full = [(0,) + tuple(itertools.chain.from_iterable(combo))
            for combo in itertools.product(*roots)]
    mat = np.zeros((len(full), t.n_seqs), dtype=bool)
    for r, support in enumerate(full):
        mat[r, list(support)] = True
    return VertexSet(mat, f"tree({t.n_seqs} seqs)")


def brute_kernel(vertices, x, y):
    """Literal double sum/product kernel over an explicit vertex set."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (vertices.dimension,) or y.shape != (vertices.dimension,):
        raise ValueError("input dimension does not match the vertex set")
    w = x * y
    prods = np.prod(np.where(vertices.matrix, w, 1.0), axis=1)
    return float(prods.sum())


class VertexOmwu:
    """Explicit optimistic multiplicative-weights update over the vertex set.

    Maintains the full distribution over vertices (in the log domain, with a
    normalization pass per step) and plays its mean vertex. Exponential-size
    by design; used as the ground truth for the kernelized learner.
    """

    def __init__(self, vertices, learning_rate, optimistic=True):
        self.vertices = vertices
        self._V = np.asarray(vertices.matrix, dtype=float)
        self._schedule = as_schedule(learning_rate)
        self.optimistic = bool(optimistic)
        n = len(vertices)
        self._log_lam = np.full(n, -math.log(n))
        self._prev_loss = np.zeros(vertices.dimension)
        self._prev_pred = np.zeros(vertices.dimension)
        self._pending_pred = None
        self._t = 0
        self._awaiting_loss = False

    def distribution(self):
        """Current distribution over vertices."""
        return np.exp(self._log_lam)

    def step(self, prediction=None):
        if self._awaiting_loss:
            raise RuntimeError("step called twice without observing a loss")
        d = self.vertices.dimension
        if prediction is None:
            prediction = np.zeros(d)
        elif not self.optimistic:
            raise ValueError("non-optimistic update takes no prediction")
        prediction = np.asarray(prediction, dtype=float)
        if prediction.shape != (d,) or not np.all(np.isfinite(prediction)):
            raise ValueError("bad prediction vector")
        eta = self._schedule(self._t + 1)
        w = self._prev_loss - self._prev_pred + prediction
        self._log_lam = self._log_lam - eta * (self._V @ w)
        m = self._log_lam.max()
        self._log_lam -= m + math.log(np.exp(self._log_lam - m).sum())
        self._pending_pred = prediction
        self._awaiting_loss = True
        return np.exp(self._log_lam) @ self._V

    def observe_loss(self, loss):
        if not self._awaiting_loss:
            raise RuntimeError("observe_loss called without a pending step")
        loss = np.asarray(loss, dtype=float)
        if loss.shape != (self.vertices.dimension,) or not np.all(np.isfinite(loss)):
            raise ValueError("bad loss vector")
        self._prev_loss = loss.copy()
        self._prev_pred = self._pending_pred
        self._pending_pred = None
        self._t += 1
        self._awaiting_loss = False
