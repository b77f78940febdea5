"""Tree-form sequential decision problems in sequence form.

A decision problem is a tree of decision points; each decision point ``j``
owns one sequence per action, and hangs off a parent sequence (another
decision point's (point, action) pair, or the empty root sequence). The
sequence index space is ``{0} ∪ {(j, a)}`` with index 0 reserved for the
empty sequence.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DecisionPoint:
    """One decision point: an id, its action labels, and its parent sequence.

    ``parent`` is a ``(decision_point_id, action_label)`` pair, or ``None``
    when the point hangs directly off the empty sequence.
    """

    id: str
    actions: tuple
    parent: tuple | None = None

    def __post_init__(self):
        if len(self.actions) == 0:
            raise ValueError(f"decision point {self.id!r} has no actions")
        if len(set(self.actions)) != len(self.actions):
            raise ValueError(f"decision point {self.id!r} repeats an action")


class TreeFormDecisionProblem:
    """Immutable sequence-form index structure over a decision tree.

    Builds flat arrays used by the kernel passes:

    - ``first_seq[j]`` / ``n_actions[j]``: the contiguous sequence block of
      decision point ``j`` (sequence 0 is the empty sequence),
    - ``parent_seq[j]``: sequence index of j's parent sequence,
    - ``child_start`` / ``child_dp``: per-sequence lists of child decision
      points (grouped CSR-style),
    - ``bottomup``: decision points ordered children-before-parents.
    """

    def __init__(self, decision_points):
        points = list(decision_points)
        if not points:
            raise ValueError("a decision problem needs at least one decision point")
        self.ids = tuple(p.id for p in points)
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("duplicate decision point ids")
        self._index = {p.id: k for k, p in enumerate(points)}
        self.actions = tuple(tuple(p.actions) for p in points)

        n_dp = len(points)
        first_seq = np.empty(n_dp, dtype=np.intc)
        n_actions = np.empty(n_dp, dtype=np.intc)
        seq_labels = [()]  # index 0: empty sequence
        self._seq_index = {}
        nxt = 1
        for k, p in enumerate(points):
            first_seq[k] = nxt
            n_actions[k] = len(p.actions)
            for a in p.actions:
                self._seq_index[(p.id, a)] = nxt
                seq_labels.append((p.id, a))
                nxt += 1
        self.n_seqs = nxt
        self.seq_labels = tuple(seq_labels)
        self.first_seq = first_seq
        self.n_actions = n_actions

        parent_seq = np.empty(n_dp, dtype=np.intc)
        for k, p in enumerate(points):
            if p.parent is None:
                parent_seq[k] = 0
            else:
                if p.parent not in self._seq_index:
                    raise ValueError(f"decision point {p.id!r} has unknown "
                                     f"parent sequence {p.parent!r}")
                parent_seq[k] = self._seq_index[p.parent]
        self.parent_seq = parent_seq

        # group child decision points under their parent sequence
        kids = [[] for _ in range(self.n_seqs)]
        for k in range(n_dp):
            kids[parent_seq[k]].append(k)
        child_start = np.zeros(self.n_seqs + 1, dtype=np.intc)
        flat = []
        for s in range(self.n_seqs):
            child_start[s] = len(flat)
            flat.extend(kids[s])
        child_start[self.n_seqs] = len(flat)
        self.child_start = child_start
        self.child_dp = np.asarray(flat, dtype=np.intc)

        self._owner = np.zeros(self.n_seqs, dtype=np.intc)
        for k in range(n_dp):
            self._owner[first_seq[k]:first_seq[k] + n_actions[k]] = k

        self.bottomup = self._order_bottom_up()
        self._norm_l1 = None

    @property
    def n_decision_points(self):
        return len(self.ids)

    def index_of(self, decision_point_id):
        return self._index[decision_point_id]

    def seq_index(self, decision_point_id, action):
        """Sequence index of the (decision point, action) pair."""
        return self._seq_index[(decision_point_id, action)]

    def seq_range(self, j):
        """Contiguous sequence index range owned by decision point ``j``."""
        s0 = int(self.first_seq[j])
        return s0, s0 + int(self.n_actions[j])

    def _order_bottom_up(self):
        n_dp = len(self.ids)
        depth = np.full(n_dp, -1, dtype=np.int64)
        for k in range(n_dp):
            if depth[k] >= 0:
                continue
            chain = []
            cur = k
            while cur >= 0 and depth[cur] < 0:
                chain.append(cur)
                ps = self.parent_seq[cur]
                cur = int(self._owner[ps]) if ps != 0 else -1
                if cur in chain:
                    raise ValueError("parent relation contains a cycle at "
                                     f"decision point {self.ids[chain[-1]]!r}")
            base = depth[cur] if cur >= 0 else -1
            for off, node in enumerate(reversed(chain)):
                depth[node] = base + 1 + off
        order = np.argsort(depth, kind="stable")[::-1]
        return np.ascontiguousarray(order.astype(np.intc))

    @property
    def norm_l1(self):
        """Max total mass a strategy puts on nonempty sequences.

        Computed bottom-up: a decision point contributes 1 plus the best
        action's child total; a sequence sums its child decision points.
        """
        if self._norm_l1 is None:
            val = np.zeros(len(self.ids), dtype=np.int64)
            for j in self.bottomup:
                s0, s1 = self.seq_range(j)
                best = 0
                for s in range(s0, s1):
                    c0, c1 = self.child_start[s], self.child_start[s + 1]
                    tot = int(val[self.child_dp[c0:c1]].sum())
                    if tot > best:
                        best = tot
                val[j] = 1 + best
            c0, c1 = self.child_start[0], self.child_start[1]
            self._norm_l1 = int(val[self.child_dp[c0:c1]].sum())
        return self._norm_l1

    @property
    def max_actions(self):
        return int(self.n_actions.max())

    def vertex_count(self):
        """Number of deterministic strategies, as an exact integer."""
        counts = [0] * len(self.ids)
        for j in self.bottomup:
            s0, s1 = self.seq_range(j)
            total = 0
            for s in range(s0, s1):
                prod = 1
                for c in range(self.child_start[s], self.child_start[s + 1]):
                    prod *= counts[self.child_dp[c]]
                total += prod
            counts[j] = total
        prod = 1
        for c in range(self.child_start[0], self.child_start[1]):
            prod *= counts[self.child_dp[c]]
        return prod

    def validate_strategy(self, x, tol=1e-9):
        """Check the sequence-form constraints: root mass 1 and flow balance."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n_seqs,):
            raise ValueError(f"strategy has shape {x.shape}, "
                             f"expected ({self.n_seqs},)")
        if abs(x[0] - 1.0) > tol:
            raise ValueError("strategy mass at the empty sequence is not 1")
        if x.min() < -tol:
            raise ValueError("strategy has negative entries")
        for j in range(len(self.ids)):
            s0, s1 = self.seq_range(j)
            if abs(x[self.parent_seq[j]] - x[s0:s1].sum()) > tol:
                raise ValueError(f"flow constraint violated at decision "
                                 f"point {self.ids[j]!r}")
        return x


def random_tfsdp(rng, max_depth=3, max_actions=3, max_children=2,
                 child_prob=0.5, max_vertices=None, max_tries=200):
    """Sample a random decision problem, optionally capped in vertex count."""
    for _ in range(max_tries):
        points = []
        counter = [0]

        def grow(parent, depth):
            name = f"d{counter[0]}"
            counter[0] += 1
            n_act = int(rng.integers(1, max_actions + 1))
            acts = tuple(f"a{i}" for i in range(n_act))
            points.append(DecisionPoint(name, acts, parent))
            if depth >= max_depth:
                return
            for a in acts:
                for _ in range(int(rng.integers(0, max_children + 1))):
                    if rng.random() < child_prob:
                        grow((name, a), depth + 1)

        for _ in range(int(rng.integers(1, max_children + 1))):
            grow(None, 1)
        tfsdp = TreeFormDecisionProblem(points)
        if max_vertices is None or tfsdp.vertex_count() <= max_vertices:
            return tfsdp
    raise RuntimeError("failed to sample a decision problem under the "
                       "vertex cap")
