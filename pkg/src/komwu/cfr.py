"""Counterfactual regret minimization baselines over tree-form problems.

One local regret minimizer per decision point (regret matching, regret
matching plus, or a multiplicative-weights update), composed by the usual
bottom-up counterfactual values / top-down behavioral product. Losses arrive
as sequence-form gradients, so chance and the opponents' reach probabilities
are already folded in.
"""

import numpy as np

VARIANTS = ("rm", "rm+", "mwu")


def regret_matching(regrets):
    """Distribution proportional to the positive part; uniform if none."""
    r = np.asarray(regrets, dtype=float)
    pos = np.maximum(r, 0.0)
    total = pos.sum()
    if total > 0:
        return pos / total
    return np.full(r.size, 1.0 / r.size)


class CfrState:
    """Per-player CFR state: local regrets and the current behavioral plan."""

    def __init__(self, tfsdp, variant="rm", eta=None):
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}; expected one of "
                             f"{VARIANTS}")
        if variant == "mwu":
            if eta is None or not eta > 0:
                raise ValueError("the mwu variant needs a positive eta")
        self.tfsdp = tfsdp
        self.variant = variant
        self.eta = eta
        # flat arrays over nonempty sequences; sliced per decision point
        self.regrets = np.zeros(tfsdp.n_seqs)
        self.behavior = np.zeros(tfsdp.n_seqs)
        for j in range(tfsdp.n_decision_points):
            s0, s1 = tfsdp.seq_range(j)
            self.behavior[s0:s1] = 1.0 / (s1 - s0)
        self.strategy_sum = np.zeros(tfsdp.n_seqs)
        self.iterations = 0

    def strategy(self):
        """Current sequence-form strategy (top-down behavioral product)."""
        t = self.tfsdp
        x = np.zeros(t.n_seqs)
        x[0] = 1.0
        for j in t.bottomup[::-1]:
            s0, s1 = t.seq_range(j)
            x[s0:s1] = x[t.parent_seq[j]] * self.behavior[s0:s1]
        return x

    def average_strategy(self):
        """Linear average of the sequence-form strategies played so far."""
        if self.iterations == 0:
            return self.strategy()
        return self.strategy_sum / self.iterations

    def observe_loss(self, loss):
        """Update all local minimizers with one sequence-form loss vector."""
        t = self.tfsdp
        loss = np.asarray(loss, dtype=float)
        if loss.shape != (t.n_seqs,):
            raise ValueError(f"loss has shape {loss.shape}, expected "
                             f"({t.n_seqs},)")
        self.strategy_sum += self.strategy()
        # bottom-up counterfactual action losses q and point values v
        q = loss.copy()
        values = np.empty(t.n_decision_points)
        for j in t.bottomup:
            s0, s1 = t.seq_range(j)
            for s in range(s0, s1):
                for c in range(t.child_start[s], t.child_start[s + 1]):
                    q[s] += values[t.child_dp[c]]
            values[j] = self.behavior[s0:s1] @ q[s0:s1]
        # local updates and refreshed behavior
        for j in range(t.n_decision_points):
            s0, s1 = t.seq_range(j)
            if self.variant == "mwu":
                self.regrets[s0:s1] -= self.eta * q[s0:s1]
                z = self.regrets[s0:s1]
                z = z - z.max()
                e = np.exp(z)
                self.behavior[s0:s1] = e / e.sum()
            else:
                delta = values[j] - q[s0:s1]
                if self.variant == "rm+":
                    self.regrets[s0:s1] = np.maximum(
                        self.regrets[s0:s1] + delta, 0.0)
                else:
                    self.regrets[s0:s1] += delta
                self.behavior[s0:s1] = regret_matching(self.regrets[s0:s1])
        self.iterations += 1


def cfr_iteration(state, loss):
    """One simultaneous CFR update; returns the refreshed strategy."""
    state.observe_loss(loss)
    return state.strategy()
