"""Multiplayer extensive-form game model and sequence-form operations.

The game tree is a tagged union of chance, decision, and terminal nodes.
Strategies are exchanged in sequence form (one weight per (decision point,
action) pair of the owning player, plus the empty sequence); gradients,
best responses, and exploitability all run off a flattened terminal table
with chance probabilities folded into per-terminal coefficients.
"""

import json
from dataclasses import dataclass

import numpy as np

from .tfsdp import DecisionPoint, TreeFormDecisionProblem


@dataclass(frozen=True, slots=True)
class Chance:
    outcomes: tuple  # of (probability, child) pairs


@dataclass(frozen=True, slots=True)
class Decision:
    player: int
    infoset: str
    actions: tuple  # of (label, child) pairs


@dataclass(frozen=True, slots=True)
class Terminal:
    payoffs: tuple  # one float per player


class GameTree:
    """A validated extensive-form game: player count plus a root node.

    Validation checks chance normalization, payoff arity, tree-ness (no
    shared subtrees), and perfect recall: all nodes of an information set
    must agree on the acting player, the action labels, and the owning
    player's past (infoset, action) history.
    """

    def __init__(self, players, root, validate=True):
        if players < 1:
            raise ValueError("need at least one player")
        self.players = int(players)
        self.root = root
        if validate:
            self._validate()

    def _validate(self):
        seen_nodes = set()
        infosets = {}
        stack = [(self.root, tuple(() for _ in range(self.players)))]
        while stack:
            node, own_hist = stack.pop()
            if id(node) in seen_nodes:
                raise ValueError("tree nodes may not be shared")
            seen_nodes.add(id(node))
            if isinstance(node, Terminal):
                if len(node.payoffs) != self.players:
                    raise ValueError(f"terminal has {len(node.payoffs)} "
                                     f"payoffs for {self.players} players")
            elif isinstance(node, Chance):
                if not node.outcomes:
                    raise ValueError("chance node with no outcomes")
                total = sum(p for p, _ in node.outcomes)
                if abs(total - 1.0) > 1e-9 or any(p < 0 for p, _ in node.outcomes):
                    raise ValueError("chance probabilities must be "
                                     "nonnegative and sum to 1")
                for _, child in node.outcomes:
                    stack.append((child, own_hist))
            elif isinstance(node, Decision):
                if not 0 <= node.player < self.players:
                    raise ValueError(f"bad player id {node.player}")
                labels = tuple(a for a, _ in node.actions)
                if len(set(labels)) != len(labels) or not labels:
                    raise ValueError(f"bad action labels at {node.infoset!r}")
                sig = (node.player, labels, own_hist[node.player])
                prev = infosets.setdefault(node.infoset, sig)
                if prev != sig:
                    raise ValueError("perfect recall violated at infoset "
                                     f"{node.infoset!r}")
                for label, child in node.actions:
                    hist = list(own_hist)
                    hist[node.player] = own_hist[node.player] + ((node.infoset, label),)
                    stack.append((child, tuple(hist)))
            else:
                raise TypeError(f"unknown node type {type(node).__name__}")

    def walk_terminals(self):
        """Yield (chance_prob, per-player last (infoset, action), payoffs)."""
        stack = [(self.root, 1.0, [None] * self.players)]
        while stack:
            node, prob, last = stack.pop()
            if isinstance(node, Terminal):
                yield prob, tuple(last), node.payoffs
            elif isinstance(node, Chance):
                for p, child in node.outcomes:
                    stack.append((child, prob * p, last))
            else:
                for label, child in node.actions:
                    nxt = list(last)
                    nxt[node.player] = (node.infoset, label)
                    stack.append((child, prob, nxt))

    def is_zero_sum(self, tol=1e-9):
        stack = [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, Terminal):
                if abs(sum(node.payoffs)) > tol:
                    return False
            elif isinstance(node, Chance):
                stack.extend(child for _, child in node.outcomes)
            else:
                stack.extend(child for _, child in node.actions)
        return True

    def payoff_range(self):
        """Spread between the largest and smallest terminal payoff entries."""
        lo, hi = np.inf, -np.inf
        stack = [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, Terminal):
                lo = min(lo, min(node.payoffs))
                hi = max(hi, max(node.payoffs))
            elif isinstance(node, Chance):
                stack.extend(child for _, child in node.outcomes)
            else:
                stack.extend(child for _, child in node.actions)
        return hi - lo


def normalize_payoffs(game):
    """Affinely rescale all payoffs into [0, 1] (shared shift and scale)."""
    lo, hi = np.inf, -np.inf
    stack = [game.root]
    while stack:
        node = stack.pop()
        if isinstance(node, Terminal):
            lo = min(lo, min(node.payoffs))
            hi = max(hi, max(node.payoffs))
        elif isinstance(node, Chance):
            stack.extend(child for _, child in node.outcomes)
        else:
            stack.extend(child for _, child in node.actions)
    span = hi - lo if hi > lo else 1.0

    def rebuild(node):
        if isinstance(node, Terminal):
            return Terminal(tuple((u - lo) / span for u in node.payoffs))
        if isinstance(node, Chance):
            return Chance(tuple((p, rebuild(c)) for p, c in node.outcomes))
        return Decision(node.player, node.infoset,
                        tuple((a, rebuild(c)) for a, c in node.actions))

    return GameTree(game.players, rebuild(game.root), validate=False)


def derive_tfsdp(game, player):
    """Extract the player's tree-form decision problem from the game tree."""
    if not 0 <= player < game.players:
        raise ValueError(f"bad player id {player}")
    points = {}
    order = []
    stack = [(game.root, None)]
    while stack:
        node, cur_seq = stack.pop()
        if isinstance(node, Terminal):
            continue
        if isinstance(node, Chance):
            for _, child in node.outcomes:
                stack.append((child, cur_seq))
            continue
        if node.player != player:
            for _, child in node.actions:
                stack.append((child, cur_seq))
            continue
        labels = tuple(a for a, _ in node.actions)
        key = node.infoset
        if key not in points:
            points[key] = (labels, cur_seq)
            order.append(key)
        elif points[key] != (labels, cur_seq):
            raise ValueError(f"infoset {key!r} is inconsistent across the tree")
        for label, child in node.actions:
            stack.append((child, (key, label)))
    order.sort()
    dps = [DecisionPoint(k, points[k][0], points[k][1]) for k in order]
    if not dps:
        # player never acts: a single dummy point keeps the polytope valid
        dps = [DecisionPoint("noop", ("noop",), None)]
    return TreeFormDecisionProblem(dps)


class SequenceFormGame:
    """A game plus the per-player sequence-form machinery.

    Precomputes one row per terminal: the chance coefficient, each player's
    last sequence index, and the payoff vector. Gradients and expected
    utilities are then plain gathers and reductions.
    """

    def __init__(self, game):
        self.game = game
        self.tfsdps = [derive_tfsdp(game, i) for i in range(game.players)]
        chance, payoffs, seqs = [], [], []
        for prob, last, pay in game.walk_terminals():
            chance.append(prob)
            payoffs.append(pay)
            row = []
            for i in range(game.players):
                row.append(0 if last[i] is None
                           else self.tfsdps[i].seq_index(*last[i]))
            seqs.append(row)
        self.chance = np.asarray(chance)
        self.payoffs = np.asarray(payoffs)
        self.seqs = np.asarray(seqs, dtype=np.int64).T.copy()  # (players, nz)

    @property
    def players(self):
        return self.game.players

    def _check_profile(self, xs):
        if len(xs) != self.players:
            raise ValueError(f"profile has {len(xs)} strategies for "
                             f"{self.players} players")
        return [self.tfsdps[i].validate_strategy(xs[i])
                for i in range(self.players)]

    def expected_utilities(self, xs):
        """Per-player expected payoffs under a sequence-form profile."""
        xs = self._check_profile(xs)
        w = self.chance.copy()
        for i in range(self.players):
            w *= xs[i][self.seqs[i]]
        return w @ self.payoffs

    def loss_gradient(self, player, xs, validate=True):
        """Negative utility gradient of ``player`` w.r.t. its own strategy."""
        xs = self._check_profile(xs) if validate else xs
        w = self.chance * self.payoffs[:, player]
        for i in range(self.players):
            if i != player:
                w = w * xs[i][self.seqs[i]]
        grad = np.zeros(self.tfsdps[player].n_seqs)
        np.add.at(grad, self.seqs[player], -w)
        return grad

    def loss_gradients(self, xs):
        """All players' loss gradients under one simultaneous profile."""
        xs = self._check_profile(xs)
        return [self.loss_gradient(i, xs, validate=False)
                for i in range(self.players)]

    def exploitability(self, xs):
        """Sum of both players' best-response gains (two-player zero-sum)."""
        if self.players != 2:
            raise ValueError("exploitability is defined for 2-player games")
        if not self.game.is_zero_sum():
            raise ValueError("exploitability requires a zero-sum game")
        xs = self._check_profile(xs)
        total = 0.0
        for i in range(2):
            loss = self.loss_gradient(i, xs, validate=False)
            # max utility of a deviation = -min discounted loss
            total += -best_response_value(self.tfsdps[i], loss)
        return total


def best_response_value(tfsdp, loss):
    """Minimum of <loss, v> over deterministic sequence-form strategies.

    Bottom-up: each decision point keeps its cheapest action (the sequence
    loss plus the child totals); the root sums the subtree minima and the
    empty-sequence coordinate.
    """
    loss = np.asarray(loss, dtype=float)
    if loss.shape != (tfsdp.n_seqs,):
        raise ValueError(f"loss has shape {loss.shape}, expected "
                         f"({tfsdp.n_seqs},)")
    if not np.all(np.isfinite(loss)):
        raise ValueError("loss contains non-finite entries")
    vals = np.empty(tfsdp.n_decision_points)
    for j in tfsdp.bottomup:
        s0, s1 = tfsdp.seq_range(j)
        best = np.inf
        for s in range(s0, s1):
            tot = loss[s]
            for c in range(tfsdp.child_start[s], tfsdp.child_start[s + 1]):
                tot += vals[tfsdp.child_dp[c]]
            if tot < best:
                best = tot
        vals[j] = best
    root = loss[0]
    for c in range(tfsdp.child_start[0], tfsdp.child_start[1]):
        root += vals[tfsdp.child_dp[c]]
    return float(root)


def best_response_vertex(tfsdp, loss):
    """A deterministic strategy attaining :func:`best_response_value`."""
    loss = np.asarray(loss, dtype=float)
    vals = np.empty(tfsdp.n_decision_points)
    pick = np.zeros(tfsdp.n_decision_points, dtype=np.int64)
    for j in tfsdp.bottomup:
        s0, s1 = tfsdp.seq_range(j)
        best = np.inf
        for s in range(s0, s1):
            tot = loss[s]
            for c in range(tfsdp.child_start[s], tfsdp.child_start[s + 1]):
                tot += vals[tfsdp.child_dp[c]]
            if tot < best:
                best, pick[j] = tot, s
        vals[j] = best
    x = np.zeros(tfsdp.n_seqs)
    x[0] = 1.0
    for j in tfsdp.bottomup[::-1]:
        if x[tfsdp.parent_seq[j]] > 0:
            x[pick[j]] = 1.0
    return x


def uniform_strategy(tfsdp):
    """Sequence-form strategy playing uniformly at every decision point."""
    x = np.zeros(tfsdp.n_seqs)
    x[0] = 1.0
    for j in tfsdp.bottomup[::-1]:
        s0, s1 = tfsdp.seq_range(j)
        x[s0:s1] = x[tfsdp.parent_seq[j]] / (s1 - s0)
    return x


def random_strategy(tfsdp, rng):
    """Random behavioral strategy pushed into sequence form."""
    x = np.zeros(tfsdp.n_seqs)
    x[0] = 1.0
    for j in tfsdp.bottomup[::-1]:
        s0, s1 = tfsdp.seq_range(j)
        beh = rng.random(s1 - s0) + 1e-3
        beh /= beh.sum()
        x[s0:s1] = x[tfsdp.parent_seq[j]] * beh
    return x


# ---------------------------------------------------------------------------
# JSON serialization of game trees

def _node_to_json(node):
    if isinstance(node, Terminal):
        return {"kind": "terminal", "payoffs": list(node.payoffs)}
    if isinstance(node, Chance):
        return {"kind": "chance",
                "outcomes": [{"prob": p, "child": _node_to_json(c)}
                             for p, c in node.outcomes]}
    return {"kind": "decision", "player": node.player, "infoset": node.infoset,
            "actions": [{"label": a, "child": _node_to_json(c)}
                        for a, c in node.actions]}


def _node_from_json(obj):
    kind = obj.get("kind")
    if kind == "terminal":
        return Terminal(tuple(float(u) for u in obj["payoffs"]))
    if kind == "chance":
        return Chance(tuple((float(o["prob"]), _node_from_json(o["child"]))
                            for o in obj["outcomes"]))
    if kind == "decision":
        return Decision(int(obj["player"]), str(obj["infoset"]),
                        tuple((str(a["label"]), _node_from_json(a["child"]))
                              for a in obj["actions"]))
    raise ValueError(f"unknown node kind {kind!r}")


def dump_game(game, path):
    """Write a game tree to a JSON document."""
    doc = {"players": game.players, "root": _node_to_json(game.root)}
    with open(path, "w") as fh:
        json.dump(doc, fh)


def dumps_game(game):
    return json.dumps({"players": game.players,
                       "root": _node_to_json(game.root)})


def load_game(path):
    """Read and validate a game tree from a JSON document."""
    with open(path) as fh:
        doc = json.load(fh)
    return GameTree(int(doc["players"]), _node_from_json(doc["root"]))
