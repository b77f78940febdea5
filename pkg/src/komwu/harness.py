"""Simultaneous self-play driver with regret and convergence accounting.

Every iteration, all players produce their iterate from the same shared
history (simultaneous updates), the losses are the negative utility
gradients at the joint profile, and optimistic learners predict the previous
loss. Cumulative regrets are tracked incrementally (running played-loss sums
plus a best-response pass at record strides).
"""

import os
import time
from dataclasses import dataclass, field

import numpy as np

from .cfr import CfrState
from .domains import SequenceFormDomain
from .games import SequenceFormGame, best_response_value
from .learning import KomwuLearner

ALGORITHMS = ("komwu", "kmwu", "cfr-rm", "cfr-rm+", "cfr-mwu")

CSV_HEADER = "t,player,regret,max_regret,expl_last,expl_avg,iter_ms"

SEED_ENV_VAR = "KOMWU_SEED"


@dataclass
class RunConfig:
    """Configuration of one self-play run."""

    algos: list
    iters: int
    eta: float | None = None
    schedule: str = "constant"
    seed: int = 0
    stride: int = 10
    out: str | None = None
    keep_history: bool = False

    def resolved_seed(self):
        env = os.environ.get(SEED_ENV_VAR)
        return int(env) if env is not None else self.seed

    def validate(self, n_players):
        if self.iters < 1:
            raise ValueError("iters must be at least 1")
        if self.stride < 1:
            raise ValueError("stride must be at least 1")
        if len(self.algos) == 1:
            self.algos = list(self.algos) * n_players
        if len(self.algos) != n_players:
            raise ValueError(f"{len(self.algos)} algorithms for "
                             f"{n_players} players")
        for a in self.algos:
            if a not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {a!r}; expected one of "
                                 f"{ALGORITHMS}")
        needs_eta = {"komwu", "kmwu", "cfr-mwu"}
        if needs_eta.intersection(self.algos):
            if self.eta is None or not self.eta > 0:
                raise ValueError("this algorithm selection needs --eta > 0")
        if self.schedule not in ("constant", "inv-sqrt"):
            raise ValueError(f"unknown schedule {self.schedule!r}")


@dataclass
class RunRecord:
    """Recorded time series of one run (one entry per record stride)."""

    ts: np.ndarray
    regrets: np.ndarray          # (n_records, players)
    max_regret: np.ndarray
    expl_last: np.ndarray        # NaN when not two-player zero-sum
    expl_avg: np.ndarray
    iter_ms: np.ndarray
    final_profile: list
    average_profile: list
    loss_history: list = field(default_factory=list)
    iterate_history: list = field(default_factory=list)

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write(CSV_HEADER + "\n")
            for r in range(len(self.ts)):
                t = self.ts[r]
                mx = self.max_regret[r]
                el = self.expl_last[r]
                ea = self.expl_avg[r]
                ms = self.iter_ms[r]
                for i in range(self.regrets.shape[1]):
                    fh.write(f"{t},{i},{self.regrets[r, i]:.12g},{mx:.12g},"
                             f"{el:.12g},{ea:.12g},{ms:.6g}\n")
                fh.write(f"{t},all,{mx:.12g},{mx:.12g},{el:.12g},{ea:.12g},"
                         f"{ms:.6g}\n")


class _KomwuAgent:
    """Kernelized learner plus the previous-loss prediction wiring."""

    def __init__(self, tfsdp, learning_rate, optimistic):
        self.learner = KomwuLearner(SequenceFormDomain(tfsdp), learning_rate,
                                    optimistic=optimistic)
        self.optimistic = optimistic
        self._last_loss = None

    def propose(self):
        if self.optimistic and self._last_loss is not None:
            return self.learner.step(self._last_loss)
        return self.learner.step()

    def observe(self, loss):
        self.learner.observe_loss(loss)
        self._last_loss = loss


class _CfrAgent:
    def __init__(self, tfsdp, variant, eta=None):
        self.state = CfrState(tfsdp, variant=variant, eta=eta)

    def propose(self):
        return self.state.strategy()

    def observe(self, loss):
        self.state.observe_loss(loss)


def make_agent(name, tfsdp, eta=None, schedule="constant"):
    if name not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {name!r}")
    if name in ("komwu", "kmwu"):
        rate = eta if schedule == "constant" else (
            lambda t, e=eta: e / np.sqrt(t))
        return _KomwuAgent(tfsdp, rate, optimistic=(name == "komwu"))
    variant = {"cfr-rm": "rm", "cfr-rm+": "rm+", "cfr-mwu": "mwu"}[name]
    return _CfrAgent(tfsdp, variant, eta=eta)


class RegretTracker:
    """Incremental cumulative regret: played-loss sum minus the best fixed
    deterministic strategy in hindsight (best-response pass on demand)."""

    def __init__(self, tfsdp):
        self.tfsdp = tfsdp
        self.loss_sum = np.zeros(tfsdp.n_seqs)
        self.played = 0.0

    def update(self, loss, iterate):
        self.loss_sum += loss
        self.played += float(loss @ iterate)

    def value(self):
        return self.played - best_response_value(self.tfsdp, self.loss_sum)


def cumulative_regret(tfsdp, losses, iterates):
    """Regret of a played sequence against the best fixed strategy."""
    if len(losses) != len(iterates):
        raise ValueError("need one iterate per loss")
    tracker = RegretTracker(tfsdp)
    for loss, x in zip(losses, iterates):
        tracker.update(np.asarray(loss, dtype=float),
                       np.asarray(x, dtype=float))
    return tracker.value()


def run_cols(game, config):
    """Self-play under simultaneous updates with previous-loss predictions."""
    sfg = game if isinstance(game, SequenceFormGame) else SequenceFormGame(game)
    m = sfg.players
    config.validate(m)
    agents = [make_agent(config.algos[i], sfg.tfsdps[i], eta=config.eta,
                         schedule=config.schedule) for i in range(m)]
    trackers = [RegretTracker(sfg.tfsdps[i]) for i in range(m)]
    two_p_zero_sum = (m == 2 and sfg.game.is_zero_sum())

    avg = [np.zeros(sfg.tfsdps[i].n_seqs) for i in range(m)]
    rec = {k: [] for k in ("ts", "regrets", "max_regret", "expl_last",
                           "expl_avg", "iter_ms")}
    loss_hist, x_hist = [], []
    stride_time = 0.0
    stride_count = 0
    for t in range(1, config.iters + 1):
        tic = time.perf_counter()
        xs = [agent.propose() for agent in agents]
        losses = sfg.loss_gradients(xs)
        for agent, loss in zip(agents, losses):
            agent.observe(loss)
        stride_time += time.perf_counter() - tic
        stride_count += 1
        for i in range(m):
            trackers[i].update(losses[i], xs[i])
            avg[i] += xs[i]
        if config.keep_history:
            loss_hist.append([l.copy() for l in losses])
            x_hist.append([x.copy() for x in xs])
        if t % config.stride == 0 or t == config.iters:
            regs = [trackers[i].value() for i in range(m)]
            avg_profile = [a / t for a in avg]
            rec["ts"].append(t)
            rec["regrets"].append(regs)
            rec["max_regret"].append(max(regs))
            if two_p_zero_sum:
                rec["expl_last"].append(sfg.exploitability(xs))
                rec["expl_avg"].append(sfg.exploitability(avg_profile))
            else:
                rec["expl_last"].append(np.nan)
                rec["expl_avg"].append(np.nan)
            rec["iter_ms"].append(1e3 * stride_time / stride_count)
            stride_time = 0.0
            stride_count = 0
    record = RunRecord(
        ts=np.asarray(rec["ts"]),
        regrets=np.asarray(rec["regrets"]),
        max_regret=np.asarray(rec["max_regret"]),
        expl_last=np.asarray(rec["expl_last"]),
        expl_avg=np.asarray(rec["expl_avg"]),
        iter_ms=np.asarray(rec["iter_ms"]),
        final_profile=xs,
        average_profile=[a / config.iters for a in avg],
        loss_history=loss_hist,
        iterate_history=x_hist,
    )
    if config.out:
        record.to_csv(config.out)
    return record


def cce_gap(game, iterate_history, cap=100_000):
    """Best unconditional-deviation advantage against the average play.

    ``iterate_history`` holds the per-iteration profiles; the average joint
    play is the mean of the per-iteration product distributions, so expected
    utilities reduce to averages over iterations. Deviations range over each
    player's enumerated vertex set.
    """
    from .oracle import enumerate_vertices

    sfg = game if isinstance(game, SequenceFormGame) else SequenceFormGame(game)
    if not iterate_history:
        raise ValueError("empty iterate history")
    m = sfg.players
    horizon = len(iterate_history)
    gap = -np.inf
    for i in range(m):
        verts = enumerate_vertices(SequenceFormDomain(sfg.tfsdps[i]),
                                   cap=cap).matrix.astype(float)
        dev_total = np.zeros(verts.shape[0])
        base_total = 0.0
        for xs in iterate_history:
            loss = sfg.loss_gradient(i, xs, validate=False)
            dev_total += verts @ (-loss)
            base_total += float(-loss @ xs[i])
        gap = max(gap, float((dev_total.max() - base_total) / horizon))
    return gap


def bench_learner(tfsdp, iters=2000, repeats=3, eta=0.5, backend=None,
                  seed=0):
    """Mean seconds per learner iteration (update only, synthetic losses)."""
    rng = np.random.default_rng(seed)
    domain = SequenceFormDomain(tfsdp, backend=backend)
    losses = rng.random((iters, tfsdp.n_seqs))
    best = np.inf
    for _ in range(repeats):
        learner = KomwuLearner(domain, eta, optimistic=True)
        prev = np.zeros(tfsdp.n_seqs)
        tic = time.perf_counter()
        for t in range(iters):
            learner.step(prev)
            prev = losses[t]
            learner.observe_loss(prev)
        best = min(best, (time.perf_counter() - tic) / iters)
    return best


def vertex_mean_profile(sfg):
    """Per-player uniform mixture over deterministic strategies.

    This is the kernelized learner's opening iterate (unit weights); note it
    differs from the behaviorally-uniform strategy that CFR opens with.
    """
    return [SequenceFormDomain(tf).marginals(np.zeros(tf.n_seqs))
            for tf in sfg.tfsdps]
