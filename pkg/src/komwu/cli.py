"""Command line interface.

Subcommands:

- ``run``   self-play on a game, writing the regret/exploitability CSV
- ``gen``   emit a generated game as a JSON document
- ``check`` equivalence self-test of the kernelized learner against the
            explicit vertex-simplex update on a named small domain
- ``bench`` per-iteration learner timing across instance sizes, optionally
            comparing the compiled and pure kernel backends
"""

import argparse
import os
import sys

import numpy as np

from . import _backend
from .domains import (DagFlowDomain, HypercubeDomain, NSetDomain,
                      ProductDomain, SequenceFormDomain)
from .games import derive_tfsdp, dump_game, load_game
from .generators import gen_kuhn, gen_leduc, matching_pennies
from .harness import SEED_ENV_VAR, RunConfig, bench_learner, run_cols
from .learning import KomwuLearner
from .oracle import VertexOmwu, enumerate_vertices
from .tfsdp import random_tfsdp


def _resolve_seed(flag_value):
    env = os.environ.get(SEED_ENV_VAR)
    return int(env) if env is not None else flag_value


def _parse_params(text):
    params = {}
    if not text:
        return params
    for part in text.split(","):
        key, _, value = part.partition("=")
        if not _:
            raise ValueError(f"malformed parameter {part!r} (expected k=v)")
        params[key.strip()] = value.strip()
    return params


def parse_game_spec(spec):
    """Build a game from ``name:params`` or load it from a JSON path."""
    if spec.endswith(".json"):
        return load_game(spec)
    name, _, rest = spec.partition(":")
    params = _parse_params(rest)
    if name == "kuhn":
        return gen_kuhn(players=int(params.get("p", 2)),
                        ranks=int(params.get("r", 3)))
    if name == "leduc":
        return gen_leduc(players=int(params.get("p", 2)),
                         ranks=int(params.get("r", 3)),
                         suits=int(params.get("s", 3)),
                         max_bets=int(params.get("bets", 1)))
    if name == "mp":
        return matching_pennies(win_match_a=float(params.get("a", 1.0)),
                                win_match_b=float(params.get("b", 1.0)))
    raise ValueError(f"unknown game {name!r} (expected kuhn, leduc, mp, "
                     "or a .json path)")


def parse_domain_spec(spec, seed=0):
    """Named small kernel domains for the ``check`` subcommand."""
    if "+" in spec:
        left, _, right = spec.partition("+")
        return ProductDomain(parse_domain_spec(left, seed),
                             parse_domain_spec(right, seed + 1))
    name, _, rest = spec.partition(":")
    params = _parse_params(rest)
    if name == "nset":
        return NSetDomain(int(params.get("d", 6)), int(params.get("n", 3)))
    if name == "cube":
        return HypercubeDomain(int(params.get("d", 5)))
    if name == "dag":
        return DagFlowDomain(5, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3),
                                 (2, 4), (3, 4)])
    if name == "kuhn":
        game = gen_kuhn(players=int(params.get("p", 2)),
                        ranks=int(params.get("r", 3)))
        player = int(params.get("player", 0))
        return SequenceFormDomain(derive_tfsdp(game, player))
    if name == "random-tree":
        rng = np.random.default_rng(int(params.get("seed", seed)))
        return SequenceFormDomain(random_tfsdp(
            rng, max_depth=int(params.get("depth", 3)), max_vertices=2000))
    raise ValueError(f"unknown domain {name!r} (expected nset, cube, dag, "
                     "kuhn, random-tree, or a + product of those)")


def _cmd_run(args):
    game = parse_game_spec(args.game)
    config = RunConfig(algos=args.algo.split(","), iters=args.iters,
                       eta=args.eta, schedule=args.schedule,
                       seed=_resolve_seed(args.seed), stride=args.stride,
                       out=args.out)
    record = run_cols(game, config)
    last = -1
    print(f"t={record.ts[last]} max_regret={record.max_regret[last]:.6g} "
          f"expl_last={record.expl_last[last]:.6g} "
          f"expl_avg={record.expl_avg[last]:.6g}")
    if args.out:
        print(f"wrote {args.out}")
    return 0


def _cmd_gen(args):
    game = parse_game_spec(args.game)
    dump_game(game, args.out)
    print(f"wrote {args.out} (players={game.players})")
    return 0


def _cmd_check(args):
    seed = _resolve_seed(args.seed)
    domain = parse_domain_spec(args.domain, seed=seed)
    rng = np.random.default_rng(seed)
    verts = enumerate_vertices(domain)
    d = domain.dimension
    learner = KomwuLearner(domain, args.eta)
    reference = VertexOmwu(verts, args.eta)
    worst = 0.0
    for _ in range(args.iters):
        pred = rng.random(d)
        loss = rng.random(d)
        xa = learner.step(pred)
        xb = reference.step(pred)
        worst = max(worst, float(np.abs(xa - xb).max()))
        learner.observe_loss(loss)
        reference.observe_loss(loss)
    print(f"domain={args.domain} vertices={len(verts)} rounds={args.iters} "
          f"max_deviation={worst:.3e}")
    return 0 if worst <= args.tol else 1


def _cmd_bench(args):
    ranks = [int(r) for r in args.ranks.split(",")]
    backends = (["pure", "compiled"] if args.backend == "both"
                else [args.backend])
    if "compiled" in backends and not _backend.HAVE_COMPILED:
        print("compiled backend unavailable; falling back to pure",
              file=sys.stderr)
        backends = ["pure"]
    seed = _resolve_seed(args.seed)
    rows = []
    for rank in ranks:
        game = parse_game_spec(f"{args.game}:p=2,r={rank}")
        tfsdp = derive_tfsdp(game, 0)
        times = {b: bench_learner(tfsdp, iters=args.iters, seed=seed,
                                  backend=b) for b in backends}
        rows.append((rank, tfsdp.n_seqs, times))
    cols = "".join(f"  {b + ' us/iter':>16}" for b in backends)
    print(f"{'rank':>6}  {'sequences':>9}{cols}")
    for rank, n_seqs, times in rows:
        vals = "".join(f"  {1e6 * times[b]:>16.2f}" for b in backends)
        print(f"{rank:>6}  {n_seqs:>9}{vals}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="komwu",
        description="kernelized multiplicative weights for 0/1-polyhedral "
                    "games")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="self-play run with CSV output")
    p_run.add_argument("--game", required=True,
                       help="kuhn:p=2,r=3 | leduc:p=3 | mp | path.json")
    p_run.add_argument("--algo", default="komwu",
                       help="algorithm, or comma list per player "
                            "(komwu,kmwu,cfr-rm,cfr-rm+,cfr-mwu)")
    p_run.add_argument("--eta", type=float, default=None)
    p_run.add_argument("--schedule", default="constant",
                       choices=["constant", "inv-sqrt"])
    p_run.add_argument("--iters", type=int, required=True)
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--stride", type=int, default=10)
    p_run.set_defaults(func=_cmd_run)

    p_gen = sub.add_parser("gen", help="emit a game as JSON")
    p_gen.add_argument("--game", required=True)
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=_cmd_gen)

    p_check = sub.add_parser("check", help="kernelized-vs-explicit self-test")
    p_check.add_argument("--domain", required=True,
                         help="nset:d=6,n=3 | cube:d=5 | dag | "
                              "kuhn:p=2,r=3,player=0 | random-tree:seed=0 | "
                              "spec+spec product")
    p_check.add_argument("--iters", type=int, default=100)
    p_check.add_argument("--eta", type=float, default=0.5)
    p_check.add_argument("--tol", type=float, default=1e-9)
    p_check.add_argument("--seed", type=int, default=0)
    p_check.set_defaults(func=_cmd_check)

    p_bench = sub.add_parser("bench", help="per-iteration timing sweep")
    p_bench.add_argument("--game", default="kuhn", choices=["kuhn"])
    p_bench.add_argument("--ranks", default="3,6,12,24")
    p_bench.add_argument("--iters", type=int, default=2000)
    p_bench.add_argument("--backend", default="auto",
                         choices=["auto", "pure", "compiled", "both"])
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
