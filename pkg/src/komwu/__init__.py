"""Kernelized multiplicative weights for games over 0/1-polyhedral sets.

The learner simulates the (optimistic) multiplicative-weights update over
the exponentially many vertices of a polytope while touching only d+1 kernel
evaluations per round; for sequence-form strategy spaces the whole round
runs in linear time in the number of sequences.
"""

from ._backend import HAVE_COMPILED, backend_name
from .cfr import CfrState, cfr_iteration, regret_matching
from .domains import (DagFlowDomain, HypercubeDomain, KernelDomain,
                      NSetDomain, ProductDomain, SequenceFormDomain,
                      marginals_by_kernel_evaluations)
from .games import (Chance, Decision, GameTree, SequenceFormGame, Terminal,
                    best_response_value, best_response_vertex, derive_tfsdp,
                    dump_game, load_game, normalize_payoffs, random_strategy,
                    uniform_strategy)
from .generators import gen_kuhn, gen_leduc, matching_pennies, nfg_game
from .harness import (RunConfig, RunRecord, bench_learner, cce_gap,
                      cumulative_regret, run_cols, vertex_mean_profile)
from .learning import KomwuLearner, SimplexOmwu, as_schedule
from .oracle import (CapacityError, VertexOmwu, VertexSet, brute_kernel,
                     enumerate_vertices, vertex_count)
from .tfsdp import DecisionPoint, TreeFormDecisionProblem, random_tfsdp

__version__ = "0.1.0"

__all__ = [
    "HAVE_COMPILED", "backend_name",
    "CfrState", "cfr_iteration", "regret_matching",
    "KernelDomain", "NSetDomain", "HypercubeDomain", "DagFlowDomain",
    "ProductDomain", "SequenceFormDomain", "marginals_by_kernel_evaluations",
    "GameTree", "Chance", "Decision", "Terminal", "SequenceFormGame",
    "best_response_value", "best_response_vertex", "derive_tfsdp",
    "dump_game", "load_game", "normalize_payoffs", "random_strategy",
    "uniform_strategy",
    "gen_kuhn", "gen_leduc", "matching_pennies", "nfg_game",
    "RunConfig", "RunRecord", "bench_learner", "cce_gap",
    "cumulative_regret", "run_cols", "vertex_mean_profile",
    "KomwuLearner", "SimplexOmwu", "as_schedule",
    "CapacityError", "VertexOmwu", "VertexSet", "brute_kernel",
    "enumerate_vertices", "vertex_count",
    "DecisionPoint", "TreeFormDecisionProblem", "random_tfsdp",
]
