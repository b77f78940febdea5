import numpy as np
import pytest

import komwu


@pytest.fixture(scope="session")
def kuhn2():
    return komwu.gen_kuhn(2, 3)


@pytest.fixture(scope="session")
def kuhn2_sfg(kuhn2):
    return komwu.SequenceFormGame(kuhn2)


@pytest.fixture(scope="session")
def kuhn_p1(kuhn2):
    return komwu.derive_tfsdp(kuhn2, 0)


@pytest.fixture(scope="session")
def kuhn_p2(kuhn2):
    return komwu.derive_tfsdp(kuhn2, 1)


def five_node_dag():
    return komwu.DagFlowDomain(
        5, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (2, 4), (3, 4)])


def domain_zoo(kuhn_p1, seed=0):
    """Small domains of every kind, all under the enumeration cap."""
    rng = np.random.default_rng(seed)
    zoo = [
        komwu.NSetDomain(6, 3),
        komwu.NSetDomain(5, 4),
        komwu.NSetDomain(5, 5),
        komwu.HypercubeDomain(5),
        five_node_dag(),
        komwu.ProductDomain(komwu.NSetDomain(6, 3), komwu.HypercubeDomain(5)),
        komwu.SequenceFormDomain(kuhn_p1),
    ]
    for _ in range(3):
        zoo.append(komwu.SequenceFormDomain(
            komwu.random_tfsdp(rng, max_depth=3, max_vertices=1500)))
    return zoo


def mixture_marginals(domain, logb):
    """Enumeration oracle: closed-form mixture of vertices under weights b."""
    verts = komwu.enumerate_vertices(domain).matrix.astype(float)
    lam = np.exp(verts @ logb)
    lam /= lam.sum()
    return lam @ verts
