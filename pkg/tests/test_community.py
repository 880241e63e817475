import itertools
import random

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from egomtn.community import UndirectedGraph, louvain, modularity, project_undirected

from oracles import modularity_oracle, set_partitions
from conftest import net_from_edges, random_mtn


def graph(n, edges):
    g = UndirectedGraph(n)
    for i, j, w in edges:
        g.add_edge(i, j, w)
    return g


def two_cliques():
    edges = [(i, j, 1) for i, j in itertools.combinations(range(5), 2)]
    edges += [(i, j, 1) for i, j in itertools.combinations(range(5, 10), 2)]
    edges.append((4, 5, 1))
    return graph(10, edges)


def test_projection():
    net = net_from_edges([("a", "b", 3), ("b", "a", 2), ("b", "c", 7)])
    g = project_undirected(net)
    assert sorted(g.edges()) == [(0, 1, 5), (1, 2, 7)]
    net = random_mtn(random.Random(1), n_edges=80)
    assert project_undirected(net).n_edges <= net.n_edges


def test_modularity_examples():
    tri = graph(6, [(0, 1, 1), (1, 2, 1), (0, 2, 1), (3, 4, 1), (4, 5, 1), (3, 5, 1)])
    assert modularity(tri, [0] * 6) == pytest.approx(0.0, abs=1e-15)
    assert modularity(tri, [0, 0, 0, 1, 1, 1]) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(ValueError):
        modularity(graph(2, []), [0, 1])
    with pytest.raises(ValueError):
        modularity(tri, [0, 1])


@pytest.mark.parametrize("seed", range(10))
def test_modularity_matches_oracles(seed):
    rng = random.Random(seed)
    n = rng.randint(4, 25)
    edges = [(i, j, rng.randint(1, 6)) for i in range(n) for j in range(i + 1, n)
             if rng.random() < 0.25]
    edges.append((0, 1, 1))
    g = graph(n, edges)
    part = [rng.randrange(4) for _ in range(n)]
    for res in (0.5, 1.0, 2.0):
        q = modularity(g, part, res)
        assert q == pytest.approx(modularity_oracle(g, part, res), abs=1e-12)
    nxg = nx.Graph()
    nxg.add_nodes_from(range(n))
    nxg.add_weighted_edges_from(g.edges())
    comms = [{i for i in range(n) if part[i] == c} for c in set(part)]
    assert modularity(g, part) == pytest.approx(
        nx.community.modularity(nxg, comms, weight="weight"), abs=1e-12)


def test_two_cliques_is_exhaustive_optimum():
    g = two_cliques()
    best_q, best = max((modularity(g, p), p) for p in set_partitions(10))
    split = (0,) * 5 + (1,) * 5
    assert best == split
    for seed in range(5):
        part = louvain(g, seed=seed)
        assert part.membership == split
        assert part.modularity == pytest.approx(best_q, abs=1e-12)


def test_single_edge_merges():
    # together Q = 0, apart Q = -0.5: the strict-gain move joins them
    g = graph(2, [(0, 1, 1)])
    assert modularity(g, [0, 1]) == pytest.approx(-0.5)
    part = louvain(g)
    assert part.membership == (0, 0)
    assert part.modularity == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_disconnected_cliques(k):
    edges, base = [], 0
    sizes = [3 + (i % 3) for i in range(k)]
    for size in sizes:
        edges += [(base + i, base + j, 1) for i, j in itertools.combinations(range(size), 2)]
        base += size
    part = louvain(graph(base, edges), seed=7)
    assert part.n_communities == k
    groups = sorted(sorted(c) for c in part.communities())
    expected, base = [], 0
    for size in sizes:
        expected.append(list(range(base, base + size)))
        base += size
    assert groups == sorted(expected)


def test_deterministic_and_reported_q_exact():
    net = random_mtn(random.Random(31), n_users=60, n_tokens=4, n_edges=200)
    g = project_undirected(net)
    a, b = louvain(g, seed=3), louvain(g, seed=3)
    assert a == b
    assert abs(a.modularity - modularity(g, a.membership)) <= 1e-12
    singletons = modularity(g, range(g.n))
    assert a.modularity >= singletons
    sizes = [len(c) for c in a.communities()]
    assert sizes == sorted(sizes, reverse=True)


weights = st.integers(1, 5)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 14), st.data())
def test_louvain_never_worse_than_singletons(n, data):
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = data.draw(st.lists(st.sampled_from(pairs), min_size=1, unique=True))
    g = graph(n, [(i, j, data.draw(weights)) for i, j in chosen])
    part = louvain(g, seed=data.draw(st.integers(0, 100)))
    assert part.modularity >= modularity(g, range(n)) - 1e-12
    assert part.modularity == pytest.approx(modularity_oracle(g, part.membership), abs=1e-12)
