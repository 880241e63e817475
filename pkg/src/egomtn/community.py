"""Louvain community detection on the undirected projection of the network."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .mtn import MultiTokenNetwork, NodeId


class UndirectedGraph:
    """Weighted undirected graph over ``0..n-1``.

    ``adj[i][j]`` is the weight of ``{i, j}``; a self-loop is stored once in
    ``adj[i][i]`` and counts twice towards the degree of ``i``.
    """

    def __init__(self, n: int, labels=None):
        self.n = n
        self.labels = list(labels) if labels is not None else list(range(n))
        self.adj: list[dict[int, float]] = [{} for _ in range(n)]

    def add_edge(self, i: int, j: int, w: float) -> None:
        self.adj[i][j] = self.adj[i].get(j, 0) + w
        if i != j:
            self.adj[j][i] = self.adj[j].get(i, 0) + w

    def edges(self):
        for i, nbrs in enumerate(self.adj):
            for j, w in nbrs.items():
                if j >= i:
                    yield i, j, w

    @property
    def n_edges(self) -> int:
        return sum(1 for _ in self.edges())

    def degree(self, i: int) -> float:
        return sum(self.adj[i].values()) + self.adj[i].get(i, 0)

    def total_weight(self) -> float:
        """m, the sum of edge weights."""
        return math.fsum(w for _, _, w in self.edges())


@dataclass(frozen=True)
class Partition:
    membership: tuple[int, ...]
    modularity: float
    resolution: float
    seed: int
    labels: tuple = ()

    @property
    def n_communities(self) -> int:
        return len(set(self.membership))

    def communities(self) -> list[list[int]]:
        out = [[] for _ in range(self.n_communities)]
        for node, c in enumerate(self.membership):
            out[c].append(node)
        return out


def project_undirected(net: MultiTokenNetwork) -> UndirectedGraph:
    g = UndirectedGraph(net.n_nodes, net.nodes)
    for (s, d), w in net.edges.items():
        g.add_edge(s, d, w)
    return g


def modularity(graph: UndirectedGraph, membership, resolution: float = 1.0) -> float:
    """Newman-Girvan modularity, ``sum_c [L_c / 2m - gamma (D_c / 2m)^2]``.

    ``L_c`` counts internal edge weight from both endpoints, ``D_c`` is the
    total degree of the community.
    """
    membership = list(membership)
    if len(membership) != graph.n:
        raise ValueError("partition does not cover every node")
    m2 = 2.0 * graph.total_weight()
    if m2 <= 0:
        raise ValueError("modularity undefined for a graph without edge weight")
    internal: dict[int, list[float]] = {}
    degree: dict[int, list[float]] = {}
    for i, j, w in graph.edges():
        ci, cj = membership[i], membership[j]
        degree.setdefault(ci, []).append(w)
        degree.setdefault(cj, []).append(w)
        if ci == cj:
            internal.setdefault(ci, []).append(2.0 * w)
    q = []
    for c, ds in degree.items():
        q.append(math.fsum(internal.get(c, [])) / m2)
        q.append(-resolution * (math.fsum(ds) / m2) ** 2)
    return math.fsum(q)


def _one_level(graph: UndirectedGraph, resolution: float, rng: random.Random) -> tuple[list[int], bool]:
    """Local moving phase. Returns node -> community and whether anything moved."""
    n = graph.n
    m2 = 2.0 * graph.total_weight()
    k = [graph.degree(i) for i in range(n)]
    comm = list(range(n))
    tot = list(k)
    order = list(range(n))
    rng.shuffle(order)
    moved_any = False
    improved = True
    while improved:
        improved = False
        for i in order:
            ci = comm[i]
            links: dict[int, float] = {}
            for j, w in graph.adj[i].items():
                if j != i:
                    links[comm[j]] = links.get(comm[j], 0.0) + w
            tot[ci] -= k[i]
            # gain of inserting i into c, up to a constant factor
            def gain(c):
                return links.get(c, 0.0) - resolution * tot[c] * k[i] / m2
            best, best_gain = ci, gain(ci)
            for c in sorted(links):
                g = gain(c)
                if g > best_gain:
                    best, best_gain = c, g
            tot[best] += k[i]
            if best != ci:
                comm[i] = best
                improved = moved_any = True
    return comm, moved_any


def _aggregate(graph: UndirectedGraph, comm: list[int]) -> tuple[UndirectedGraph, list[int]]:
    relabel = {c: new for new, c in enumerate(dict.fromkeys(comm))}
    dense = [relabel[c] for c in comm]
    agg = UndirectedGraph(len(relabel))
    for i, j, w in graph.edges():
        agg.add_edge(dense[i], dense[j], w)
    return agg, dense


def louvain(graph: UndirectedGraph, resolution: float = 1.0, seed: int = 42) -> Partition:
    """Two-phase Louvain: local moves until no strict gain, then aggregate; repeat.

    Visit order within each level is shuffled by ``random.Random(seed)``.
    Community ids are relabelled by descending size, ties by smallest node.
    """
    if graph.n == 0:
        raise ValueError("louvain on an empty graph")
    rng = random.Random(seed)
    membership = list(range(graph.n))
    if graph.total_weight() > 0:
        current = graph
        while True:
            comm, moved = _one_level(current, resolution, rng)
            if not moved:
                break
            current, dense = _aggregate(current, comm)
            membership = [dense[c] for c in membership]

    groups: dict[int, list[int]] = {}
    for node, c in enumerate(membership):
        groups.setdefault(c, []).append(node)
    ordered = sorted(groups.values(), key=lambda g: (-len(g), g[0]))
    final = [0] * graph.n
    for cid, nodes in enumerate(ordered):
        for node in nodes:
            final[node] = cid
    q = modularity(graph, final, resolution) if graph.total_weight() > 0 else 0.0
    return Partition(tuple(final), q, resolution, seed, tuple(graph.labels))


def partition_by_node(partition: Partition) -> dict[NodeId, int]:
    return dict(zip(partition.labels, partition.membership))
