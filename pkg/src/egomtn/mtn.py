"""The ego multi-token network.

Nodes are ``(entity, token)`` pairs. A directed edge ``a -> b`` carries the
number of transfers of ``b.token`` sent by ``a.entity`` and received by
``b.entity``. Edges never cross token layers and always touch an ego.
"""
from __future__ import annotations

import csv
from collections import defaultdict
from typing import IO, Iterable, NamedTuple, Sequence

import numpy as np

from .ingest import EntityMap, TransferRecord


class NodeId(NamedTuple):
    entity: str
    token: str


class MultiTokenNetwork:
    """Directed, integer-weighted network over ``(entity, token)`` nodes.

    Node indices are stable and follow first-seen order. ``edges`` maps
    ``(src, dst)`` index pairs to transaction counts, in insertion order.
    Treat instances as read-only once built.
    """

    def __init__(self, nodes: Sequence[NodeId] = (), ego: Sequence[bool] = (),
                 edges: dict[tuple[int, int], int] | None = None):
        self.nodes: list[NodeId] = [NodeId(*n) for n in nodes]
        self.ego: list[bool] = [bool(e) for e in ego]
        if len(self.ego) != len(self.nodes):
            raise ValueError("ego flags must match nodes")
        self.index: dict[NodeId, int] = {n: i for i, n in enumerate(self.nodes)}
        if len(self.index) != len(self.nodes):
            raise ValueError("duplicate node ids")
        self.edges: dict[tuple[int, int], int] = dict(edges or {})
        for (s, d), w in self.edges.items():
            if not (0 <= s < len(self.nodes) and 0 <= d < len(self.nodes)):
                raise ValueError(f"edge ({s}, {d}) references unknown node")
            if int(w) != w or w <= 0:
                raise ValueError(f"edge ({s}, {d}) weight must be a positive integer")
        self._cache = {}

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def __len__(self):
        return len(self.nodes)

    def __repr__(self):
        return f"MultiTokenNetwork(nodes={self.n_nodes}, edges={self.n_edges})"

    def users(self) -> list[str]:
        return list(dict.fromkeys(n.entity for n in self.nodes))

    def tokens(self) -> list[str]:
        return list(dict.fromkeys(n.token for n in self.nodes))

    def layers(self) -> dict[str, list[int]]:
        """token -> node indices in that layer."""
        if "layers" not in self._cache:
            out = defaultdict(list)
            for i, n in enumerate(self.nodes):
                out[n.token].append(i)
            self._cache["layers"] = dict(out)
        return self._cache["layers"]

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(src, dst, weight) as int64 arrays in edge insertion order."""
        if "arrays" not in self._cache:
            m = len(self.edges)
            src = np.fromiter((s for s, _ in self.edges), dtype=np.int64, count=m)
            dst = np.fromiter((d for _, d in self.edges), dtype=np.int64, count=m)
            w = np.fromiter(self.edges.values(), dtype=np.int64, count=m)
            self._cache["arrays"] = (src, dst, w)
        return self._cache["arrays"]

    def successors(self) -> list[list[int]]:
        if "succ" not in self._cache:
            succ = [[] for _ in self.nodes]
            for s, d in self.edges:
                succ[s].append(d)
            self._cache["succ"] = succ
        return self._cache["succ"]

    def predecessors(self) -> list[list[int]]:
        if "pred" not in self._cache:
            pred = [[] for _ in self.nodes]
            for s, d in self.edges:
                pred[d].append(s)
            self._cache["pred"] = pred
        return self._cache["pred"]

    def out_degree(self) -> np.ndarray:
        return np.array([len(s) for s in self.successors()], dtype=np.int64)

    def in_degree(self) -> np.ndarray:
        return np.array([len(p) for p in self.predecessors()], dtype=np.int64)

    def total_weight(self) -> int:
        return sum(self.edges.values())

    def edge_set(self) -> set[tuple[NodeId, NodeId, int]]:
        """Index-free view, for structural comparisons."""
        return {(self.nodes[s], self.nodes[d], w) for (s, d), w in self.edges.items()}

    def node_set(self) -> set[tuple[NodeId, bool]]:
        return set(zip(self.nodes, self.ego))

    def subnetwork(self, edge_keys: Iterable[tuple[int, int]]) -> "MultiTokenNetwork":
        """Network induced by a subset of edges; nodes are their endpoints, order kept."""
        keys = [k for k in edge_keys]
        used = sorted({i for k in keys for i in k})
        remap = {old: new for new, old in enumerate(used)}
        return MultiTokenNetwork(
            [self.nodes[i] for i in used],
            [self.ego[i] for i in used],
            {(remap[s], remap[d]): self.edges[(s, d)] for s, d in keys},
        )


def build_mtn(records: Iterable[TransferRecord], entities: EntityMap) -> MultiTokenNetwork:
    """Aggregate transfers into the ego multi-token network.

    A record is dropped when neither endpoint entity is an ego, or when
    sender and receiver resolve to the same entity.
    """
    nodes: dict[NodeId, int] = {}
    ego: list[bool] = []
    edges: dict[tuple[int, int], int] = {}

    def node(entity, token):
        key = NodeId(entity, token)
        idx = nodes.get(key)
        if idx is None:
            idx = nodes[key] = len(nodes)
            ego.append(entities.is_ego(entity))
        return idx

    for r in records:
        a = entities.entity(r.from_addr)
        b = entities.entity(r.to_addr)
        if a == b:
            continue
        if not (entities.is_ego(a) or entities.is_ego(b)):
            continue
        s = node(a, r.token)
        d = node(b, r.token)
        edges[(s, d)] = edges.get((s, d), 0) + 1
    return MultiTokenNetwork(list(nodes), ego, edges)


def transpose(net: MultiTokenNetwork) -> MultiTokenNetwork:
    return MultiTokenNetwork(net.nodes, net.ego, {(d, s): w for (s, d), w in net.edges.items()})


def check_invariants(net: MultiTokenNetwork, n_records: int | None = None) -> None:
    """Raise AssertionError if a structural invariant of the network is broken."""
    for (s, d), w in net.edges.items():
        a, b = net.nodes[s], net.nodes[d]
        assert a.token == b.token, f"edge {a} -> {b} crosses token layers"
        assert net.ego[s] or net.ego[d], f"alter-alter edge {a} -> {b}"
        assert a.entity != b.entity, f"self-loop on entity {a.entity}"
        assert s != d
        assert isinstance(w, (int, np.integer)) and w > 0, f"bad weight {w!r}"
    if n_records is not None:
        assert net.total_weight() == n_records, (
            f"weights sum to {net.total_weight()}, expected {n_records}")


def density(net: MultiTokenNetwork, mode: str = "global") -> float:
    """Edge density over directed ordered pairs.

    ``global`` divides by ``N(N-1)``; ``layered`` divides by the sum of
    ``n_t(n_t-1)`` over token layers, the number of pairs that could carry
    an edge at all.
    """
    n = net.n_nodes
    if mode == "global":
        pairs = n * (n - 1)
    elif mode == "layered":
        pairs = sum(len(v) * (len(v) - 1) for v in net.layers().values())
    else:
        raise ValueError(f"unknown density mode {mode!r}")
    if pairs == 0:
        raise ValueError(f"density undefined: no ordered node pairs ({mode})")
    return net.n_edges / pairs


def degree_ccdf(net: MultiTokenNetwork, direction: str = "in") -> list[tuple[int, float]]:
    """Fraction of nodes with degree >= d, for each observed degree d."""
    if net.n_nodes == 0:
        raise ValueError("degree distribution of an empty network")
    if direction == "in":
        deg = net.in_degree()
    elif direction == "out":
        deg = net.out_degree()
    else:
        raise ValueError(f"direction must be 'in' or 'out', got {direction!r}")
    values, counts = np.unique(deg, return_counts=True)
    tail = np.cumsum(counts[::-1])[::-1]
    n = net.n_nodes
    return [(int(d), int(c) / n) for d, c in zip(values, tail)]


def network_stats(net: MultiTokenNetwork) -> dict:
    """Table-style counts: N, N_users, N_tokens, N_links and both densities."""
    stats = {
        "N": net.n_nodes,
        "N_users": len(net.users()),
        "N_tokens": len(net.tokens()),
        "N_links": net.n_edges,
        "transactions": net.total_weight(),
    }
    for mode in ("global", "layered"):
        try:
            stats[f"density_{mode}"] = density(net, mode)
        except ValueError:
            stats[f"density_{mode}"] = 0.0
    return stats


def write_dump(net: MultiTokenNetwork, nodes_out: IO[str], edges_out: IO[str],
               kept_by: dict[tuple[int, int], str] | None = None) -> None:
    nw = csv.writer(nodes_out, lineterminator="\n")
    nw.writerow(["entity", "token", "is_ego"])
    for n, e in zip(net.nodes, net.ego):
        nw.writerow([n.entity, n.token, int(e)])
    ew = csv.writer(edges_out, lineterminator="\n")
    header = ["src_entity", "dst_entity", "token", "weight"]
    if kept_by is not None:
        header.append("kept_by")
    ew.writerow(header)
    for (s, d), w in net.edges.items():
        row = [net.nodes[s].entity, net.nodes[d].entity, net.nodes[s].token, w]
        if kept_by is not None:
            row.append(kept_by[(s, d)])
        ew.writerow(row)


def read_dump(nodes_in: IO[str], edges_in: IO[str]) -> MultiTokenNetwork:
    nodes, ego = [], []
    for row in csv.DictReader(nodes_in):
        nodes.append(NodeId(row["entity"], row["token"]))
        ego.append(row["is_ego"].strip().lower() in ("1", "true"))
    index = {n: i for i, n in enumerate(nodes)}
    edges = {}
    for line, row in enumerate(csv.DictReader(edges_in), start=2):
        try:
            s = index[NodeId(row["src_entity"], row["token"])]
            d = index[NodeId(row["dst_entity"], row["token"])]
        except KeyError as exc:
            raise ValueError(f"edge list line {line}: unknown node {exc.args[0]}") from None
        edges[(s, d)] = int(row["weight"])
    return MultiTokenNetwork(nodes, ego, edges)
