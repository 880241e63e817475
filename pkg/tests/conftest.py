import random
from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

import egomtn
import egomtn.cli
import egomtn.mtn
import egomtn.temporal
from egomtn.ingest import AddressLabel, EntityMap, TransferRecord, build_entity_map
from egomtn.mtn import MultiTokenNetwork, NodeId

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"

_original_init = MultiTokenNetwork.__init__
_original_build = egomtn.mtn.build_mtn


def expected_retained(records, entities):
    """Count records that survive the ego and self-loop rules, computed directly."""
    n = 0
    for r in records:
        a = entities.entity_of.get(r.from_addr, r.from_addr)
        b = entities.entity_of.get(r.to_addr, r.to_addr)
        if a != b and (entities.ego.get(a, False) or entities.ego.get(b, False)):
            n += 1
    return n


def _checked_init(self, *args, **kwargs):
    _original_init(self, *args, **kwargs)
    egomtn.mtn.check_invariants(self)


def _checked_build(records, entities):
    records = list(records)
    net = _original_build(records, entities)
    egomtn.mtn.check_invariants(net, expected_retained(records, entities))
    return net


@pytest.fixture(autouse=True)
def structural_invariants(monkeypatch):
    """Every network constructed during a test must satisfy the MTN invariants."""
    monkeypatch.setattr(MultiTokenNetwork, "__init__", _checked_init)
    for mod in (egomtn.mtn, egomtn.temporal, egomtn.cli, egomtn):
        monkeypatch.setattr(mod, "build_mtn", _checked_build)
    yield


def net_from_edges(edges, ego=None, token="t"):
    """Single-layer network from ``(src, dst, weight)`` with string node names.

    All nodes are egos unless ``ego`` lists the ego names.
    """
    names = []
    for s, d, _ in edges:
        for x in (s, d):
            if x not in names:
                names.append(x)
    idx = {n: i for i, n in enumerate(names)}
    flags = [True if ego is None else n in ego for n in names]
    return MultiTokenNetwork([NodeId(n, token) for n in names], flags,
                             {(idx[s], idx[d]): w for s, d, w in edges})


def random_mtn(rng: random.Random, n_users=30, n_tokens=3, n_edges=60, ego_share=0.3,
               max_weight=5, dangling=True) -> MultiTokenNetwork:
    """Random valid multi-token network (edges inside layers, touching an ego)."""
    users = [f"u{i}" for i in range(n_users)]
    n_ego = max(1, int(ego_share * n_users))
    egos = set(users[:n_ego])
    tokens = [f"tok{j}" for j in range(n_tokens)]
    nodes: dict[NodeId, int] = {}
    edges = {}

    def node(u, t):
        key = NodeId(u, t)
        if key not in nodes:
            nodes[key] = len(nodes)
        return nodes[key]

    for _ in range(n_edges):
        t = rng.choice(tokens)
        a = rng.choice(sorted(egos))
        b = rng.choice([u for u in users if u != a])
        if rng.random() < 0.5:
            a, b = b, a
        s, d = node(a, t), node(b, t)
        edges[(s, d)] = edges.get((s, d), 0) + rng.randint(1, max_weight)
    if dangling:
        # a few pure sinks
        for t in tokens:
            a = rng.choice(sorted(egos))
            sink = f"sink_{t}"
            s, d = node(a, t), node(sink, t)
            edges[(s, d)] = edges.get((s, d), 0) + 1
    ordered = list(nodes)
    return MultiTokenNetwork(ordered, [n.entity in egos for n in ordered], edges)


def random_digraph(rng: random.Random, n: int, p: float) -> MultiTokenNetwork:
    """Arbitrary simple digraph on ``n`` nodes in one token layer, all egos."""
    edges = {}
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < p:
                edges[(i, j)] = 1
    return MultiTokenNetwork([NodeId(f"n{i}", "t") for i in range(n)], [True] * n, edges)


T0 = datetime(2022, 1, 1, tzinfo=timezone.utc)


def rec(src, dst, token="eth", ts=T0, block=1, tx="0x01", value="1"):
    return TransferRecord(block, ts, tx, src, dst, token, value)


def day(n, hour=12):
    return T0 + timedelta(days=n, hours=hour)


@pytest.fixture
def ego_map():
    """Entities: ego 'E' (two addresses), ego 'F', alters a1..a4 untagged."""
    labels = [AddressLabel("0xe1", "Ego Fund: hot", "EOA"),
              AddressLabel("0xe2", "Ego Fund: cold", "EOA"),
              AddressLabel("0xf1", "Other Fund", "EOA")]
    return build_entity_map(labels, {"Ego Fund", "Other Fund"})


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
