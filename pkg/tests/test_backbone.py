import math
import random

import pytest

from egomtn.backbone import backbone_stats, edge_significance, extract_backbone
from egomtn.mtn import MultiTokenNetwork

from oracles import brute_force_backbone
from conftest import net_from_edges, random_mtn


def test_significance_values():
    net = net_from_edges([("a", "b", 1)])
    assert edge_significance(net, (0, 1)) == (1.0, 1.0)
    net = net_from_edges([("a", "b", 9), ("a", "c", 1)])
    assert edge_significance(net, (0, 1))[0] == pytest.approx(0.9)
    assert edge_significance(net, (0, 2))[0] == pytest.approx(0.1)
    with pytest.raises(KeyError):
        edge_significance(net, (1, 0))


def test_out_shares_sum_to_one():
    net = random_mtn(random.Random(8), n_users=30, n_edges=90)
    per_source = {}
    for edge in net.edges:
        per_source.setdefault(edge[0], []).append(edge_significance(net, edge)[0])
    for shares in per_source.values():
        assert math.fsum(shares) == pytest.approx(1.0, abs=1e-12)


def test_equal_weight_hub_keeps_nothing():
    net = net_from_edges([("hub", f"l{i}", 1) for i in range(10)])
    assert (1 - 0.1) ** 9 == pytest.approx(0.387, abs=1e-3)
    res = extract_backbone(net, 0.001)
    assert res.kept == [] and res.network.n_nodes == 0


def test_dominant_edge_kept():
    edges = [("hub", "big", 91)] + [("hub", f"l{i}", 1) for i in range(9)]
    net = net_from_edges(edges)
    assert (1 - 0.91) ** 9 == pytest.approx(3.87e-10, rel=1e-2)
    res = extract_backbone(net, 0.001)
    assert res.kept == [(0, 1)]
    assert res.significance[(0, 1)].kept_by == "source_test"
    assert [n.entity for n in res.network.nodes] == ["hub", "big"]


def test_single_edge_empty_backbone():
    res = extract_backbone(net_from_edges([("a", "b", 4)]), 0.5)
    assert res.network.n_edges == 0


def test_alpha_bounds():
    net = net_from_edges([("a", "b", 4)])
    with pytest.raises(ValueError):
        extract_backbone(net, 0.0)
    with pytest.raises(ValueError):
        extract_backbone(net, 1.5)
    extract_backbone(net, 1.0)


@pytest.mark.parametrize("seed", range(10))
def test_matches_brute_force(seed):
    rng = random.Random(seed)
    net = random_mtn(rng, n_users=25, n_tokens=3, n_edges=120, max_weight=30)
    for alpha in (1e-4, 1e-3, 1e-2, 1e-1, 0.5, 1.0):
        res = extract_backbone(net, alpha)
        expected = brute_force_backbone(net, alpha)
        assert {k: v.kept_by for k, v in res.significance.items() if v.kept_by} == expected


def test_kept_by_consistent_and_retained_nodes_are_endpoints():
    net = random_mtn(random.Random(77), n_users=20, n_edges=100, max_weight=40)
    res = extract_backbone(net, 0.05)
    for (s, d), sig in res.significance.items():
        if sig.kept_by is None:
            continue
        assert sig.kept_by in ("both", "source_test", "target_test")
        assert (sig.p_out < 0.05) == (sig.kept_by in ("both", "source_test"))
        assert (sig.p_in < 0.05) == (sig.kept_by in ("both", "target_test"))
    ends = {net.nodes[i] for e in res.kept for i in e}
    assert set(res.network.nodes) == ends
    assert res.network.edge_set() <= net.edge_set()


def test_stats():
    empty = extract_backbone(net_from_edges([("a", "b", 1)]), 0.001)
    stats = backbone_stats(empty)
    assert all(stats[k] == 0 for k in ("N", "N_users", "N_tokens", "N_links",
                                       "density_global", "fraction_N", "fraction_N_links"))
    # dense reciprocal fixture where every node has >= 2 neighbours: alpha = 1 keeps all
    names = "abcd"
    dense = net_from_edges([(x, y, 1 + i) for i, (x, y) in
                            enumerate((x, y) for x in names for y in names if x != y)])
    full = backbone_stats(extract_backbone(dense, 1.0))
    for key in ("N", "N_users", "N_tokens", "N_links", "density_global", "density_layered"):
        assert full[f"fraction_{key}"] == 1.0


def test_stats_on_200_node_fixture_match_brute_force():
    net = random_mtn(random.Random(200), n_users=70, n_tokens=3, n_edges=330, max_weight=50)
    assert net.n_nodes >= 150
    res = extract_backbone(net, 0.001)
    kept = brute_force_backbone(net, 0.001)
    stats = backbone_stats(res)
    nodes = {net.nodes[i] for e in kept for i in e}
    assert stats["N_links"] == len(kept)
    assert stats["N"] == len(nodes)
    assert stats["N_users"] == len({n.entity for n in nodes})
    assert stats["N_tokens"] == len({n.token for n in nodes})
    assert stats["fraction_N_links"] == len(kept) / net.n_edges
