import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from egomtn.centrality import (ScoreVector, aggregate, cheirank, pagerank, pctb, pctb_ut, rbo,
                               top_k)
from egomtn.mtn import MultiTokenNetwork, NodeId, transpose

from oracles import dense_pagerank, rbo_oracle
from conftest import net_from_edges, random_mtn


def test_single_node():
    net = MultiTokenNetwork([NodeId("a", "t")], [True])
    assert pagerank(net).values.tolist() == [1.0]
    assert cheirank(net).values.tolist() == [1.0]


@pytest.mark.parametrize("damping", [0.1, 0.5, 0.85, 0.99])
def test_two_cycle_uniform(damping):
    net = net_from_edges([("a", "b", 3), ("b", "a", 1)])
    assert pagerank(net, damping).values == pytest.approx([0.5, 0.5], abs=1e-12)


def test_chain_matches_frozen_linear_solve():
    net = net_from_edges([("a", "b", 1), ("b", "c", 1)])
    # frozen from dense_pagerank on the same chain
    expected = [0.18441678192715538, 0.34117104656523745, 0.4744121715076072]
    assert dense_pagerank(net) == pytest.approx(expected, abs=1e-15)
    pr = pagerank(net)
    assert pr.converged
    assert pr.values == pytest.approx(expected, abs=1e-9)


def test_out_star_orderings():
    net = net_from_edges([("hub", f"l{i}", 1) for i in range(5)])
    pr, cr = pagerank(net), cheirank(net)
    oracle_pr = dense_pagerank(net)
    oracle_cr = dense_pagerank(transpose(net))
    assert oracle_cr[0] == pytest.approx(21 / 41)
    assert pr.values == pytest.approx(oracle_pr, abs=1e-9)
    assert cr.values == pytest.approx(oracle_cr, abs=1e-9)
    assert all(cr.values[0] > cr.values[1:])
    assert all(pr.values[0] < pr.values[1:])


def test_symmetric_network_cheirank_equals_pagerank():
    net = net_from_edges([("a", "b", 2), ("b", "a", 2), ("b", "c", 5), ("c", "b", 5)])
    assert cheirank(net).values == pytest.approx(pagerank(net).values, abs=1e-12)


def test_cheirank_is_pagerank_of_transpose_bitwise():
    net = random_mtn(random.Random(11), n_users=40, n_edges=90)
    cr, pt = cheirank(net), pagerank(transpose(net))
    assert np.array_equal(cr.values, pt.values)
    assert cr.iterations == pt.iterations


def test_weight_scaling_invariance():
    net = random_mtn(random.Random(2))
    scaled = MultiTokenNetwork(net.nodes, net.ego, {k: 7 * w for k, w in net.edges.items()})
    assert pagerank(scaled).values == pytest.approx(pagerank(net).values, abs=1e-10)


def test_unconverged_flag():
    net = random_mtn(random.Random(4))
    pr = pagerank(net, max_iter=2)
    assert not pr.converged and pr.iterations == 2 and pr.residual > 1e-10
    assert math.isclose(pr.values.sum(), 1.0, abs_tol=1e-12)


def test_bad_parameters():
    net = net_from_edges([("a", "b", 1)])
    for kwargs in ({"damping": 0.0}, {"damping": 1.0}, {"tol": 0.0}, {"max_iter": 0}):
        with pytest.raises(ValueError):
            pagerank(net, **kwargs)
    with pytest.raises(ValueError):
        pagerank(MultiTokenNetwork())


def test_aggregate_examples():
    nodes = (NodeId("u", "x"), NodeId("u", "y"), NodeId("v", "x"))
    sv = ScoreVector(nodes, np.array([0.3, 0.2, 0.5]), 0.85, 1, 0.0, True)
    assert aggregate(sv, "user") == {"u": 0.5, "v": 0.5}
    assert aggregate(sv, "token") == {"x": 0.8, "y": 0.2}
    with pytest.raises(ValueError):
        aggregate(sv, "node")


def test_aggregate_single_token_equals_nodes():
    net = net_from_edges([("a", "b", 1), ("b", "c", 2), ("c", "a", 1)])
    pr = pagerank(net)
    assert aggregate(pr, "user") == {n.entity: float(v) for n, v in zip(pr.nodes, pr.values)}


def test_aggregates_partition_mass():
    pr = pagerank(random_mtn(random.Random(9), n_users=30))
    assert math.fsum(aggregate(pr, "user").values()) == pytest.approx(1.0, abs=1e-9)
    assert math.fsum(aggregate(pr, "token").values()) == pytest.approx(1.0, abs=1e-9)


def test_pctb_forced_values():
    assert pctb({"u": 0.2}, {"u": 0.2}) == {"u": 0.0}
    assert pctb({"u": 0.1}, {"u": 0.3})["u"] == pytest.approx(0.5)
    assert pctb({"u": 0.3}, {"u": 0.1})["u"] == pytest.approx(-0.5)


def test_pctb_zero_denominator_omitted():
    with pytest.warns(UserWarning):
        out = pctb({"u": 0.0, "v": 0.1}, {"u": 0.0, "v": 0.1})
    assert out == {"v": 0.0}


def test_pctb_ut_sums_to_user_balance():
    net = random_mtn(random.Random(21), n_users=25, n_tokens=4, n_edges=80)
    pr, cr = pagerank(net), cheirank(net)
    pu, cu = aggregate(pr, "user"), aggregate(cr, "user")
    bu, but = pctb(pu, cu), pctb_ut(pr, cr, pu, cu)
    sums = {}
    for node, b in but.items():
        sums.setdefault(node.entity, []).append(b)
    for user, parts in sums.items():
        assert abs(math.fsum(parts) - bu[user]) <= 1e-12
        assert -1.0 <= bu[user] <= 1.0


def test_top_k():
    assert top_k({"a": 0.5, "b": 0.3, "c": 0.2}, 2) == [("a", 0.5), ("b", 0.3)]
    assert [k for k, _ in top_k({"x": 1, "y": 1, "z": 1, "w": 1}, 3)] == ["x", "y", "z"]
    assert [k for k, _ in top_k({"c": 0.2, "a": 0.5}, 10)] == ["a", "c"]
    with pytest.raises(ValueError):
        top_k({"a": 1.0}, 0)


def test_rbo_examples():
    top = list("abcdefghij")
    assert rbo(top, top) == 1.0
    assert rbo(list("abc"), list("xyz")) == 0.0
    assert rbo(list("abc"), list("acb"), 0.9) == pytest.approx(0.955, abs=1e-12)
    assert rbo_oracle(list("abc"), list("acb"), 0.9) == pytest.approx(0.955, abs=1e-12)
    with pytest.raises(ValueError):
        rbo(["a", "a"], ["a"])


def test_rbo_uneven_lengths_match_oracle():
    a, b = list("abcdefg"), list("bxaqc")
    for p in (0.5, 0.9, 0.98):
        assert rbo(a, b, p) == pytest.approx(rbo_oracle(a, b, p), abs=1e-12)


rankings = st.lists(st.integers(0, 15), unique=True, max_size=10)


@settings(max_examples=200, deadline=None)
@given(rankings, rankings, st.floats(0.05, 0.99))
def test_rbo_properties(a, b, p):
    r = rbo(a, b, p)
    assert 0.0 <= r <= 1.0
    assert abs(r - rbo(b, a, p)) <= 1e-15
    if a and b and a != b:
        assert r == pytest.approx(rbo_oracle(a, b, p), abs=1e-12)
