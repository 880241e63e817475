"""PageRank, CheiRank, user/token aggregation, trade balance and ranking tools."""
from __future__ import annotations

import math
import warnings
from collections import defaultdict
from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

import numpy as np

from .mtn import MultiTokenNetwork, NodeId, transpose

DAMPING = 0.85
TOL = 1e-10
MAX_ITER = 200


@dataclass(frozen=True)
class ScoreVector:
    """Stationary probabilities over the nodes of a network.

    ``values[i]`` belongs to ``nodes[i]``. ``converged`` is False when the
    iteration budget ran out before the L1 change dropped below ``tol``;
    ``residual`` is the last L1 change either way.
    """

    nodes: tuple[NodeId, ...]
    values: np.ndarray
    damping: float
    iterations: int
    residual: float
    converged: bool

    def __getitem__(self, node: NodeId) -> float:
        return float(self.values[self.nodes.index(node)])

    def as_dict(self) -> dict[NodeId, float]:
        return {n: float(v) for n, v in zip(self.nodes, self.values)}


def pagerank(net: MultiTokenNetwork, damping: float = DAMPING, tol: float = TOL,
             max_iter: int = MAX_ITER) -> ScoreVector:
    """Weighted PageRank by power iteration.

    The walker follows an out-edge with probability proportional to its
    weight. Dangling nodes spread their mass uniformly over all nodes and
    teleportation is uniform.
    """
    if not 0.0 < damping < 1.0:
        raise ValueError(f"damping must lie in (0, 1), got {damping}")
    if tol <= 0 or max_iter < 1:
        raise ValueError("tol must be positive and max_iter at least 1")
    n = net.n_nodes
    if n == 0:
        raise ValueError("pagerank of an empty network")

    src, dst, w = net.edge_arrays()
    out_weight = np.bincount(src, weights=w, minlength=n).astype(np.float64)
    dangling = out_weight == 0
    # transition probability carried by each edge
    share = np.zeros(len(w))
    if len(w):
        share = w / out_weight[src]

    x = np.full(n, 1.0 / n)
    residual = math.inf
    iterations = 0
    converged = False
    for iterations in range(1, max_iter + 1):
        flow = np.bincount(dst, weights=share * x[src], minlength=n)
        leak = x[dangling].sum()
        new = damping * (flow + leak / n) + (1.0 - damping) / n
        new /= new.sum()
        residual = float(np.abs(new - x).sum())
        x = new
        if residual < tol:
            converged = True
            break
    return ScoreVector(tuple(net.nodes), x, damping, iterations, residual, converged)


def cheirank(net: MultiTokenNetwork, damping: float = DAMPING, tol: float = TOL,
             max_iter: int = MAX_ITER) -> ScoreVector:
    """PageRank of the edge-reversed network."""
    return pagerank(transpose(net), damping, tol, max_iter)


def aggregate(scores: ScoreVector, axis: str) -> dict[str, float]:
    """Sum node mass per user (``axis='user'``) or per token (``axis='token'``)."""
    if axis not in ("user", "token"):
        raise ValueError(f"axis must be 'user' or 'token', got {axis!r}")
    parts = defaultdict(list)
    for node, v in zip(scores.nodes, scores.values):
        parts[node.entity if axis == "user" else node.token].append(float(v))
    return {k: math.fsum(vs) for k, vs in parts.items()}


def _balance(p_star: float, p: float) -> float:
    return (p_star - p) / (p_star + p)


def pctb(pr_agg: Mapping[str, float], cr_agg: Mapping[str, float]) -> dict[str, float]:
    """Trade balance ``(p* - p) / (p* + p)`` per key of the aggregated scores.

    Positive values mean CheiRank (spreading) dominates. Keys with a zero
    denominator are left out with a warning.
    """
    out = {}
    for key in dict.fromkeys([*pr_agg, *cr_agg]):
        p, ps = pr_agg.get(key, 0.0), cr_agg.get(key, 0.0)
        if p + ps <= 0.0:
            warnings.warn(f"trade balance undefined for {key!r}: zero score mass")
            continue
        out[key] = _balance(ps, p)
    return out


def pctb_ut(pr: ScoreVector, cr: ScoreVector, pr_agg: Mapping[str, float],
            cr_agg: Mapping[str, float]) -> dict[NodeId, float]:
    """Per-node contribution to its user's balance.

    The denominator is the user's total ``p*_u + p_u``, so the node values of
    one user sum to that user's balance.
    """
    if pr.nodes != cr.nodes:
        raise ValueError("PageRank and CheiRank vectors cover different nodes")
    out = {}
    for node, p, ps in zip(pr.nodes, pr.values, cr.values):
        denom = pr_agg.get(node.entity, 0.0) + cr_agg.get(node.entity, 0.0)
        if denom <= 0.0:
            warnings.warn(f"trade balance undefined for {node!r}: zero user mass")
            continue
        out[node] = (float(ps) - float(p)) / denom
    return out


def group_balance(pr: ScoreVector, cr: ScoreVector, members) -> tuple[float, float, float] | None:
    """(p_group, p*_group, B_group) for a set of entities, None if none is present."""
    members = set(members)
    p = [float(v) for n, v in zip(pr.nodes, pr.values) if n.entity in members]
    if not p:
        return None
    ps = [float(v) for n, v in zip(cr.nodes, cr.values) if n.entity in members]
    pg, psg = math.fsum(p), math.fsum(ps)
    return pg, psg, _balance(psg, pg)


def top_k(scores: Mapping[Hashable, float], k: int) -> list[tuple[Hashable, float]]:
    """Highest ``k`` entries, ties resolved by the mapping's insertion order."""
    if k < 1:
        raise ValueError("k must be at least 1")
    ranked = sorted(enumerate(scores.items()), key=lambda t: (-t[1][1], t[0]))
    return [item for _, item in ranked[:k]]


def rbo(list_a: Sequence[Hashable], list_b: Sequence[Hashable], p: float = 0.9) -> float:
    """Extrapolated rank-biased overlap of two rankings (Webber et al., 2010).

    Evaluated at the depth of the longer list, with the shorter list treated
    as uneven-length per the extrapolation for truncated rankings.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    for lst in (list_a, list_b):
        if len(set(lst)) != len(lst):
            raise ValueError("ranking contains duplicate items")
    if list(list_a) == list(list_b):
        return 1.0
    if not list_a or not list_b:
        return 0.0
    short, long_ = sorted((list(list_a), list(list_b)), key=len)
    s, l = len(short), len(long_)

    seen_short, seen_long = set(), set()
    overlap = 0
    x = [0] * (l + 1)
    for d in range(1, l + 1):
        item_l = long_[d - 1]
        item_s = short[d - 1] if d <= s else None
        if item_s is not None and item_s == item_l:
            overlap += 1
        else:
            if item_l in seen_short:
                overlap += 1
            if item_s is not None and item_s in seen_long:
                overlap += 1
        seen_long.add(item_l)
        if item_s is not None:
            seen_short.add(item_s)
        x[d] = overlap

    terms = [x[d] / d * p ** d for d in range(1, l + 1)]
    terms += [x[s] * (d - s) / (s * d) * p ** d for d in range(s + 1, l + 1)]
    tail = ((x[l] - x[s]) / l + x[s] / s) * p ** l
    value = (1 - p) / p * math.fsum(terms) + tail
    return min(1.0, max(0.0, value))
