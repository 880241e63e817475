"""Directed disparity-filter backbone.

An edge ``a -> b`` is tested twice: against the out-strength of ``a`` and
against the in-strength of ``b``. Under the null model a node spreads its
strength uniformly over its ``k`` neighbours, and the probability of seeing
a share at least ``s`` is ``(1 - s) ** (k - 1)``. The edge survives when
either probability falls strictly below ``alpha``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mtn import MultiTokenNetwork, network_stats

ALPHA = 0.001


@dataclass(frozen=True)
class EdgeSignificance:
    s_out: float
    s_in: float
    p_out: float
    p_in: float
    kept_by: str | None


@dataclass
class BackboneResult:
    network: MultiTokenNetwork
    alpha: float
    source: MultiTokenNetwork
    # keyed by (src, dst) indices of the *source* network
    significance: dict[tuple[int, int], EdgeSignificance] = field(default_factory=dict)

    @property
    def kept(self) -> list[tuple[int, int]]:
        return [k for k, sig in self.significance.items() if sig.kept_by is not None]

    def kept_by(self) -> dict[tuple[int, int], str]:
        """kept_by labels keyed by (src, dst) indices of the *backbone* network."""
        idx = self.network.index
        nodes = self.source.nodes
        return {(idx[nodes[s]], idx[nodes[d]]): sig.kept_by
                for (s, d), sig in self.significance.items() if sig.kept_by is not None}


def _strengths(net: MultiTokenNetwork):
    n = net.n_nodes
    src, dst, w = net.edge_arrays()
    out_w = np.bincount(src, weights=w, minlength=n)
    in_w = np.bincount(dst, weights=w, minlength=n)
    return out_w, in_w, net.out_degree(), net.in_degree()


def edge_significance(net: MultiTokenNetwork, edge: tuple[int, int]) -> tuple[float, float]:
    """Weight share of ``edge`` in its source's outflow and its target's inflow."""
    if edge not in net.edges:
        raise KeyError(f"edge {edge} not in network")
    out_w, in_w, _, _ = _strengths(net)
    s, d = edge
    w = net.edges[edge]
    return w / float(out_w[s]), w / float(in_w[d])


def extract_backbone(net: MultiTokenNetwork, alpha: float = ALPHA) -> BackboneResult:
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    out_w, in_w, k_out, k_in = _strengths(net)
    significance = {}
    for (s, d), w in net.edges.items():
        s_out = w / float(out_w[s])
        s_in = w / float(in_w[d])
        # k == 1 gives exponent 0 -> 1.0, never below alpha
        p_out = (1.0 - s_out) ** int(k_out[s] - 1)
        p_in = (1.0 - s_in) ** int(k_in[d] - 1)
        by_src, by_dst = p_out < alpha, p_in < alpha
        if by_src and by_dst:
            kept_by = "both"
        elif by_src:
            kept_by = "source_test"
        elif by_dst:
            kept_by = "target_test"
        else:
            kept_by = None
        significance[(s, d)] = EdgeSignificance(s_out, s_in, p_out, p_in, kept_by)
    kept = [k for k, sig in significance.items() if sig.kept_by is not None]
    return BackboneResult(net.subnetwork(kept), alpha, net, significance)


def backbone_stats(result: BackboneResult) -> dict:
    """Counts and densities of the backbone plus their fraction of the input network."""
    stats = network_stats(result.network)
    full = network_stats(result.source)
    for key in ("N", "N_users", "N_tokens", "N_links", "transactions",
                "density_global", "density_layered"):
        stats[f"fraction_{key}"] = stats[key] / full[key] if full[key] else 0.0
    stats["alpha"] = result.alpha
    return stats
