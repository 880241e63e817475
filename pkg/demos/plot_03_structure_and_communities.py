"""
Strongly connected components and communities
==============================================

Cycles of transfers live inside a single token layer. Louvain on the
undirected projection then groups nodes that trade heavily with each other.
"""

from collections import Counter
from pathlib import Path

from egomtn import (annotate_diameters, build_entity_map, build_mtn, diameter_distribution,
                    filter_transfers, load_labels, load_lines, load_transfers, louvain,
                    project_undirected, scc_decomposition)

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"
entities = build_entity_map(load_labels(DATA / "labels.csv"), load_lines(DATA / "ego_tags.txt"))
records = filter_transfers(load_transfers(DATA / "transfers.csv"),
                           load_lines(DATA / "allowlist.txt"), None)
net = build_mtn(records, entities)

alameda = {e for e in entities.ego if e.startswith("Alameda Research")}
summary = annotate_diameters(net, scc_decomposition(net, group=alameda))
big = [c for c in summary.components if c.size > 1]
print(f"{len(summary.components)} SCCs, {len(big)} non-trivial")
for c in big[:5]:
    print(f"  size={c.size:>3} token={c.token:<5} diameter={c.diameter} has_group={c.has_group}")

hist, frac = diameter_distribution(summary)
print("diameter histogram:", dict(sorted(hist.items())), f"group share {frac:.2f}")

###############################################################################
# Louvain is seeded, so the partition below is reproducible.

graph = project_undirected(net)
part = louvain(graph, seed=42)
print(f"{part.n_communities} communities, Q = {part.modularity:.4f}")
for i, members in enumerate(part.communities()[:3]):
    tokens = Counter(net.nodes[v].token for v in members)
    print(f"  community {i}: {len(members)} nodes, tokens {dict(tokens.most_common(3))}")
