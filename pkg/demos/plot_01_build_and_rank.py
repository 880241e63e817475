"""
Building a multi-token network and ranking its users
=====================================================

Load the synthetic 1k-transfer fixture, build the network of
(entity, token) nodes and look at who accumulates and who spreads tokens.
"""

from pathlib import Path

from egomtn import (aggregate, build_entity_map, build_mtn, cheirank, filter_transfers,
                    load_labels, load_lines, load_transfers, network_stats, pagerank, pctb, rbo,
                    top_k)

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"

records = load_transfers(DATA / "transfers.csv")
entities = build_entity_map(load_labels(DATA / "labels.csv"), load_lines(DATA / "ego_tags.txt"))

# spam tokens are dropped by the allowlist
records = filter_transfers(records, load_lines(DATA / "allowlist.txt"), None)
net = build_mtn(records, entities)

for key, value in network_stats(net).items():
    print(f"{key:>16}: {value}")

###############################################################################
# PageRank follows edges (where tokens end up), CheiRank follows them
# backwards (where tokens come from).

pr, cr = pagerank(net), cheirank(net)
print("converged:", pr.converged, cr.converged, "after", pr.iterations, "iterations")

pr_user, cr_user = aggregate(pr, "user"), aggregate(cr, "user")
top_pr = [u for u, _ in top_k(pr_user, 10)]
top_cr = [u for u, _ in top_k(cr_user, 10)]
print("top by PageRank:", top_pr[:5])
print("top by CheiRank:", top_cr[:5])
print(f"RBO(PR, CR) = {rbo(top_pr, top_cr):.3f}")

###############################################################################
# Trade balance: positive means the user mostly sends, negative mostly receives.

balance = pctb(pr_user, cr_user)
for user in dict.fromkeys(top_pr[:5] + top_cr[:5]):
    print(f"{user:<24} {balance[user]:+.3f}")
