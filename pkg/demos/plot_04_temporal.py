"""
Snapshot time series
====================

Rebuild the network per calendar month and follow one fund group's size,
novelty and trade balance over time. June has no transfers and is simply
absent from the series.
"""

from pathlib import Path

from egomtn import (build_entity_map, ego_activity, filter_transfers, group_centrality_series,
                    load_labels, load_lines, load_transfers, novelty_ratios, size_series,
                    snapshot_series, token_pctb_series)

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"
entities = build_entity_map(load_labels(DATA / "labels.csv"), load_lines(DATA / "ego_tags.txt"))
records = filter_transfers(load_transfers(DATA / "transfers.csv"),
                           load_lines(DATA / "allowlist.txt"), None)

series = snapshot_series(records, "month", entities)
group = {e for e in entities.ego if e.startswith("Alameda Research")}

print("month       nodes links  new-users new-links  in  out  tx")
for w, (n, links, _), (nu, nl), (i, o, tx) in zip(series, size_series(series),
                                                  novelty_ratios(series), ego_activity(series, group)):
    print(f"{w.start:%Y-%m}  {n:>9} {links:>5}  {nu:>9.2f} {nl:>9.2f} {i:>3} {o:>4} {tx:>3}")

###############################################################################
# Group balance per month and its split over tokens.

for (start, p, ps, b), (_, per_token) in zip(group_centrality_series(series, group),
                                             token_pctb_series(series, group)):
    split = " ".join(f"{t}={v:+.2f}" for t, v in sorted(per_token.items()))
    print(f"{start:%Y-%m} B={b:+.3f}  {split}")
