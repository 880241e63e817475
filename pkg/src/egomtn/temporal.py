"""Calendar snapshots of the multi-token network and their time series."""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta, timezone
from typing import Iterable, Mapping, Sequence

from .centrality import DAMPING, MAX_ITER, TOL, cheirank, group_balance, pagerank, top_k
from .ingest import EntityMap, TransferRecord
from .mtn import MultiTokenNetwork, build_mtn

RESOLUTIONS = ("day", "month", "year")


def window_start(ts: datetime, resolution: str) -> datetime:
    ts = ts.astimezone(timezone.utc)
    if resolution == "day":
        return datetime(ts.year, ts.month, ts.day, tzinfo=timezone.utc)
    if resolution == "month":
        return datetime(ts.year, ts.month, 1, tzinfo=timezone.utc)
    if resolution == "year":
        return datetime(ts.year, 1, 1, tzinfo=timezone.utc)
    raise ValueError(f"resolution must be one of {RESOLUTIONS}, got {resolution!r}")


def window_end(start: datetime, resolution: str) -> datetime:
    if resolution == "day":
        return start + timedelta(days=1)
    if resolution == "month":
        if start.month == 12:
            return start.replace(year=start.year + 1, month=1)
        return start.replace(month=start.month + 1)
    if resolution == "year":
        return start.replace(year=start.year + 1)
    raise ValueError(f"resolution must be one of {RESOLUTIONS}, got {resolution!r}")


@dataclass
class Snapshot:
    start: datetime
    end: datetime
    records: list[TransferRecord]
    network: MultiTokenNetwork

    @property
    def n_nodes(self) -> int:
        return self.network.n_nodes

    @property
    def n_edges(self) -> int:
        return self.network.n_edges

    @property
    def transactions(self) -> int:
        return self.network.total_weight()

    def entities(self) -> set[str]:
        return set(self.network.users())

    def tokens(self) -> set[str]:
        return set(self.network.tokens())


@dataclass
class SnapshotSeries:
    resolution: str
    windows: list[Snapshot] = field(default_factory=list)
    entities: EntityMap = field(default_factory=EntityMap)

    def __len__(self):
        return len(self.windows)

    def __iter__(self):
        return iter(self.windows)


def snapshot_series(records: Iterable[TransferRecord], resolution: str,
                    entities: EntityMap) -> SnapshotSeries:
    """Split records into calendar windows (UTC) and build one network per window.

    Record order inside a window follows the input order, so each window's
    network is identical to ``build_mtn`` over that window's filtered records.
    Windows without transfers are skipped.
    """
    buckets: dict[datetime, list[TransferRecord]] = defaultdict(list)
    for r in records:
        buckets[window_start(r.timestamp, resolution)].append(r)
    windows = []
    for start in sorted(buckets):
        recs = buckets[start]
        windows.append(Snapshot(start, window_end(start, resolution), recs,
                                build_mtn(recs, entities)))
    return SnapshotSeries(resolution, windows, entities)


def size_series(series: SnapshotSeries) -> list[tuple[int, int, int]]:
    """(nodes, edges, transactions) per window."""
    return [(w.n_nodes, w.n_edges, w.transactions) for w in series]


def novelty_ratios(series: SnapshotSeries) -> list[tuple[float, float]]:
    """Share of entities and tokens in each window never seen in an earlier one.

    A window whose network is empty has no participants; it reports NaN.
    """
    if not len(series):
        raise ValueError("novelty of an empty series")
    seen_e: set[str] = set()
    seen_t: set[str] = set()
    out = []
    for w in series:
        ents, toks = w.entities(), w.tokens()
        fe = len(ents - seen_e) / len(ents) if ents else math.nan
        ft = len(toks - seen_t) / len(toks) if toks else math.nan
        out.append((fe, ft))
        seen_e |= ents
        seen_t |= toks
    return out


def ego_activity(series: SnapshotSeries, group) -> list[tuple[int, int, int]]:
    """(in_edges, out_edges, transactions) touching the group, per window."""
    group = set(group)
    if not group:
        raise ValueError("group must not be empty")
    out = []
    for w in series:
        net = w.network
        n_in = n_out = tx = 0
        for (s, d), weight in net.edges.items():
            src_in = net.nodes[s].entity in group
            dst_in = net.nodes[d].entity in group
            n_out += src_in
            n_in += dst_in
            if src_in or dst_in:
                tx += weight
        out.append((n_in, n_out, tx))
    return out


def _scores(net, damping, tol, max_iter):
    return pagerank(net, damping, tol, max_iter), cheirank(net, damping, tol, max_iter)


def group_centrality_series(series: SnapshotSeries, group, damping: float = DAMPING,
                            tol: float = TOL, max_iter: int = MAX_ITER):
    """Per window ``(start, p_group, p*_group, B_group)``; windows without the group are skipped."""
    group = set(group)
    if not group:
        raise ValueError("group must not be empty")
    out = []
    for w in series:
        if w.network.n_nodes == 0:
            continue
        pr, cr = _scores(w.network, damping, tol, max_iter)
        res = group_balance(pr, cr, group)
        if res is not None:
            out.append((w.start, *res))
    return out


def group_token_mass(pr, group) -> dict[str, float]:
    """Sum of the group's node scores per token."""
    parts = defaultdict(list)
    for n, v in zip(pr.nodes, pr.values):
        if n.entity in group:
            parts[n.token].append(float(v))
    return {t: math.fsum(vs) for t, vs in parts.items()}


def default_group_tokens(net: MultiTokenNetwork, group, k: int = 10, damping: float = DAMPING,
                         tol: float = TOL, max_iter: int = MAX_ITER) -> list[str]:
    """Union of the group's top-k tokens by PageRank and by CheiRank on ``net``."""
    pr, cr = _scores(net, damping, tol, max_iter)
    by_pr = [t for t, _ in top_k(group_token_mass(pr, group), k)] if net.n_nodes else []
    by_cr = [t for t, _ in top_k(group_token_mass(cr, group), k)] if net.n_nodes else []
    return list(dict.fromkeys(by_pr + by_cr))


def token_pctb_series(series: SnapshotSeries, group, tokens: Sequence[str] | None = None,
                      damping: float = DAMPING, tol: float = TOL, max_iter: int = MAX_ITER):
    """Per window, the group's balance split by token.

    ``B_{g,t} = (sum_u p*_ut - sum_u p_ut) / (p*_g + p_g)`` over members ``u``,
    so the values of one window add up to the group balance. Returns a list of
    ``(start, {token: B})``. Tokens the group does not hold in a window are
    absent for that window. Without ``tokens`` the default set comes from the
    network over all windows combined.
    """
    group = set(group)
    if not group:
        raise ValueError("group must not be empty")
    if tokens is None:
        combined = build_mtn([r for w in series for r in w.records], series.entities)
        tokens = default_group_tokens(combined, group, 10, damping, tol, max_iter)
    wanted = list(tokens)
    out = []
    for w in series:
        if w.network.n_nodes == 0:
            continue
        pr, cr = _scores(w.network, damping, tol, max_iter)
        res = group_balance(pr, cr, group)
        if res is None:
            continue
        pg, psg, _ = res
        p_t, ps_t = group_token_mass(pr, group), group_token_mass(cr, group)
        denom = pg + psg
        out.append((w.start, {t: (ps_t[t] - p_t[t]) / denom for t in wanted if t in p_t}))
    return out


def monthly_average(daily: Mapping[date | datetime, float]) -> dict[date, float]:
    """Mean per calendar month over the days that have a value."""
    parts: dict[date, list[float]] = defaultdict(list)
    for day, value in daily.items():
        parts[date(day.year, day.month, 1)].append(float(value))
    return {m: math.fsum(vs) / len(vs) for m, vs in sorted(parts.items())}
