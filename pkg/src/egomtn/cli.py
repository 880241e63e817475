"""Command-line entry point: ``egomtn {build,analyze,temporal,export}``.

Exit codes: 0 success, 1 usage, 2 input error, 3 PageRank did not converge.
"""
from __future__ import annotations

import argparse
import csv
import difflib
import json
import logging
import math
import re
import sys
from datetime import date, datetime
from pathlib import Path

from . import backbone as bb
from . import centrality as cen
from . import community as com
from . import structure as st
from . import temporal as tmp
from .config import RunConfig, tomllib
from .export import write_graph
from .ingest import (ParseError, build_entity_map, filter_transfers, load_labels, load_lines,
                     load_transfers, parse_timestamp)
from .mtn import build_mtn, degree_ccdf, network_stats, write_dump

log = logging.getLogger("egomtn")

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_UNCONVERGED = 0, 1, 2, 3
ANALYSES = ("centrality", "pctb", "backbone", "scc", "communities")


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class Unconverged(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _num(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_num(v) for v in row])


def _write_json(path: Path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")


class Run:
    """Inputs loaded once per invocation, with lazily computed analyses."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.out = Path(config.out_dir)
        self._pr = self._cr = None
        self._partition = None

    def load(self):
        cfg = self.config
        if not cfg.transfers:
            raise UsageError("no transfers file given (config key 'transfers')")
        paths = [("transfers", cfg.transfers), ("labels", cfg.labels),
                 ("ego_tags", cfg.ego_tags), ("allowlist", cfg.allowlist)]
        for key, path in paths:
            if path is not None and not Path(path).is_file():
                raise InputError(f"{key} file not found: {path}")
        try:
            records = load_transfers(cfg.transfers, cfg.transfers_format)
            labels = load_labels(cfg.labels) if cfg.labels else []
            ego_tags = load_lines(cfg.ego_tags) if cfg.ego_tags else []
            allow = load_lines(cfg.allowlist) if cfg.allowlist else None
            window = None
            if cfg.window_start or cfg.window_end:
                if not (cfg.window_start and cfg.window_end):
                    raise UsageError("window_start and window_end must be given together")
                window = (parse_timestamp(cfg.window_start), parse_timestamp(cfg.window_end))
            self.records = filter_transfers(records, allow, window)
        except (ParseError, UnicodeDecodeError) as exc:
            raise InputError(str(exc)) from None
        except ValueError as exc:
            raise InputError(str(exc)) from None
        self.entities = build_entity_map(labels, ego_tags, group=cfg.group_entities)
        self.net = build_mtn(self.records, self.entities)
        log.info("built %r from %d transfers", self.net, len(self.records))
        return self

    def prepare_out(self):
        self.out.mkdir(parents=True, exist_ok=True)
        (self.out / "config.toml").write_text(self.config.to_toml(), encoding="utf-8")

    # analyses

    def scores(self):
        if self._pr is None:
            c = self.config
            if self.net.n_nodes == 0:
                self._pr = self._cr = None
                return None, None
            self._pr = cen.pagerank(self.net, c.damping, c.tol, c.max_iter)
            self._cr = cen.cheirank(self.net, c.damping, c.tol, c.max_iter)
        return self._pr, self._cr

    def partition(self):
        if self._partition is None and self.net.n_nodes:
            g = com.project_undirected(self.net)
            self._partition = com.louvain(g, self.config.louvain_resolution, self.config.seed)
        return self._partition


def cmd_build(run: Run) -> int:
    run.prepare_out()
    with open(run.out / "nodes.csv", "w", newline="", encoding="utf-8") as nf, \
            open(run.out / "edges.csv", "w", newline="", encoding="utf-8") as ef:
        write_dump(run.net, nf, ef)
    _write_json(run.out / "stats.json", network_stats(run.net))
    return EXIT_OK


def _node_key(node) -> str:
    return f"{node.entity}|{node.token}"


def _analyze_centrality(run: Run) -> bool:
    pr, cr = run.scores()
    cfg = run.config
    if pr is None:
        for name in ("scores_node.csv", "scores_user.csv", "scores_token.csv"):
            _write_csv(run.out / name, ["key", "pagerank", "cheirank", "pctb"], [])
        _write_csv(run.out / "top10.csv", ["level", "rank", "pagerank_key", "pagerank",
                                           "cheirank_key", "cheirank"], [])
        _write_json(run.out / "centrality.json", {"converged": True, "nodes": 0})
        return True
    pr_u, cr_u = cen.aggregate(pr, "user"), cen.aggregate(cr, "user")
    pr_t, cr_t = cen.aggregate(pr, "token"), cen.aggregate(cr, "token")
    b_u, b_t = cen.pctb(pr_u, cr_u), cen.pctb(pr_t, cr_t)
    b_ut = cen.pctb_ut(pr, cr, pr_u, cr_u)
    header = ["key", "pagerank", "cheirank", "pctb"]
    _write_csv(run.out / "scores_node.csv", header,
               [(_node_key(n), float(p), float(c), b_ut[n])
                for n, p, c in zip(pr.nodes, pr.values, cr.values)])
    _write_csv(run.out / "scores_user.csv", header,
               [(u, pr_u[u], cr_u[u], b_u[u]) for u in pr_u])
    _write_csv(run.out / "scores_token.csv", header,
               [(t, pr_t[t], cr_t[t], b_t[t]) for t in pr_t])

    rows, overlap = [], {}
    pr_n = {_node_key(n): float(v) for n, v in zip(pr.nodes, pr.values)}
    cr_n = {_node_key(n): float(v) for n, v in zip(cr.nodes, cr.values)}
    for level, a, b in (("user", pr_u, cr_u), ("token", pr_t, cr_t), ("node", pr_n, cr_n)):
        top_a, top_b = cen.top_k(a, cfg.top_k), cen.top_k(b, cfg.top_k)
        for rank, ((ka, va), (kb, vb)) in enumerate(zip(top_a, top_b), start=1):
            rows.append((level, rank, ka, va, kb, vb))
        overlap[level] = cen.rbo([k for k, _ in top_a], [k for k, _ in top_b], cfg.rbo_p)
    _write_csv(run.out / "top10.csv",
               ["level", "rank", "pagerank_key", "pagerank", "cheirank_key", "cheirank"], rows)
    _write_json(run.out / "centrality.json", {
        "nodes": run.net.n_nodes,
        "damping": cfg.damping,
        "converged": bool(pr.converged and cr.converged),
        "pagerank": {"iterations": pr.iterations, "residual": pr.residual,
                     "converged": pr.converged},
        "cheirank": {"iterations": cr.iterations, "residual": cr.residual,
                     "converged": cr.converged},
        "rbo": overlap,
        "rbo_p": cfg.rbo_p,
        "top_k": cfg.top_k,
    })
    return bool(pr.converged and cr.converged)


def _analyze_backbone(run: Run) -> None:
    result = bb.extract_backbone(run.net, run.config.alpha)
    with open(run.out / "backbone_nodes.csv", "w", newline="", encoding="utf-8") as nf, \
            open(run.out / "backbone_edges.csv", "w", newline="", encoding="utf-8") as ef:
        write_dump(result.network, nf, ef, kept_by=result.kept_by())
    _write_json(run.out / "backbone_stats.json", bb.backbone_stats(result))


def _analyze_scc(run: Run) -> None:
    if run.config.group:
        group = resolve_group(run.config.group, run.entities)
    else:
        group = {u for u in run.entities.names if run.entities.is_ego(u)}
    summary = st.annotate_diameters(run.net, st.scc_decomposition(run.net, group))
    _write_csv(run.out / "scc.csv",
               ["component_id", "size", "users", "token", "diameter", "has_ego_group"],
               [(i, c.size, c.users, c.token, c.diameter, int(c.has_group))
                for i, c in enumerate(summary.components)])
    hist, frac = st.diameter_distribution(summary)
    largest = summary.largest()
    report = {
        "components": len(summary.components),
        "non_singleton_components": sum(c.size > 1 for c in summary.components),
        "diameter_distribution": {str(k): v for k, v in hist.items()},
        "fraction_with_group": frac,
    }
    if largest is not None:
        members = set(largest.nodes)
        sub = run.net.subnetwork([(s, d) for (s, d) in run.net.edges
                                  if s in members and d in members])
        report["largest"] = {**network_stats(sub), "diameter": largest.diameter,
                             "token": largest.token, "N": largest.size}
    _write_json(run.out / "scc_summary.json", report)
    rows = []
    if run.net.n_nodes:
        for direction in ("in", "out"):
            rows += [(direction, d, f) for d, f in degree_ccdf(run.net, direction)]
    _write_csv(run.out / "degree_ccdf.csv", ["direction", "degree", "fraction"], rows)


def _analyze_communities(run: Run) -> None:
    part = run.partition()
    rows = []
    meta = {"resolution": run.config.louvain_resolution, "seed": run.config.seed,
            "modularity": None, "communities": 0}
    if part is not None:
        rows = [(n.entity, n.token, c) for n, c in zip(run.net.nodes, part.membership)]
        meta.update(modularity=part.modularity, communities=part.n_communities)
    _write_csv(run.out / "partition.csv", ["entity", "token", "community"], rows)
    _write_json(run.out / "partition.json", meta)


def cmd_analyze(run: Run, which, allow_unconverged: bool = False) -> int:
    run.prepare_out()
    which = list(dict.fromkeys(which))
    converged = True
    if "centrality" in which or "pctb" in which:
        converged = _analyze_centrality(run)
    if "backbone" in which:
        _analyze_backbone(run)
    if "scc" in which:
        _analyze_scc(run)
    if "communities" in which:
        _analyze_communities(run)
    if not converged and not allow_unconverged:
        raise Unconverged("PageRank did not converge; rerun with --allow-unconverged "
                          "or raise max_iter")
    return EXIT_OK


def _nearest(name: str, candidates, n: int = 5, cutoff: float = 0.75) -> list[str]:
    """Closest candidates by similarity to the whole name or to its same-length prefix."""
    key = name.lower()

    def score(c):
        c = c.lower()
        return max(difflib.SequenceMatcher(None, key, c).ratio(),
                   difflib.SequenceMatcher(None, key, c[:len(key)]).ratio())

    scored = [(score(c), c) for c in candidates]
    scored = [t for t in scored if t[0] >= cutoff]
    scored.sort(key=lambda t: (-t[0], len(t[1]), t[1]))
    return [c for _, c in scored[:n]]


def resolve_group(names, entities) -> set[str]:
    """Map group names to entity ids.

    A name matches an entity whose display name equals it, or starts with it
    followed by a space (``Alameda Research`` covers ``Alameda Research 12``).
    """
    display = {eid: entities.name(eid) for eid in entities.names}
    found = set()
    for name in names:
        hits = {eid for eid, d in display.items()
                if d == name or eid == name or d.startswith(name + " ")}
        if not hits:
            families = set(display.values())
            families |= {re.sub(r"\s+\d+$", "", d) for d in display.values()}
            close = _nearest(name, families)
            hint = f"; did you mean: {', '.join(close)}" if close else ""
            raise InputError(f"unknown group {name!r}{hint}")
        found |= hits
    return found


def _series_rows(series, group, cfg, tokens):
    rows = []

    def add(w, metric, key, value):
        rows.append((w.start.date().isoformat(), w.end.date().isoformat(), metric, key, value))

    gkey = "+".join(cfg.group)
    for w, (n, e, tx), (fe, ft), (gi, go, gt) in zip(
            series, tmp.size_series(series), tmp.novelty_ratios(series),
            tmp.ego_activity(series, group)):
        add(w, "nodes", "", n)
        add(w, "edges", "", e)
        add(w, "transactions", "", tx)
        add(w, "new_entity_fraction", "", fe)
        add(w, "new_token_fraction", "", ft)
        add(w, "group_in_edges", gkey, gi)
        add(w, "group_out_edges", gkey, go)
        add(w, "group_transactions", gkey, gt)
    by_start = {w.start: w for w in series}
    for start, p, ps, b in tmp.group_centrality_series(series, group, cfg.damping, cfg.tol,
                                                       cfg.max_iter):
        w = by_start[start]
        add(w, "group_pagerank", gkey, p)
        add(w, "group_cheirank", gkey, ps)
        add(w, "group_pctb", gkey, b)
    for start, per_token in tmp.token_pctb_series(series, group, tokens, cfg.damping, cfg.tol,
                                                  cfg.max_iter):
        w = by_start[start]
        for token, b in per_token.items():
            add(w, "group_token_pctb", token, b)
    return rows


def cmd_temporal(run: Run) -> int:
    cfg = run.config
    if not cfg.group:
        raise UsageError("temporal needs at least one --group")
    group = resolve_group(cfg.group, run.entities)
    run.prepare_out()
    header = ["window_start", "window_end", "metric", "key", "value"]
    if run.net.n_nodes:
        tokens = tmp.default_group_tokens(run.net, group, cfg.top_k, cfg.damping, cfg.tol,
                                          cfg.max_iter)
    else:
        tokens = []
    series = tmp.snapshot_series(run.records, cfg.resolution, run.entities)
    rows = _series_rows(series, group, cfg, tokens) if len(series) else []
    _write_csv(run.out / "timeseries.csv", header, rows)

    daily = series if cfg.resolution == "day" else tmp.snapshot_series(
        run.records, "day", run.entities)
    daily_rows = _series_rows(daily, group, cfg, tokens) if len(daily) else []
    values: dict[tuple[str, str], dict[date, float]] = {}
    for start, _, metric, key, value in daily_rows:
        if isinstance(value, float) and math.isnan(value):
            continue
        values.setdefault((metric, key), {})[date.fromisoformat(start)] = value
    avg_rows = []
    for (metric, key), by_day in values.items():
        for month, mean in tmp.monthly_average(by_day).items():
            end = tmp.window_end(datetime(month.year, month.month, 1), "month").date()
            avg_rows.append((month.isoformat(), end.isoformat(), metric, key, mean))
    avg_rows.sort(key=lambda r: (r[0], r[2], r[3]))
    _write_csv(run.out / "timeseries_monthly_avg.csv", header, avg_rows)
    _write_json(run.out / "temporal.json", {
        "group": cfg.group, "group_entities": sorted(group), "tokens": tokens,
        "resolution": cfg.resolution, "windows": len(series),
    })
    return EXIT_OK


def cmd_export(run: Run, fmt: str, backbone_only: bool) -> int:
    run.prepare_out()
    pr, _ = run.scores()
    part = run.partition()
    net, kept_by = run.net, None
    pagerank = list(pr.values) if pr is not None else None
    community = list(part.membership) if part is not None else None
    if backbone_only:
        result = bb.extract_backbone(run.net, run.config.alpha)
        net, kept_by = result.network, result.kept_by()
        idx = [run.net.index[n] for n in net.nodes]
        pagerank = [pagerank[i] for i in idx] if pagerank is not None else None
        community = [community[i] for i in idx] if community is not None else None
    name = ("backbone" if backbone_only else "network") + "." + fmt
    with open(run.out / name, "w", encoding="utf-8") as fh:
        write_graph(net, fh, fmt, pagerank=pagerank, community=community, kept_by=kept_by)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat TOML run configuration")
    common.add_argument("--out-dir", help="output directory")
    common.add_argument("--group-entities", choices=("on", "off"),
                        help="group addresses into entities by name-tag prefix")
    common.add_argument("--seed", type=int, help="Louvain seed")
    common.add_argument("--transfers")
    common.add_argument("--labels")
    common.add_argument("--ego-tags")
    common.add_argument("--allowlist")
    common.add_argument("--damping", type=float)
    common.add_argument("--tol", type=float)
    common.add_argument("--max-iter", type=int)
    common.add_argument("--alpha", type=float)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="egomtn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("build", parents=[common], help="build the network and its stats")
    an = sub.add_parser("analyze", parents=[common], help="centrality, backbone, SCC, communities")
    an.add_argument("--which", default=",".join(ANALYSES),
                    help=f"comma-separated subset of {','.join(ANALYSES)}")
    an.add_argument("--allow-unconverged", action="store_true")
    te = sub.add_parser("temporal", parents=[common], help="snapshot time series")
    te.add_argument("--group", action="append", help="entity group name (repeatable)")
    te.add_argument("--resolution", choices=tmp.RESOLUTIONS)
    ex = sub.add_parser("export", parents=[common], help="GEXF/DOT export")
    ex.add_argument("--format", choices=("gexf", "dot"), default="gexf")
    ex.add_argument("--backbone", action="store_true", help="export only the backbone")
    return parser


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    overrides = {
        "out_dir": args.out_dir,
        "seed": args.seed,
        "transfers": args.transfers,
        "labels": args.labels,
        "ego_tags": args.ego_tags,
        "allowlist": args.allowlist,
        "damping": args.damping,
        "tol": args.tol,
        "max_iter": args.max_iter,
        "alpha": args.alpha,
        "group": getattr(args, "group", None),
        "resolution": getattr(args, "resolution", None),
    }
    if args.group_entities is not None:
        overrides["group_entities"] = args.group_entities == "on"
    for key in ("transfers", "labels", "ego_tags", "allowlist", "out_dir"):
        if overrides[key] is not None:
            overrides[key] = str(Path(overrides[key]).resolve())
    return cfg.merged(**overrides).validate()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        try:
            cfg = _config_from_args(args)
        except FileNotFoundError as exc:
            raise InputError(f"config file not found: {exc.filename}") from None
        except (ValueError, TypeError, tomllib.TOMLDecodeError) as exc:
            raise UsageError(str(exc)) from None
        run = Run(cfg).load()
        if args.command == "build":
            return cmd_build(run)
        if args.command == "analyze":
            which = [w.strip() for w in args.which.split(",") if w.strip()]
            bad = [w for w in which if w not in ANALYSES]
            if bad:
                raise UsageError(f"unknown analyses {bad}; choose from {ANALYSES}")
            return cmd_analyze(run, which, args.allow_unconverged)
        if args.command == "temporal":
            return cmd_temporal(run)
        if args.command == "export":
            return cmd_export(run, args.format, args.backbone)
    except UsageError as exc:
        print(f"egomtn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"egomtn: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"egomtn: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Unconverged as exc:
        print(f"egomtn: {exc}", file=sys.stderr)
        return EXIT_UNCONVERGED
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
