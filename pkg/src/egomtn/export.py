"""GEXF and DOT export with node and edge attributes."""
from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import IO, Mapping

from .mtn import MultiTokenNetwork

GEXF_NS = "http://www.gexf.net/1.2draft"

NODE_ATTRS = (("entity", "string"), ("token", "string"), ("is_ego", "boolean"),
              ("community", "integer"), ("pagerank", "double"))


def _node_rows(net, pagerank, community):
    for i, (node, ego) in enumerate(zip(net.nodes, net.ego)):
        yield i, {
            "entity": node.entity,
            "token": node.token,
            "is_ego": ego,
            "community": None if community is None else community[i],
            "pagerank": None if pagerank is None else float(pagerank[i]),
        }


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_gexf(net: MultiTokenNetwork, sink: IO[str], pagerank=None, community=None,
               kept_by: Mapping[tuple[int, int], str] | None = None) -> None:
    """Write a GEXF 1.2 document. Only attributes that were supplied are declared."""
    node_attrs = [(n, t) for n, t in NODE_ATTRS
                  if not (n == "pagerank" and pagerank is None)
                  and not (n == "community" and community is None)]
    root = ET.Element("gexf", {"xmlns": GEXF_NS, "version": "1.2"})
    meta = ET.SubElement(root, "meta")
    ET.SubElement(meta, "creator").text = "egomtn"
    graph = ET.SubElement(root, "graph", {"defaultedgetype": "directed", "mode": "static"})
    attrs = ET.SubElement(graph, "attributes", {"class": "node"})
    for aid, (name, kind) in enumerate(node_attrs):
        ET.SubElement(attrs, "attribute", {"id": str(aid), "title": name, "type": kind})
    if kept_by is not None:
        eattrs = ET.SubElement(graph, "attributes", {"class": "edge"})
        ET.SubElement(eattrs, "attribute", {"id": "0", "title": "kept_by", "type": "string"})

    nodes_el = ET.SubElement(graph, "nodes")
    for i, row in _node_rows(net, pagerank, community):
        el = ET.SubElement(nodes_el, "node", {"id": str(i), "label": f"{row['entity']}|{row['token']}"})
        vals = ET.SubElement(el, "attvalues")
        for aid, (name, _) in enumerate(node_attrs):
            ET.SubElement(vals, "attvalue", {"for": str(aid), "value": _fmt(row[name])})
    edges_el = ET.SubElement(graph, "edges")
    for eid, ((s, d), w) in enumerate(net.edges.items()):
        el = ET.SubElement(edges_el, "edge", {"id": str(eid), "source": str(s),
                                              "target": str(d), "weight": str(w)})
        if kept_by is not None:
            vals = ET.SubElement(el, "attvalues")
            ET.SubElement(vals, "attvalue", {"for": "0", "value": kept_by[(s, d)]})
    ET.indent(root)
    sink.write('<?xml version="1.0" encoding="UTF-8"?>\n')
    sink.write(ET.tostring(root, encoding="unicode"))
    sink.write("\n")


def _dot_quote(value) -> str:
    text = _fmt(value)
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def write_dot(net: MultiTokenNetwork, sink: IO[str], pagerank=None, community=None,
              kept_by: Mapping[tuple[int, int], str] | None = None) -> None:
    sink.write("digraph mtn {\n")
    for i, row in _node_rows(net, pagerank, community):
        parts = [f"label={_dot_quote(row['entity'] + '|' + row['token'])}"]
        for name, _ in NODE_ATTRS:
            if row[name] is not None:
                parts.append(f"{name}={_dot_quote(row[name])}")
        sink.write(f'  "{i}" [{", ".join(parts)}];\n')
    for (s, d), w in net.edges.items():
        parts = [f'weight="{w}"']
        if kept_by is not None:
            parts.append(f"kept_by={_dot_quote(kept_by[(s, d)])}")
        sink.write(f'  "{s}" -> "{d}" [{", ".join(parts)}];\n')
    sink.write("}\n")


def write_graph(net: MultiTokenNetwork, sink: IO[str], format: str = "gexf", **attrs) -> None:
    if format == "gexf":
        write_gexf(net, sink, **attrs)
    elif format == "dot":
        write_dot(net, sink, **attrs)
    else:
        raise ValueError(f"format must be 'gexf' or 'dot', got {format!r}")
