"""Strongly connected components and their hop diameters."""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field

from .mtn import MultiTokenNetwork


@dataclass
class Component:
    nodes: list[int]
    users: int
    token: str
    diameter: int | None = None
    has_ego: bool = False
    has_group: bool = False

    @property
    def size(self) -> int:
        return len(self.nodes)


@dataclass
class SccSummary:
    components: list[Component] = field(default_factory=list)

    def largest(self) -> Component | None:
        return self.components[0] if self.components else None

    def labels(self, n: int) -> list[int]:
        out = [-1] * n
        for cid, comp in enumerate(self.components):
            for i in comp.nodes:
                out[i] = cid
        return out


def strongly_connected_components(succ: list[list[int]]) -> list[list[int]]:
    """Tarjan's algorithm with an explicit call stack.

    ``succ`` is an adjacency list over nodes ``0..n-1``. Components come out
    in reverse topological order, each sorted ascending.
    """
    n = len(succ)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pos = work.pop()
            if pos == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            else:
                # returning from child succ[v][pos - 1]
                w = succ[v][pos - 1]
                low[v] = min(low[v], low[w])
            recurse = False
            nbrs = succ[v]
            while pos < len(nbrs):
                w = nbrs[pos]
                pos += 1
                if index[w] == -1:
                    work.append((v, pos))
                    work.append((w, 0))
                    recurse = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    return comps


def scc_decomposition(net: MultiTokenNetwork, group=()) -> SccSummary:
    """Partition the network into SCCs, largest first (ties by smallest node index).

    ``group`` is an optional set of entities flagged per component.
    """
    group = set(group)
    comps = strongly_connected_components(net.successors())
    comps.sort(key=lambda c: (-len(c), c[0]))
    out = []
    for nodes in comps:
        tokens = {net.nodes[i].token for i in nodes}
        assert len(tokens) == 1, "SCC spans several token layers"
        out.append(Component(
            nodes=nodes,
            users=len({net.nodes[i].entity for i in nodes}),
            token=tokens.pop(),
            has_ego=any(net.ego[i] for i in nodes),
            has_group=any(net.nodes[i].entity in group for i in nodes),
        ))
    return SccSummary(out)


def _bfs_hops(succ: list[list[int]], start: int, allowed: set[int]) -> dict[int, int]:
    dist = {start: 0}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in succ[v]:
            if w in allowed and w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def scc_diameter(net: MultiTokenNetwork, component) -> int:
    """Longest shortest directed path, in hops, between two nodes of ``component``."""
    nodes = component.nodes if isinstance(component, Component) else list(component)
    members = set(nodes)
    if len(members) < 2:
        raise ValueError("diameter needs a component with at least two nodes")
    succ = net.successors()
    best = 0
    for v in nodes:
        dist = _bfs_hops(succ, v, members)
        if len(dist) != len(members):
            raise ValueError("component is not strongly connected")
        best = max(best, max(dist.values()))
    return best


def annotate_diameters(net: MultiTokenNetwork, summary: SccSummary) -> SccSummary:
    """Fill in diameters; singletons get 0."""
    for comp in summary.components:
        comp.diameter = scc_diameter(net, comp) if comp.size > 1 else 0
    return summary


def diameter_distribution(summary: SccSummary) -> tuple[dict[int, int], float]:
    """Histogram diameter -> count over non-singleton components.

    Also returns the fraction of those components that contain a member of
    the group passed to ``scc_decomposition`` (0.0 when there are none).
    """
    multi = [c for c in summary.components if c.size > 1]
    for c in multi:
        if c.diameter is None:
            raise ValueError("diameters not computed; call annotate_diameters first")
    hist = dict(sorted(Counter(c.diameter for c in multi).items()))
    frac = sum(c.has_group for c in multi) / len(multi) if multi else 0.0
    return hist, frac
