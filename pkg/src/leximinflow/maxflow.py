"""Exact maximum flow and minimum cuts on rational-capacitated networks.

Dinic's algorithm over exact rational capacities: with rational data every
augmentation is exact and termination is guaranteed, so flow values, cut
capacities, and the max-flow = min-cut identity can all be asserted with zero
tolerance.  Besides the usual source-side-minimal cut this module computes the
*source-heavy* minimum cut — the unique minimum cut whose source side contains
the source side of every other minimum cut — which the breakpoint solver needs
to pick maximal tight agent sets.

Vertices are arbitrary hashable ids.  All procedures are deterministic: edge
input order fixes the augmentation order, so identical input yields an
identical flow.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .rational import Rational, ZERO


@dataclass(frozen=True)
class FlowNetwork:
    """Directed graph with a distinguished source and sink and rational capacities."""

    vertices: tuple
    source: object
    sink: object
    edges: tuple[tuple[object, object, Rational], ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        if self.source == self.sink:
            raise ValueError("source and sink must differ")
        vertex_set = set(self.vertices)
        if len(vertex_set) != len(self.vertices):
            raise ValueError("duplicate vertex ids")
        if self.source not in vertex_set or self.sink not in vertex_set:
            raise ValueError("source and sink must be vertices")
        edges = []
        for tail, head, cap in self.edges:
            cap = Rational(cap)
            if cap < ZERO:
                raise ValueError(f"negative capacity on edge {tail!r} -> {head!r}: {cap}")
            if tail not in vertex_set or head not in vertex_set:
                raise ValueError(f"edge {tail!r} -> {head!r} references unknown vertex")
            edges.append((tail, head, cap))
        object.__setattr__(self, "edges", tuple(edges))


@dataclass(frozen=True)
class Flow:
    """Per-edge flow values aligned with ``FlowNetwork.edges``, plus the total value."""

    edge_flows: tuple[Rational, ...]
    value: Rational


@dataclass(frozen=True)
class CutResult:
    """A source/sink cut: the vertex set containing the source, and its capacity."""

    source_side: frozenset
    capacity: Rational


def flow_violations(network: FlowNetwork, flow: Flow) -> list[str]:
    """Check capacity and conservation constraints; empty list iff a valid flow."""
    violations = []
    excess = {v: ZERO for v in network.vertices}
    for (tail, head, cap), f in zip(network.edges, flow.edge_flows):
        if f < ZERO or f > cap:
            violations.append(f"edge {tail!r} -> {head!r}: flow {f} outside [0, {cap}]")
        excess[tail] -= f
        excess[head] += f
    for v in network.vertices:
        if v in (network.source, network.sink):
            continue
        if excess[v] != ZERO:
            violations.append(f"conservation violated at {v!r}: excess {excess[v]}")
    if excess[network.sink] != flow.value:
        violations.append(f"stated value {flow.value} != net flow into sink {excess[network.sink]}")
    return violations


class _Residual:
    """Arc-pair residual graph: arc 2i is edge i forward, arc 2i+1 its reverse."""

    def __init__(self, network: FlowNetwork):
        self.index = {v: i for i, v in enumerate(network.vertices)}
        n = len(network.vertices)
        self.head: list[int] = []
        self.residual: list[Rational] = []
        self.adj: list[list[int]] = [[] for _ in range(n)]
        for tail, head, cap in network.edges:
            t, h = self.index[tail], self.index[head]
            self.adj[t].append(len(self.head))
            self.head.append(h)
            self.residual.append(cap)
            self.adj[h].append(len(self.head))
            self.head.append(t)
            self.residual.append(ZERO)
        self.source = self.index[network.source]
        self.sink = self.index[network.sink]
        self.n = n

    def tail(self, arc: int) -> int:
        return self.head[arc ^ 1]

    def levels_from_source(self) -> list[int]:
        level = [-1] * self.n
        level[self.source] = 0
        queue = deque([self.source])
        while queue:
            v = queue.popleft()
            for arc in self.adj[v]:
                h = self.head[arc]
                if level[h] < 0 and self.residual[arc] > ZERO:
                    level[h] = level[v] + 1
                    queue.append(h)
        return level

    def blocking_flow(self, level: list[int]) -> Rational:
        """Push a blocking flow along level-increasing paths; returns total pushed."""
        pushed_total = ZERO
        pointer = [0] * self.n
        path: list[int] = []
        v = self.source
        while True:
            if v == self.sink:
                bottleneck = min(self.residual[arc] for arc in path)
                for arc in path:
                    self.residual[arc] -= bottleneck
                    self.residual[arc ^ 1] += bottleneck
                pushed_total += bottleneck
                for i, arc in enumerate(path):
                    if self.residual[arc] == ZERO:
                        del path[i:]
                        break
                v = self.source if not path else self.head[path[-1]]
                continue
            advanced = False
            while pointer[v] < len(self.adj[v]):
                arc = self.adj[v][pointer[v]]
                h = self.head[arc]
                if self.residual[arc] > ZERO and level[h] == level[v] + 1:
                    path.append(arc)
                    v = h
                    advanced = True
                    break
                pointer[v] += 1
            if advanced:
                continue
            if v == self.source:
                return pushed_total
            level[v] = -1
            arc = path.pop()
            v = self.tail(arc)
            pointer[v] += 1


def max_flow(network: FlowNetwork) -> Flow:
    """Compute a maximum flow (Dinic's algorithm, exact arithmetic)."""
    residual = _Residual(network)
    value = ZERO
    while True:
        level = residual.levels_from_source()
        if level[residual.sink] < 0:
            break
        value += residual.blocking_flow(level)
    edge_flows = tuple(
        cap - residual.residual[2 * i] for i, (_, _, cap) in enumerate(network.edges)
    )
    return Flow(edge_flows=edge_flows, value=value)


def _saturated_residual(network: FlowNetwork, flow: Flow) -> _Residual:
    residual = _Residual(network)
    for i, f in enumerate(flow.edge_flows):
        residual.residual[2 * i] -= f
        residual.residual[2 * i + 1] += f
    return residual


def _cut_capacity(network: FlowNetwork, source_side: frozenset) -> Rational:
    capacity = ZERO
    for tail, head, cap in network.edges:
        if tail in source_side and head not in source_side:
            capacity += cap
    return capacity


def _check_minimum(network: FlowNetwork, flow: Flow, cut: CutResult) -> CutResult:
    if cut.capacity != flow.value:
        raise ValueError(
            f"flow is not maximum: cut capacity {cut.capacity} != flow value {flow.value}"
        )
    return cut


def min_cut(network: FlowNetwork, flow: Flow) -> CutResult:
    """Source-side-minimal minimum cut: vertices reachable from the source
    in the residual graph of a maximum flow."""
    residual = _saturated_residual(network, flow)
    reachable = {residual.source}
    queue = deque([residual.source])
    while queue:
        v = queue.popleft()
        for arc in residual.adj[v]:
            h = residual.head[arc]
            if h not in reachable and residual.residual[arc] > ZERO:
                reachable.add(h)
                queue.append(h)
    source_side = frozenset(v for v in network.vertices if residual.index[v] in reachable)
    if network.sink in source_side:
        raise ValueError("flow is not maximum: sink reachable in residual graph")
    return _check_minimum(network, flow, CutResult(source_side, _cut_capacity(network, source_side)))


def source_heavy_min_cut(network: FlowNetwork, flow: Flow) -> CutResult:
    """The unique minimum cut whose source side contains every minimum cut's
    source side: the complement of the vertices that can still reach the sink
    in the residual graph."""
    residual = _saturated_residual(network, flow)
    # Walk residual arcs backwards from the sink: u joins if some arc u -> v
    # with positive residual lands inside the set.
    reaches_sink = {residual.sink}
    queue = deque([residual.sink])
    while queue:
        v = queue.popleft()
        for arc in residual.adj[v]:
            # arc^1 is the residual arc (head[arc]) -> v.
            u = residual.head[arc]
            if u not in reaches_sink and residual.residual[arc ^ 1] > ZERO:
                reaches_sink.add(u)
                queue.append(u)
    if residual.source in reaches_sink:
        raise ValueError("flow is not maximum: sink reachable in residual graph")
    source_side = frozenset(
        v for v in network.vertices if residual.index[v] not in reaches_sink
    )
    return _check_minimum(network, flow, CutResult(source_side, _cut_capacity(network, source_side)))
