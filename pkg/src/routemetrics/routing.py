"""Route discovery and selection.

Candidate routes come from exhaustive, deterministic enumeration of
simple paths; selection returns the route minimizing the chosen metric.
For the link-additive metrics (universal, OSPF, RIP) a Dijkstra search
finds the same minimum without enumerating, and a synchronous
Bellman-Ford iteration reproduces RIP's distance-vector hop counts.
EIGRP is deliberately *not* given a Dijkstra path: its bottleneck
bandwidth term is not additive over links, so only enumeration is
correct (the test suite exhibits a topology where no per-link weighting
reproduces the EIGRP ranking).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

from .errors import MetricDomainError, PathCapExceeded, TopologyError, UnreachableError
from .metrics import (
    MetricKind,
    MetricParams,
    MetricValue,
    evaluate_metric,
    hop_buffer,
)
from .model import Link, Route, Topology

__all__ = [
    "PathQuery",
    "RankedRoutes",
    "DEFAULT_MAX_PATHS",
    "RIP_INFINITY",
    "enumerate_simple_paths",
    "best_route",
    "rank_routes",
    "additive_link_weight",
    "dijkstra_additive",
    "distance_vector_converge",
]

DEFAULT_MAX_PATHS = 10000

#: Conventional RIP "infinity": 16 hops means unreachable.
RIP_INFINITY = 16


@dataclass(frozen=True)
class PathQuery:
    """A route-selection request: endpoints, metric, tunables, and caps."""

    source: str
    destination: str
    metric: MetricKind = MetricKind.UNIVERSAL
    params: MetricParams = field(default_factory=MetricParams)
    max_paths: int = DEFAULT_MAX_PATHS
    max_hops: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "source", str(self.source))
        object.__setattr__(self, "destination", str(self.destination))
        if self.source == self.destination:
            raise TopologyError("source and destination must differ")
        if self.max_paths < 1:
            raise TopologyError(f"max_paths must be at least 1, got {self.max_paths}")
        if self.max_hops is not None and self.max_hops < 1:
            raise TopologyError(f"max_hops must be at least 1, got {self.max_hops}")


@dataclass(frozen=True)
class RankedRoutes:
    """Routes with their metric values, ascending; ties broken by fewer
    hops, then by lexicographically smaller node sequence."""

    entries: tuple[tuple[Route, MetricValue], ...]

    @property
    def best(self) -> tuple[Route, MetricValue]:
        return self.entries[0]

    def __iter__(self) -> Iterator[tuple[Route, MetricValue]]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def _require_node(topology: Topology, node) -> str:
    node = str(node)
    if not topology.has_node(node):
        raise TopologyError(f"unknown node {node!r}")
    return node


def enumerate_simple_paths(topology: Topology, source, destination,
                           max_hops: int | None = None,
                           max_paths: int = DEFAULT_MAX_PATHS) -> list[Route]:
    """All loop-free routes from source to destination, depth-first.

    Neighbors are explored in (destination node, link id) order, so the
    result order is deterministic.  Finding more than ``max_paths``
    routes raises :class:`PathCapExceeded` carrying the ones found.
    """
    source = _require_node(topology, source)
    destination = _require_node(topology, destination)
    found: list[Route] = []

    def extend(node: str, visited: set[str], trail: list[Link]) -> None:
        if node == destination:
            if trail:
                if len(found) >= max_paths:
                    raise PathCapExceeded(max_paths, found)
                nodes = (trail[0].src,) + tuple(l.dst for l in trail)
                found.append(Route(tuple(l.link_id for l in trail), nodes))
            return
        if max_hops is not None and len(trail) >= max_hops:
            return
        for link in topology.out_links(node):
            if link.dst in visited:
                continue
            visited.add(link.dst)
            trail.append(link)
            extend(link.dst, visited, trail)
            trail.pop()
            visited.remove(link.dst)

    extend(source, {source}, [])
    return found


def rank_routes(entries: Sequence[tuple[Route, MetricValue]]) -> tuple[tuple[Route, MetricValue], ...]:
    """Sort (route, value) pairs by value, then hops, then node sequence."""
    return tuple(sorted(entries, key=lambda e: (e[1].value, e[0].hops, e[0].nodes)))


def best_route(topology: Topology, query: PathQuery) -> RankedRoutes:
    """Evaluate the query's metric on every candidate route and rank them.

    The head of the result is the metric's argmin under the documented
    tie-break.  Candidates are all simple paths within the query's caps.
    """
    paths = enumerate_simple_paths(topology, query.source, query.destination,
                                   max_hops=query.max_hops, max_paths=query.max_paths)
    if not paths:
        raise UnreachableError(
            f"unreachable destination: no route from {query.source!r} "
            f"to {query.destination!r}")
    entries = [(route, evaluate_metric(query.metric, route, topology, query.params))
               for route in paths]
    return RankedRoutes(rank_routes(entries))


def additive_link_weight(kind: MetricKind,
                         params: MetricParams | None = None) -> Callable[[Link], float]:
    """Per-link weight function whose sum over a route equals the metric.

    Defined for the link-additive kinds only: universal (per-hop
    in-flight traffic term), universal_dmax, OSPF (reference/available)
    and RIP (1 per hop).  EIGRP has no such decomposition.
    """
    if params is None:
        params = MetricParams()
    if kind is MetricKind.UNIVERSAL:
        policy = params.policy

        def weight(link: Link) -> float:
            p = link.params
            return p.served * (p.delay + p.loss * hop_buffer(policy, p))
        return weight
    if kind is MetricKind.UNIVERSAL_DMAX:
        if params.dmax is None:
            raise MetricDomainError("universal_dmax needs params.dmax")
        dmax = params.dmax

        def weight(link: Link) -> float:
            p = link.params
            if dmax < p.delay:
                raise MetricDomainError(
                    f"deadline below hop delay: dmax={dmax} < delay={p.delay}")
            return p.served * ((1.0 - p.loss) * p.delay + p.loss * dmax)
        return weight
    if kind is MetricKind.OSPF:
        reference = params.reference_bandwidth

        def weight(link: Link) -> float:
            if link.params.available == 0:
                raise MetricDomainError(
                    f"zero available bandwidth on link {link.link_id!r}")
            return reference / link.params.available
        return weight
    if kind is MetricKind.RIP:
        return lambda link: 1.0
    raise MetricDomainError(f"{kind.value} is not link-additive; use best_route")


def dijkstra_additive(topology: Topology, source, destination,
                      edge_weight: Callable[[Link], float]) -> Route:
    """Minimum-total-weight route under a non-negative per-link weight.

    Ties are broken deterministically (fewer hops, then lexicographic
    node sequence, then link ids), matching :func:`best_route`.
    """
    source = _require_node(topology, source)
    destination = _require_node(topology, destination)
    if source == destination:
        raise TopologyError("source and destination must differ")
    heap: list[tuple[float, int, tuple[str, ...], tuple[str, ...]]] = [
        (0.0, 0, (source,), ())]
    settled: set[str] = set()
    while heap:
        dist, hops, nodes, link_ids = heapq.heappop(heap)
        node = nodes[-1]
        if node in settled:
            continue
        settled.add(node)
        if node == destination:
            return Route(link_ids, nodes)
        for link in topology.out_links(node):
            if link.dst in settled:
                continue
            weight = edge_weight(link)
            if weight < 0:
                raise MetricDomainError(
                    f"negative edge weight {weight} on link {link.link_id!r}")
            heapq.heappush(heap, (dist + weight, hops + 1,
                                  nodes + (link.dst,), link_ids + (link.link_id,)))
    raise UnreachableError(
        f"unreachable destination: no route from {source!r} to {destination!r}")


def distance_vector_converge(topology: Topology, destination,
                             infinity: int = RIP_INFINITY) -> dict[str, tuple[str | None, int]]:
    """Synchronous Bellman-Ford rounds toward one destination.

    Every node starts at ``infinity`` (RIP convention: 16 means
    unreachable) and each round recomputes its distance from its
    neighbors' previous-round values, until a fixpoint; this takes at
    most one round per node.  Returns ``{node: (next_hop, hop_count)}``
    with ``(None, 0)`` at the destination and ``(None, infinity)`` for
    unreachable nodes.
    """
    destination = _require_node(topology, destination)
    table: dict[str, tuple[str | None, int]] = {
        node: (None, infinity) for node in topology.nodes}
    table[destination] = (None, 0)
    for _ in range(len(topology.nodes)):
        updated: dict[str, tuple[str | None, int]] = {}
        changed = False
        for node in topology.nodes:
            if node == destination:
                updated[node] = (None, 0)
                continue
            best_hops = infinity
            best_next: str | None = None
            # out_links are sorted by (dst, link_id): the first minimal
            # candidate is also the lexicographically smallest next hop.
            for link in topology.out_links(node):
                candidate = min(1 + table[link.dst][1], infinity)
                if candidate < best_hops:
                    best_hops = candidate
                    best_next = link.dst
            updated[node] = (best_next, best_hops)
            if updated[node] != table[node]:
                changed = True
        table = updated
        if not changed:
            break
    return table
