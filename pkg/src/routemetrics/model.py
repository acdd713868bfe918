"""Core domain types: links, topologies, routes, and dejitter policies.

Units are fixed throughout the package: bits per second for rates,
seconds for times, and a dimensionless fraction in [0, 1] for loss.
Conversions to protocol-specific units (EIGRP's kilobits and tens of
microseconds, SI suffixes in topology files) happen only at the metric
and I/O boundaries, never inside these types.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, Union

from .errors import MetricDomainError, RouteError, TopologyError

__all__ = [
    "LinkParams",
    "Link",
    "Topology",
    "Route",
    "DejitterMode",
    "DejitterPolicy",
    "validate_topology",
    "route_between",
]

#: Node and link identifiers are whitespace-free tokens so that the
#: line-oriented topology file format can round-trip them verbatim.
_IDENT_RE = re.compile(r"^[A-Za-z0-9_.:\-]+$")


def _ident(value, what: str) -> str:
    """Normalize a node or link identifier to its canonical string form."""
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise TopologyError(f"{what} must be a string or integer, got {value!r}")
    text = str(value)
    if not _IDENT_RE.match(text):
        raise TopologyError(f"invalid {what} {text!r}: identifiers are non-empty "
                            "tokens of letters, digits, '_', '.', ':' or '-'")
    return text


def _check_finite(name: str, value: float) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise TopologyError(f"{name} must be a number, got {value!r}") from None
    if not math.isfinite(value):
        raise TopologyError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class LinkParams:
    """Per-hop channel parameters.

    ``capacity`` is the maximum throughput of the hop with no competing
    traffic; ``available`` is what remains under the current cross
    traffic, so ``capacity - available`` is the traffic the hop is
    currently serving.  ``loss`` is the fraction of packets lost and
    ``jitter`` the variation of ``delay``.  ``mtu`` is carried for
    reporting but enters no metric formula.
    """

    capacity: float
    available: float
    delay: float
    loss: float = 0.0
    jitter: float = 0.0
    mtu: int = 1500

    def __post_init__(self):
        object.__setattr__(self, "capacity", _check_finite("capacity", self.capacity))
        object.__setattr__(self, "available", _check_finite("available", self.available))
        object.__setattr__(self, "delay", _check_finite("delay", self.delay))
        object.__setattr__(self, "loss", _check_finite("loss", self.loss))
        object.__setattr__(self, "jitter", _check_finite("jitter", self.jitter))
        if self.capacity <= 0:
            raise TopologyError(f"capacity must be positive, got {self.capacity}")
        if self.available < 0:
            raise TopologyError(f"available bandwidth must be non-negative, got {self.available}")
        if self.available > self.capacity:
            raise TopologyError(
                f"available bandwidth exceeds capacity ({self.available} > {self.capacity})")
        if self.delay < 0:
            raise TopologyError(f"delay must be non-negative, got {self.delay}")
        if self.jitter < 0:
            raise TopologyError(f"jitter must be non-negative, got {self.jitter}")
        if not 0.0 <= self.loss <= 1.0:
            raise TopologyError(f"loss must be a fraction in [0, 1], got {self.loss}")
        if isinstance(self.mtu, bool) or not isinstance(self.mtu, int) or self.mtu <= 0:
            raise TopologyError(f"mtu must be a positive integer, got {self.mtu!r}")

    @property
    def served(self) -> float:
        """Traffic currently served by the hop (capacity - available), never negative."""
        return self.capacity - self.available

    @property
    def utilization(self) -> float:
        """Fraction of capacity consumed by cross traffic, in [0, 1]."""
        return (self.capacity - self.available) / self.capacity


@dataclass(frozen=True)
class Link:
    """A directed point-to-point segment between two routers."""

    link_id: str
    src: str
    dst: str
    params: LinkParams

    def __post_init__(self):
        object.__setattr__(self, "link_id", _ident(self.link_id, "link id"))
        object.__setattr__(self, "src", _ident(self.src, "node id"))
        object.__setattr__(self, "dst", _ident(self.dst, "node id"))
        if not isinstance(self.params, LinkParams):
            raise TopologyError(f"link {self.link_id!r}: params must be LinkParams")
        if self.src == self.dst:
            raise TopologyError(f"link {self.link_id!r} is a self-loop on {self.src!r}")


@dataclass(frozen=True)
class Topology:
    """An immutable directed multigraph of routers and links.

    Construction canonicalizes the node and link order (sorted by
    identifier) and checks every structural invariant, so two
    topologies describing the same network compare equal regardless of
    the order their parts were supplied in.  Parallel links between the
    same node pair are allowed; an undirected physical link is modeled
    as two directed links.
    """

    nodes: tuple[str, ...]
    links: tuple[Link, ...] = ()

    def __post_init__(self):
        nodes = tuple(sorted({_ident(n, "node id") for n in self.nodes}))
        node_set = set(nodes)
        seen_ids: set[str] = set()
        links = []
        for link in self.links:
            if not isinstance(link, Link):
                link = _coerce_link(link)
            if link.link_id in seen_ids:
                raise TopologyError(f"duplicate link id {link.link_id!r}")
            seen_ids.add(link.link_id)
            for endpoint in (link.src, link.dst):
                if endpoint not in node_set:
                    raise TopologyError(
                        f"link {link.link_id!r} references unknown node {endpoint!r}")
            links.append(link)
        links.sort(key=lambda l: l.link_id)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "links", tuple(links))

    @cached_property
    def _links_by_id(self) -> dict[str, Link]:
        return {link.link_id: link for link in self.links}

    @cached_property
    def _adjacency(self) -> dict[str, tuple[Link, ...]]:
        table: dict[str, list[Link]] = {node: [] for node in self.nodes}
        for link in self.links:
            table[link.src].append(link)
        return {node: tuple(sorted(out, key=lambda l: (l.dst, l.link_id)))
                for node, out in table.items()}

    def has_node(self, node) -> bool:
        return str(node) in self._adjacency

    def link(self, link_id) -> Link:
        try:
            return self._links_by_id[str(link_id)]
        except KeyError:
            raise RouteError(f"unknown link {str(link_id)!r}") from None

    def out_links(self, node) -> tuple[Link, ...]:
        """Outgoing links of ``node``, sorted by (destination, link id)."""
        try:
            return self._adjacency[str(node)]
        except KeyError:
            raise TopologyError(f"unknown node {str(node)!r}") from None

    def links_between(self, src, dst) -> tuple[Link, ...]:
        """All parallel links from ``src`` to ``dst``."""
        return tuple(l for l in self.out_links(src) if l.dst == str(dst))


def _coerce_link(raw) -> Link:
    """Build a Link from a (id, src, dst, params) tuple or a mapping."""
    if isinstance(raw, Mapping):
        raw = (raw["link_id"], raw["src"], raw["dst"], raw["params"])
    try:
        link_id, src, dst, params = raw
    except (TypeError, ValueError):
        raise TopologyError(
            f"link description must be (link_id, src, dst, params), got {raw!r}") from None
    if isinstance(params, Mapping):
        params = LinkParams(**params)
    return Link(link_id, src, dst, params)


def validate_topology(raw: Union["Topology", Mapping, tuple]) -> Topology:
    """Validate an unvalidated topology description.

    Accepts an existing :class:`Topology` (re-validated and returned as
    an equal instance, so validation is idempotent), a mapping with
    ``nodes`` and ``links`` keys, or a ``(nodes, links)`` pair.  Link
    entries may be :class:`Link` instances, ``(id, src, dst, params)``
    tuples, or mappings; ``params`` may be :class:`LinkParams` or a
    mapping of its field names.
    """
    if isinstance(raw, Topology):
        return Topology(raw.nodes, raw.links)
    if isinstance(raw, Mapping):
        nodes = raw.get("nodes", ())
        links = raw.get("links", ())
    else:
        try:
            nodes, links = raw
        except (TypeError, ValueError):
            raise TopologyError(
                "topology description must be a Topology, a {nodes, links} "
                f"mapping, or a (nodes, links) pair; got {raw!r}") from None
    return Topology(tuple(nodes), tuple(links))


@dataclass(frozen=True)
class Route:
    """An ordered, loop-free sequence of links from source to destination.

    ``nodes`` is the visited node sequence (one longer than
    ``link_ids``).  Build routes with :func:`route_between`, which
    resolves link ids against a topology and checks chaining.
    """

    link_ids: tuple[str, ...]
    nodes: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "link_ids", tuple(str(i) for i in self.link_ids))
        object.__setattr__(self, "nodes", tuple(str(n) for n in self.nodes))
        if not self.link_ids:
            raise RouteError("a route needs at least one link")
        if len(self.nodes) != len(self.link_ids) + 1:
            raise RouteError("node sequence must be one longer than the link sequence")
        if len(set(self.nodes)) != len(self.nodes):
            raise RouteError("route revisits a node (routes must be loop-free)")

    @property
    def hops(self) -> int:
        return len(self.link_ids)

    @property
    def source(self) -> str:
        return self.nodes[0]

    @property
    def destination(self) -> str:
        return self.nodes[-1]

    def resolve(self, topology: Topology) -> tuple[Link, ...]:
        """Look up this route's links in ``topology``, re-checking the chain."""
        links = tuple(topology.link(i) for i in self.link_ids)
        chain = (links[0].src,) + tuple(l.dst for l in links)
        if chain != self.nodes:
            raise RouteError("route does not match the topology's link endpoints")
        return links


def route_between(topology: Topology, link_ids: Iterable) -> Route:
    """Build a Route from an ordered sequence of link ids.

    The links must chain head-to-tail and may not revisit a node.
    """
    ids = [str(i) for i in link_ids]
    if not ids:
        raise RouteError("a route needs at least one link")
    links = [topology.link(i) for i in ids]
    for first, second in zip(links, links[1:]):
        if first.dst != second.src:
            raise RouteError(
                f"links do not chain: {first.link_id!r} ends at {first.dst!r} "
                f"but {second.link_id!r} starts at {second.src!r}")
    nodes = (links[0].src,) + tuple(l.dst for l in links)
    return Route(tuple(ids), nodes)


class DejitterMode(Enum):
    """How the per-hop dejitter buffer duration is resolved."""

    EXPLICIT_DMAX = "explicit_dmax"
    JITTER_DERIVED = "jitter_derived"
    FIXED_FACTOR = "fixed_factor"


@dataclass(frozen=True)
class DejitterPolicy:
    """Policy for sizing the receiver-side dejitter buffer of each hop.

    * ``explicit_dmax``: a route-wide delivery deadline ``dmax``; each
      hop's buffer is ``dmax`` minus the hop delay (checked to be
      non-negative at evaluation time).
    * ``jitter_derived``: buffer sized so that the loss attributable to
      delay variation stays below ``target_loss``, i.e.
      ``-jitter * ln(target_loss)``.  The default target of 0.001 makes
      the buffer about 6.9 times the jitter, i.e. roughly seven jitters.
    * ``fixed_factor``: buffer is simply ``factor * jitter``.
    """

    mode: DejitterMode = DejitterMode.JITTER_DERIVED
    dmax: float | None = None
    target_loss: float = 0.001
    factor: float = 7.0

    def __post_init__(self):
        mode = self.mode
        if isinstance(mode, str):
            mode = DejitterMode(mode)
            object.__setattr__(self, "mode", mode)
        if mode is DejitterMode.EXPLICIT_DMAX:
            if self.dmax is None:
                raise MetricDomainError("explicit_dmax policy needs a dmax value")
            dmax = _check_finite("dmax", self.dmax)
            if dmax < 0:
                raise MetricDomainError(f"dmax must be non-negative, got {dmax}")
            object.__setattr__(self, "dmax", dmax)
        if not 0.0 < self.target_loss < 1.0:
            raise MetricDomainError(
                f"target_loss must lie strictly between 0 and 1, got {self.target_loss}")
        if not self.factor > 0:
            raise MetricDomainError(f"factor must be positive, got {self.factor}")

    @classmethod
    def explicit(cls, dmax: float) -> "DejitterPolicy":
        """Route-wide deadline: per-hop buffer is dmax minus the hop delay."""
        return cls(mode=DejitterMode.EXPLICIT_DMAX, dmax=dmax)

    @classmethod
    def from_target_loss(cls, target_loss: float = 0.001) -> "DejitterPolicy":
        """Buffer sized from each hop's jitter for a given tolerable loss."""
        return cls(mode=DejitterMode.JITTER_DERIVED, target_loss=target_loss)

    @classmethod
    def fixed_factor(cls, factor: float = 7.0) -> "DejitterPolicy":
        """Buffer is a fixed multiple of each hop's jitter."""
        return cls(mode=DejitterMode.FIXED_FACTOR, factor=factor)

