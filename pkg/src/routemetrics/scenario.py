"""Topology files, random topologies, and the canonical demo scenario.

The file format is line-oriented, UTF-8, hand-writable and diffable::

    # comment
    node A
    node B
    link l1 A B cap=10M bw=4M delay=2ms loss=0 jitter=0
    link l2 A B cap=10M bw=4M delay=2ms loss=0 jitter=1ms mtu=9000 duplex

``node <id>`` declares a router (before any link that uses it).
``link <id> <from> <to>`` takes ``key=value`` fields: ``cap`` and ``bw``
are rates (plain bits/s or with a k/M/G suffix), ``delay`` and
``jitter`` are times (plain seconds or with an s/ms/us suffix), ``loss``
is a plain fraction and ``mtu`` a plain integer (optional, default
1500).  All of cap, bw, delay, loss and jitter are required.  A bare
``duplex`` token expands the line into two directed links ``<id>_fwd``
and ``<id>_rev`` with equal parameters.  ``#`` starts a comment.

Serialization is canonical: nodes sorted, links sorted by id, one line
per directed link, values rendered with the largest suffix that
round-trips exactly.  ``parse_topology(serialize_topology(t)) == t``
for every valid topology.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TopologyError, TopologyParseError
from .model import Link, LinkParams, Topology

__all__ = [
    "parse_rate",
    "parse_time",
    "format_rate",
    "format_time",
    "parse_topology",
    "serialize_topology",
    "RandomSpec",
    "generate_random",
    "build_fig3_scenario",
]

_RATE_SUFFIXES = (("G", 1e9), ("M", 1e6), ("k", 1e3))
# Longest suffix first so "ms"/"us" are not misread as "s".
_TIME_SUFFIXES = (("ms", 1e-3), ("us", 1e-6), ("s", 1.0))

_LINK_KEYS = ("cap", "bw", "delay", "loss", "jitter", "mtu")
_REQUIRED_KEYS = ("cap", "bw", "delay", "loss", "jitter")


def _parse_suffixed(text: str, suffixes, what: str) -> float:
    for suffix, factor in suffixes:
        if text.endswith(suffix):
            number = text[:-len(suffix)]
            break
    else:
        number, factor = text, 1.0
    try:
        return float(number) * factor
    except ValueError:
        raise ValueError(f"cannot parse {what} {text!r}") from None


def parse_rate(text: str) -> float:
    """Parse a data rate: plain bits/s, or suffixed with k, M or G."""
    return _parse_suffixed(text, _RATE_SUFFIXES, "rate")


def parse_time(text: str) -> float:
    """Parse a duration: plain seconds, or suffixed with s, ms or us."""
    return _parse_suffixed(text, _TIME_SUFFIXES, "time")


def _canonical_number(value: float) -> str:
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def _format_suffixed(value: float, suffixes) -> str:
    if value == 0:
        return "0"
    # Largest suffix whose scaled value is >= 1 and reparses to exactly
    # the original float; otherwise fall back to the plain base unit,
    # which always round-trips (repr is exact).
    for suffix, factor in sorted(suffixes, key=lambda s: -s[1]):
        scaled = value / factor
        if scaled < 1:
            continue
        text = _canonical_number(scaled)
        if float(text) * factor == value:
            return text + suffix
    return _canonical_number(value)


def format_rate(value: float) -> str:
    """Render a rate with the largest exact SI suffix (150000 -> "150k")."""
    return _format_suffixed(value, _RATE_SUFFIXES)


def format_time(value: float) -> str:
    """Render a duration with the largest exact suffix (0.002 -> "2ms")."""
    return _format_suffixed(value, _TIME_SUFFIXES)


def _parse_link_line(tokens: list[str], lineno: int, known_nodes: set[str]):
    if len(tokens) < 4:
        raise TopologyParseError(
            lineno, "link line needs: link <id> <from> <to> key=value...")
    link_id, src, dst = tokens[1], tokens[2], tokens[3]
    for endpoint in (src, dst):
        if endpoint not in known_nodes:
            raise TopologyParseError(lineno, f"unknown node {endpoint!r}")
    duplex = False
    fields: dict[str, str] = {}
    for token in tokens[4:]:
        if token == "duplex":
            duplex = True
            continue
        key, sep, raw = token.partition("=")
        if not sep:
            raise TopologyParseError(lineno, f"expected key=value, got {token!r}")
        if key not in _LINK_KEYS:
            raise TopologyParseError(lineno, f"unknown key {key!r}")
        if key in fields:
            raise TopologyParseError(lineno, f"duplicate key {key!r}")
        fields[key] = raw
    for key in _REQUIRED_KEYS:
        if key not in fields:
            raise TopologyParseError(lineno, f"missing key {key!r}")
    try:
        params = LinkParams(
            capacity=parse_rate(fields["cap"]),
            available=parse_rate(fields["bw"]),
            delay=parse_time(fields["delay"]),
            loss=float(fields["loss"]),
            jitter=parse_time(fields["jitter"]),
            mtu=int(fields["mtu"]) if "mtu" in fields else 1500,
        )
    except (TopologyError, ValueError) as exc:
        raise TopologyParseError(lineno, str(exc)) from None
    if duplex:
        return [Link(f"{link_id}_fwd", src, dst, params),
                Link(f"{link_id}_rev", dst, src, params)]
    return [Link(link_id, src, dst, params)]


def parse_topology(text: str) -> Topology:
    """Parse a topology file; errors carry the offending line number."""
    nodes: set[str] = set()
    links: list[Link] = []
    seen_ids: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        record = tokens[0]
        if record == "node":
            if len(tokens) != 2:
                raise TopologyParseError(lineno, "node line needs exactly one identifier")
            nodes.add(tokens[1])
        elif record == "link":
            try:
                new_links = _parse_link_line(tokens, lineno, nodes)
            except TopologyError as exc:
                if isinstance(exc, TopologyParseError):
                    raise
                raise TopologyParseError(lineno, str(exc)) from None
            for link in new_links:
                if link.link_id in seen_ids:
                    raise TopologyParseError(
                        lineno, f"duplicate link id {link.link_id!r}")
                seen_ids.add(link.link_id)
            links.extend(new_links)
        else:
            raise TopologyParseError(lineno, f"unknown record type {record!r}")
    try:
        return Topology(tuple(nodes), tuple(links))
    except TopologyError as exc:
        # Structural problems not attributable to one line (should not
        # happen after per-line checks, but keep the message honest).
        raise TopologyError(f"invalid topology: {exc}") from None


def serialize_topology(topology: Topology) -> str:
    """Canonical text for a topology; parsing it back yields an equal one."""
    lines = [f"node {node}" for node in topology.nodes]
    for link in topology.links:
        p = link.params
        parts = [
            f"link {link.link_id} {link.src} {link.dst}",
            f"cap={format_rate(p.capacity)}",
            f"bw={format_rate(p.available)}",
            f"delay={format_time(p.delay)}",
            f"loss={_canonical_number(p.loss)}",
            f"jitter={format_time(p.jitter)}",
        ]
        if p.mtu != 1500:
            parts.append(f"mtu={p.mtu}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class RandomSpec:
    """Parameters for seeded random-topology generation.

    Each ordered node pair gets a link with probability
    ``edge_probability``; link parameters are drawn uniformly from the
    ranges, with available bandwidth drawn as a fraction of capacity so
    the model invariants hold by construction.  Identical specs
    (including ``seed``) generate identical topologies.
    """

    node_count: int
    edge_probability: float
    seed: int
    capacity_range: tuple[float, float] = (1e6, 1e8)
    available_ratio_range: tuple[float, float] = (0.1, 1.0)
    delay_range: tuple[float, float] = (0.001, 0.05)
    loss_range: tuple[float, float] = (0.0, 0.05)
    jitter_range: tuple[float, float] = (0.0, 0.005)

    def __post_init__(self):
        if self.node_count < 2:
            raise TopologyError(f"node_count must be at least 2, got {self.node_count}")
        if not 0.0 < self.edge_probability <= 1.0:
            raise TopologyError(
                f"edge_probability must lie in (0, 1], got {self.edge_probability}")
        if not 0 <= self.seed < 2 ** 64:
            raise TopologyError("seed must be a 64-bit unsigned integer")
        for name, (low, high) in (
                ("capacity_range", self.capacity_range),
                ("available_ratio_range", self.available_ratio_range),
                ("delay_range", self.delay_range),
                ("loss_range", self.loss_range),
                ("jitter_range", self.jitter_range)):
            if not low <= high:
                raise TopologyError(f"{name} is reversed: {low} > {high}")
        if self.capacity_range[0] <= 0:
            raise TopologyError("capacity range must be positive")
        if not (0.0 <= self.available_ratio_range[0]
                and self.available_ratio_range[1] <= 1.0):
            raise TopologyError("available ratio range must lie within [0, 1]")
        if not (0.0 <= self.loss_range[0] and self.loss_range[1] <= 1.0):
            raise TopologyError("loss range must lie within [0, 1]")
        if self.delay_range[0] < 0 or self.jitter_range[0] < 0:
            raise TopologyError("delay and jitter ranges must be non-negative")


def generate_random(spec: RandomSpec) -> Topology:
    """Seeded random topology; a pure function of ``spec``.

    Uses numpy's PCG64 generator.  Node pairs are visited in sorted
    order with one probability draw each, then five parameter draws per
    created link, so outputs are reproducible for a given spec.
    """
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    width = len(str(spec.node_count - 1))
    nodes = tuple(f"n{str(i).zfill(width)}" for i in range(spec.node_count))
    links = []
    for src in nodes:
        for dst in nodes:
            if src == dst:
                continue
            if rng.random() >= spec.edge_probability:
                continue
            capacity = rng.uniform(*spec.capacity_range)
            ratio = rng.uniform(*spec.available_ratio_range)
            params = LinkParams(
                capacity=capacity,
                available=capacity * ratio,
                delay=rng.uniform(*spec.delay_range),
                loss=rng.uniform(*spec.loss_range),
                jitter=rng.uniform(*spec.jitter_range),
            )
            links.append(Link(f"{src}-{dst}", src, dst, params))
    return Topology(nodes, tuple(links))


def build_fig3_scenario() -> Topology:
    """The canonical hop-count-vs-speed comparison scenario.

    Source S reaches destination T two ways: a direct 2-hop path over
    slow, heavily used links, and a 4-hop detour over a fast, lightly
    loaded backbone.  The constants are chosen (and verified in the
    test suite) so that hop-count routing prefers the short slow path
    while both OSPF cost and the traffic metric prefer the backbone:

    * direct hops:   cap 150k, bw 100k, delay 50ms  -> traffic 2500 bits/hop
    * backbone hops: cap 12M,  bw 11.5M, delay 2ms  -> traffic 1000 bits/hop

    giving RIP 2 vs 4 (direct wins), OSPF 20 vs ~0.35 (backbone wins),
    and traffic 5000 vs 4000 bits (backbone wins).
    """
    direct = LinkParams(capacity=150e3, available=100e3, delay=0.050,
                        loss=0.0, jitter=0.001)
    backbone = LinkParams(capacity=12e6, available=11.5e6, delay=0.002,
                          loss=0.0, jitter=0.001)
    nodes = ("S", "A", "B1", "B2", "B3", "T")
    links = (
        Link("d1", "S", "A", direct),
        Link("d2", "A", "T", direct),
        Link("b1", "S", "B1", backbone),
        Link("b2", "B1", "B2", backbone),
        Link("b3", "B2", "B3", backbone),
        Link("b4", "B3", "T", backbone),
    )
    return Topology(nodes, links)
