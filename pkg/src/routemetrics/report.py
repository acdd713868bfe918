"""Route comparison reports and their output formats.

A :class:`RouteReport` evaluates every candidate route between two
nodes under all four metrics and marks the per-metric winner, using the
same ranking (value, then hops, then node sequence) as
:func:`routemetrics.routing.best_route`.  Three renderings are
provided: an aligned human-readable table, RFC-4180-style CSV with a
fixed column set, and a single JSON object with keys ``routes``,
``metrics`` and ``winners``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Mapping

from .metrics import MetricKind, MetricParams, MetricValue, evaluate_metric
from .routing import DEFAULT_MAX_PATHS, enumerate_simple_paths
from .errors import UnreachableError
from .model import Route, Topology

__all__ = [
    "REPORT_METRICS",
    "ReportRow",
    "RouteReport",
    "build_route_report",
    "render_report_table",
    "render_report_csv",
    "render_report_json",
]

#: Metrics included in comparison reports, in column order.
REPORT_METRICS = (MetricKind.UNIVERSAL, MetricKind.RIP,
                  MetricKind.OSPF, MetricKind.EIGRP)


@dataclass(frozen=True)
class ReportRow:
    """One candidate route with its value under every report metric."""

    route: Route
    values: Mapping[str, MetricValue]

    @property
    def nodes(self) -> tuple[str, ...]:
        return self.route.nodes

    @property
    def hops(self) -> int:
        return self.route.hops


@dataclass(frozen=True)
class RouteReport:
    """All candidate routes with per-metric values and winner indices."""

    rows: tuple[ReportRow, ...]
    winners: Mapping[str, int]


def build_route_report(topology: Topology, source, destination,
                       params: MetricParams | None = None,
                       max_paths: int = DEFAULT_MAX_PATHS,
                       max_hops: int | None = None) -> RouteReport:
    """Evaluate every metric on every candidate route between two nodes.

    Rows are ordered by (hops, node sequence).  A metric's winner is
    the row that :func:`best_route` would rank first for that metric.
    """
    paths = enumerate_simple_paths(topology, source, destination,
                                   max_hops=max_hops, max_paths=max_paths)
    if not paths:
        raise UnreachableError(
            f"unreachable destination: no route from {str(source)!r} "
            f"to {str(destination)!r}")
    if params is None:
        params = MetricParams()
    rows = []
    for route in sorted(paths, key=lambda r: (r.hops, r.nodes)):
        values = {kind.value: evaluate_metric(kind, route, topology, params)
                  for kind in REPORT_METRICS}
        rows.append(ReportRow(route, values))
    winners = {}
    for kind in REPORT_METRICS:
        winners[kind.value] = min(
            range(len(rows)),
            key=lambda i: (rows[i].values[kind.value].value,
                           rows[i].hops, rows[i].nodes))
    return RouteReport(tuple(rows), winners)


def _display_number(value: float) -> str:
    return f"{value:.6g}"


def format_route(nodes) -> str:
    return "->".join(nodes)


def render_table(header: list[str], body: list[list[str]]) -> str:
    """Simple aligned text table: columns padded to their widest cell."""
    widths = [len(h) for h in header]
    for row in body:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = []
    for row in [header] + body:
        lines.append("  ".join(cell.ljust(width)
                               for cell, width in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def render_report_table(report: RouteReport) -> str:
    header = ["route", "hops"] + [kind.value for kind in REPORT_METRICS]
    body = []
    for index, row in enumerate(report.rows):
        cells = [format_route(row.nodes), str(row.hops)]
        for kind in REPORT_METRICS:
            text = _display_number(row.values[kind.value].value)
            if report.winners[kind.value] == index:
                text += "*"
            cells.append(text)
        body.append(cells)
    return render_table(header, body)


def render_report_csv(report: RouteReport) -> str:
    """CSV with columns: route, hops, one value column per metric, then
    one winner_<metric> boolean column per metric."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    names = [kind.value for kind in REPORT_METRICS]
    writer.writerow(["route", "hops"] + names + [f"winner_{n}" for n in names])
    for index, row in enumerate(report.rows):
        record = [format_route(row.nodes), row.hops]
        record += [repr(row.values[n].value) for n in names]
        record += [str(report.winners[n] == index).lower() for n in names]
        writer.writerow(record)
    return buffer.getvalue()


def render_report_json(report: RouteReport) -> str:
    """One JSON object: {routes, metrics, winners}.

    ``routes`` lists each candidate with its node sequence, hop count
    and per-metric {value, units}; ``winners`` maps each metric to the
    index of its winning route.
    """
    names = [kind.value for kind in REPORT_METRICS]
    payload = {
        "routes": [
            {
                "nodes": list(row.nodes),
                "hops": row.hops,
                "metrics": {
                    name: {"value": row.values[name].value,
                           "units": row.values[name].units}
                    for name in names
                },
            }
            for row in report.rows
        ],
        "metrics": names,
        "winners": dict(report.winners),
    }
    return json.dumps(payload, indent=2) + "\n"
