"""Exception types shared across the package."""

from __future__ import annotations


class RouteMetricsError(Exception):
    """Base class for all errors raised by this package."""


class TopologyError(RouteMetricsError, ValueError):
    """A topology or link description violates a structural invariant."""


class TopologyParseError(TopologyError):
    """A topology file could not be parsed; carries the offending line."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class RouteError(RouteMetricsError, ValueError):
    """A link sequence does not form a valid route."""


class MetricDomainError(RouteMetricsError, ValueError):
    """Metric inputs are outside the domain of the requested formula."""


class UnreachableError(RouteMetricsError):
    """No route exists between the requested endpoints."""


class PathCapExceeded(RouteMetricsError):
    """More simple paths exist than the enumeration cap allows.

    ``routes`` holds the paths found before the cap was hit (exactly
    ``limit`` of them), so the caller can decide to continue with a
    partial candidate set.
    """

    def __init__(self, limit: int, routes):
        super().__init__(f"path cap exceeded: more than {limit} simple paths")
        self.limit = limit
        self.routes = tuple(routes)
