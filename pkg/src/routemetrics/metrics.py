"""Route metric functions.

The central quantity is the traffic a route is currently serving: by
Little's law, each hop holds ``(capacity - available) * delay`` bits in
flight, and a packet that arrives later than the hop delay plus the
dejitter buffer counts as lost, which adds a loss-weighted buffer term.
Summed over the hops of a route this gives the universal metric

    W = sum_i (C_i - B_i) * (D_i + p_i * Dbuf_i)        [bits]

which route selection minimizes.  Alongside it this module provides the
classical protocol metrics: RIP's hop count, OSPF's summed
reference-bandwidth/available-bandwidth link costs, and EIGRP's
composite metric over worst-link bandwidth, total delay, worst
reliability and worst loading with coefficients K1..K5.

All functions are pure and operate on immutable inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import MetricDomainError
from .model import DejitterMode, DejitterPolicy, LinkParams, Route, Topology

__all__ = [
    "MetricKind",
    "MetricValue",
    "EigrpCoefficients",
    "LittleQuery",
    "MetricParams",
    "little_traffic",
    "dejitter_buffer",
    "loss_from_buffer",
    "hop_buffer",
    "universal_metric",
    "universal_metric_dmax",
    "rip_metric",
    "ospf_metric",
    "eigrp_metric",
    "rip_reduction_check",
    "evaluate_metric",
]

#: OSPF edge weights default to reference_bandwidth / available, with the
#: reference in the same unit as available (bits/s).
DEFAULT_REFERENCE_BANDWIDTH = 1e6

#: EIGRP expresses bandwidth in kilobits/s and delay in tens of microseconds.
_KBPS = 1e3
_TENS_OF_MICROSECONDS = 1e-5


class MetricKind(Enum):
    """The selectable route metrics."""

    UNIVERSAL = "universal"
    UNIVERSAL_DMAX = "universal_dmax"
    RIP = "rip"
    OSPF = "ospf"
    EIGRP = "eigrp"


@dataclass(frozen=True)
class MetricValue:
    """A non-negative, finite metric value with its unit tag.

    Universal-metric values are in bits (in-flight traffic); the
    protocol metrics are dimensionless scaled units.
    """

    value: float
    units: str

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        if not math.isfinite(self.value) or self.value < 0:
            raise MetricDomainError(
                f"metric value must be non-negative and finite, got {self.value!r}")
        if self.units not in ("bits", "dimensionless"):
            raise MetricDomainError(f"unknown units tag {self.units!r}")


@dataclass(frozen=True)
class EigrpCoefficients:
    """EIGRP weighting coefficients; defaults are K1=K3=1, K2=K4=K5=0."""

    k1: float = 1.0
    k2: float = 0.0
    k3: float = 1.0
    k4: float = 0.0
    k5: float = 0.0

    def __post_init__(self):
        for name in ("k1", "k2", "k3", "k4", "k5"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < 0:
                raise MetricDomainError(f"{name.upper()} must be non-negative, got {value!r}")
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class LittleQuery:
    """Inputs to Little's law: arrival rate (per second) and residence time."""

    arrival_rate: float
    residence_time: float

    def __post_init__(self):
        for name in ("arrival_rate", "residence_time"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < 0:
                raise MetricDomainError(f"{name} must be non-negative, got {value!r}")
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class MetricParams:
    """Tunables for metric evaluation, bundled for route queries.

    ``policy`` drives the universal metric, ``dmax`` the explicit-deadline
    variant, ``eigrp`` the K coefficients, and ``reference_bandwidth``
    the OSPF link cost numerator.
    """

    policy: DejitterPolicy = field(default_factory=DejitterPolicy.from_target_loss)
    dmax: float | None = None
    eigrp: EigrpCoefficients = field(default_factory=EigrpCoefficients)
    reference_bandwidth: float = DEFAULT_REFERENCE_BANDWIDTH

    def __post_init__(self):
        if not self.reference_bandwidth > 0:
            raise MetricDomainError(
                f"reference bandwidth must be positive, got {self.reference_bandwidth!r}")


def little_traffic(query: LittleQuery) -> float:
    """Average number of customers in a stable system: rate times residence time."""
    return query.arrival_rate * query.residence_time


def dejitter_buffer(jitter: float, target_loss: float) -> float:
    """Buffer duration that keeps jitter-induced loss at ``target_loss``.

    Late arrivals beyond the buffer are lost with probability
    ``exp(-buffer / jitter)``; inverting gives ``-jitter * ln(target_loss)``.
    Zero jitter needs no buffer.
    """
    if jitter < 0:
        raise MetricDomainError(f"jitter must be non-negative, got {jitter}")
    if not 0.0 < target_loss < 1.0:
        raise MetricDomainError(
            f"target loss must lie strictly between 0 and 1, got {target_loss}")
    if jitter == 0:
        return 0.0
    return -jitter * math.log(target_loss)


def loss_from_buffer(jitter: float, buffer: float) -> float:
    """Fraction of packets arriving later than the dejitter buffer.

    Inverse of :func:`dejitter_buffer`: ``exp(-buffer / jitter)``.  An
    empty buffer loses everything under this model; zero jitter leaves
    the late-arrival rate undefined.
    """
    if jitter <= 0:
        raise MetricDomainError(f"jitter must be positive, got {jitter}")
    if buffer < 0:
        raise MetricDomainError(f"buffer duration must be non-negative, got {buffer}")
    return math.exp(-buffer / jitter)


def hop_buffer(policy: DejitterPolicy, params: LinkParams) -> float:
    """Resolve one hop's dejitter buffer duration under ``policy``."""
    if policy.mode is DejitterMode.EXPLICIT_DMAX:
        buffer = policy.dmax - params.delay
        if buffer < 0:
            raise MetricDomainError(
                f"deadline below hop delay: dmax={policy.dmax} < delay={params.delay}")
        return buffer
    if policy.mode is DejitterMode.JITTER_DERIVED:
        return dejitter_buffer(params.jitter, policy.target_loss)
    return policy.factor * params.jitter


def universal_metric(route: Route, topology: Topology,
                     policy: DejitterPolicy | None = None) -> MetricValue:
    """In-flight traffic of a route, corrected for packet loss.

    Sums ``(capacity - available) * (delay + loss * buffer)`` over the
    hops, with the per-hop buffer resolved from ``policy`` (default:
    jitter-derived with target loss 0.001).
    """
    if policy is None:
        policy = DejitterPolicy.from_target_loss()
    total = 0.0
    for link in route.resolve(topology):
        p = link.params
        total += p.served * (p.delay + p.loss * hop_buffer(policy, p))
    return MetricValue(total, "bits")


def universal_metric_dmax(route: Route, topology: Topology, dmax: float) -> MetricValue:
    """Loss-corrected traffic metric in deadline form.

    Sums ``(capacity - available) * ((1 - loss) * delay + loss * dmax)``,
    which is algebraically identical to :func:`universal_metric` with an
    explicit-deadline policy of the same ``dmax``.
    """
    total = 0.0
    for link in route.resolve(topology):
        p = link.params
        if dmax < p.delay:
            raise MetricDomainError(
                f"deadline below hop delay: dmax={dmax} < delay={p.delay}")
        total += p.served * ((1.0 - p.loss) * p.delay + p.loss * dmax)
    return MetricValue(total, "bits")


def rip_metric(route: Route) -> MetricValue:
    """RIP's metric: the number of hops."""
    return MetricValue(float(route.hops), "dimensionless")


def ospf_metric(route: Route, topology: Topology,
                reference_bandwidth: float = DEFAULT_REFERENCE_BANDWIDTH) -> MetricValue:
    """OSPF path cost: sum of reference_bandwidth / available over the hops."""
    if not reference_bandwidth > 0:
        raise MetricDomainError(
            f"reference bandwidth must be positive, got {reference_bandwidth}")
    total = 0.0
    for link in route.resolve(topology):
        if link.params.available == 0:
            raise MetricDomainError(
                f"zero available bandwidth on link {link.link_id!r}")
        total += reference_bandwidth / link.params.available
    return MetricValue(total, "dimensionless")


def eigrp_metric(route: Route, topology: Topology,
                 k: EigrpCoefficients | None = None) -> MetricValue:
    """EIGRP composite metric in Cisco's scaled units.

    The ingredients, from the route's hops:

    * ``bandwidth = 256 * 1e6 / B`` with ``B`` the smallest available
      bandwidth in kilobits/s;
    * ``delay = 256 * D`` with ``D`` the total delay in tens of
      microseconds;
    * ``reliability = 256 * max(loss)`` (worst hop; note this grows with
      loss, so with K5 > 0 the metric *shrinks* as loss grows -- kept
      verbatim, see README);
    * ``loading = 256 * max((capacity - available) / capacity)`` (worst
      utilization).

    The weighted form is ``W1 = K1*bandwidth + K2*bandwidth/(256-loading)
    + K3*delay``, rescaled by ``K5/(reliability + K4)`` when K5 is
    non-zero.  With default coefficients this reduces exactly to
    ``bandwidth + delay``.  Terms are kept real-valued; no integer
    truncation is applied.
    """
    if k is None:
        k = EigrpCoefficients()
    hops = [link.params for link in route.resolve(topology)]
    min_available = min(p.available for p in hops)
    if min_available <= 0:
        raise MetricDomainError("zero available bandwidth on the route")
    bandwidth = (1e6 / (min_available / _KBPS)) * 256.0
    total_delay = 0.0
    for p in hops:
        total_delay += p.delay
    delay = (total_delay / _TENS_OF_MICROSECONDS) * 256.0
    reliability = 256.0 * max(p.loss for p in hops)
    loading = 256.0 * max(p.utilization for p in hops)
    if k.k2 > 0:
        if loading >= 256.0:
            raise MetricDomainError("loading saturated at 256; K2 term undefined")
        k2_term = k.k2 * bandwidth / (256.0 - loading)
    else:
        k2_term = 0.0
    w1 = k.k1 * bandwidth + k2_term + k.k3 * delay
    if k.k5 == 0:
        return MetricValue(w1, "dimensionless")
    denominator = reliability + k.k4
    if denominator == 0:
        raise MetricDomainError("reliability + K4 is zero; K5 rescaling undefined")
    return MetricValue(w1 * k.k5 / denominator, "dimensionless")


def rip_reduction_check(route: Route, topology: Topology) -> MetricValue:
    """Closed form of the universal metric on a homogeneous loss-free route.

    When every hop shares the same capacity, available bandwidth and
    delay and loses nothing, the universal metric collapses to
    ``(C - B) * D * N`` -- linear in the hop count, which is exactly
    what RIP minimizes.  Checks the preconditions, evaluates the closed
    form, and verifies it against the full metric before returning.
    """
    hops = [link.params for link in route.resolve(topology)]
    first = hops[0]
    for p in hops:
        if (p.capacity != first.capacity or p.available != first.available
                or p.delay != first.delay or p.loss != 0.0):
            raise MetricDomainError(
                "reduction preconditions violated: hops must share identical "
                "capacity, available bandwidth and delay, with zero loss")
    closed_form = first.served * first.delay * route.hops
    full = universal_metric(route, topology).value
    if not math.isclose(closed_form, full, rel_tol=1e-12, abs_tol=0.0):
        raise MetricDomainError(
            f"reduction check failed: closed form {closed_form} != metric {full}")
    return MetricValue(closed_form, "bits")


def evaluate_metric(kind: MetricKind, route: Route, topology: Topology,
                    params: MetricParams | None = None) -> MetricValue:
    """Evaluate any metric kind on a route with the given parameters."""
    if params is None:
        params = MetricParams()
    if kind is MetricKind.UNIVERSAL:
        return universal_metric(route, topology, params.policy)
    if kind is MetricKind.UNIVERSAL_DMAX:
        if params.dmax is None:
            raise MetricDomainError("universal_dmax needs params.dmax")
        return universal_metric_dmax(route, topology, params.dmax)
    if kind is MetricKind.RIP:
        return rip_metric(route)
    if kind is MetricKind.OSPF:
        return ospf_metric(route, topology, params.reference_bandwidth)
    if kind is MetricKind.EIGRP:
        return eigrp_metric(route, topology, params.eigrp)
    raise MetricDomainError(f"unknown metric kind {kind!r}")
