"""Closed-form throughput/latency tradeoff machinery.

Every rate r in (0, 1/2] decomposes uniquely as 1/(2r) = h + 1 - eps with
h a positive integer and eps in (0, 1]. The tight maximum-latency scale is

    l_star(r, N) = h * (N^(1/(h+1)) + (eps * N)^(1/h)),

reported in floating point for display; all feasibility logic elsewhere in
the package stays rational. The counting bound caps how many nodes any
schedule can reach within L timeslots using at most h physical hops, and
``reachable_within`` measures the same quantity on a concrete schedule by
breadth-first search over the windowed virtual topology.

The sampled tradeoff curve reports, at exactly-even inverse rates, the
left-continuous branch of the decomposition (eps = 0, h one lower), so the
sampled curve descends continuously into each cusp and the cusp samples are
the scallop minima; the two branches differ only by a bounded constant
factor there.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Sequence

from .core import ConnectionSchedule, format_fraction
from .schedules import delta_cap

# ---------------------------------------------------------------------------
# Rate decomposition and the latency scale
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RateDecomposition:
    """The unique (h, eps) in N x (0, 1] with 1/(2r) = h + 1 - eps."""

    rate: Fraction
    h: int
    eps: Fraction

    def __post_init__(self):
        if Fraction(1, 2) / self.rate != self.h + 1 - self.eps:
            raise ValueError("inconsistent decomposition")


def decompose_rate(rate: Fraction) -> RateDecomposition:
    rate = Fraction(rate)
    if not 0 < rate <= Fraction(1, 2):
        raise ValueError("rate must lie in (0, 1/2]")
    inverse_double = 1 / (2 * rate)
    if inverse_double.denominator == 1:
        h = int(inverse_double)
        eps = Fraction(1)
    else:
        h = math.floor(inverse_double)
        eps = h + 1 - inverse_double
    return RateDecomposition(rate=rate, h=h, eps=eps)


def l_star(rate: Fraction, node_count: int) -> float:
    """h * (N^(1/(h+1)) + (eps*N)^(1/h)), display-only floating point."""
    if node_count <= 1:
        raise ValueError("node count must exceed 1")
    d = decompose_rate(rate)
    return _l_star_value(d.h, d.eps, node_count)


def _l_star_value(h: int, eps: Fraction, node_count: int) -> float:
    second = (float(eps) * node_count) ** (1.0 / h) if eps else 0.0
    return h * (node_count ** (1.0 / (h + 1)) + second)


# ---------------------------------------------------------------------------
# Counting bound and hop-limited reachability
# ---------------------------------------------------------------------------


def counting_bound(max_latency: int, max_hops: int) -> int:
    """2 * C(L, h): cap on nodes reachable in L slots with <= h hops.

    Only valid for h <= L/3, where C(L, i) at least doubles with each
    increment of i.
    """
    if max_latency < 0 or max_hops < 0:
        raise ValueError("latency and hop limits must be nonnegative")
    if 3 * max_hops > max_latency:
        raise ValueError("counting bound requires h <= L/3")
    return 2 * math.comb(max_latency, max_hops)


def reachable_within(
    schedule: ConnectionSchedule, a: int, t: int, max_latency: int, max_hops: int
) -> frozenset[int]:
    """Nodes b != a reachable from (a, t) within L slots using <= h hops.

    Breadth-first over the windowed virtual topology, keeping per node the
    fewest hops used at each slot (a state reached no later with no more
    hops dominates).
    """
    if max_latency < 0 or max_hops < 0:
        raise ValueError("latency and hop limits must be nonnegative")
    if not 0 <= a < schedule.node_count:
        raise ValueError("source node outside [0, N)")
    frontier = {a: 0}
    reached: set[int] = set()
    for slot in range(t, t + max_latency):
        row = schedule.permutation(slot)
        step = dict(frontier)
        for node, hops in frontier.items():
            if hops < max_hops:
                dest = row[node]
                if step.get(dest, max_hops + 1) > hops + 1:
                    step[dest] = hops + 1
                reached.add(dest)
        frontier = step
    reached.discard(a)
    return frozenset(reached)


# ---------------------------------------------------------------------------
# Tradeoff curve
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TradeoffPoint:
    """One sample of the tradeoff curve at inverse rate 1/r."""

    inv_rate: Fraction
    h: int
    eps: Fraction
    l_star: float
    node_count: int
    ebs_latency: float
    vbs_latency: float | None
    vbs_applicable: bool


def curve_decomposition(inv_rate: Fraction) -> tuple[int, Fraction]:
    """(h, eps) used for curve samples: left-continuous at even 1/r.

    At an exactly even inverse rate above 2 this returns the eps -> 0 limit
    of the preceding segment rather than the (h+1, 1) representative, so
    sampled scallops descend continuously into their cusps.
    """
    half = inv_rate / 2
    if half < 1:
        raise ValueError("inverse rate must be >= 2")
    if half.denominator == 1:
        if half == 1:
            return 1, Fraction(1)
        return int(half) - 1, Fraction(0)
    h = math.floor(half)
    return h, h + 1 - half


def ebs_latency_bound(h: int, node_count: int) -> float:
    """Elementary-basis maximum latency 2*l*(n - 1) at order l = h."""
    return 2 * h * (node_count ** (1.0 / h) - 1)


def vbs_latency_bound(h: int, eps: Fraction, node_count: int) -> float | None:
    """Vandermonde maximum latency (n-1)(3 + 2h + 2Q) - 1 at delta = 4*eps,
    or None when delta falls outside its admissibility cap."""
    delta = 4 * eps
    if not 0 < delta <= delta_cap(h):
        return None
    n_real = node_count ** (1.0 / (h + 1))
    q = max(h, 2 * h * h - h)
    while math.comb(q, h) < float(delta) * n_real:
        q += 1
    return (n_real - 1) * (3 + 2 * h + 2 * q) - 1


def tradeoff_curve(
    node_count: int,
    min_inv_rate: Fraction = Fraction(2),
    max_inv_rate: Fraction = Fraction(12),
    samples: int = 501,
) -> list[TradeoffPoint]:
    """Uniform samples of the tradeoff curve over an inverse-rate range.

    The default 501 samples over [2, 12] place sample points exactly on the
    even inverse rates where the cusps sit.
    """
    if node_count <= 1:
        raise ValueError("node count must exceed 1")
    min_inv_rate = Fraction(min_inv_rate)
    max_inv_rate = Fraction(max_inv_rate)
    if min_inv_rate < 2 or max_inv_rate <= min_inv_rate:
        raise ValueError("need 2 <= min_inv_rate < max_inv_rate")
    if samples < 2:
        raise ValueError("need at least two samples")
    step = (max_inv_rate - min_inv_rate) / (samples - 1)
    points = []
    for k in range(samples):
        inv_rate = min_inv_rate + k * step
        h, eps = curve_decomposition(inv_rate)
        vbs = vbs_latency_bound(h, eps, node_count)
        points.append(
            TradeoffPoint(
                inv_rate=inv_rate,
                h=h,
                eps=eps,
                l_star=_l_star_value(h, eps, node_count),
                node_count=node_count,
                ebs_latency=ebs_latency_bound(h, node_count),
                vbs_latency=vbs,
                vbs_applicable=vbs is not None,
            )
        )
    return points


def curve_to_csv(points: Sequence[TradeoffPoint], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(
        ["inv_rate", "h", "eps", "l_star", "ebs_latency", "vbs_latency", "vbs_applicable"]
    )
    for point in points:
        writer.writerow(
            [
                format_fraction(point.inv_rate),
                point.h,
                format_fraction(point.eps),
                repr(point.l_star),
                repr(point.ebs_latency),
                "" if point.vbs_latency is None else repr(point.vbs_latency),
                int(point.vbs_applicable),
            ]
        )
