"""Core model for oblivious reconfigurable networks.

A network of N nodes communicates in discrete timeslots. A connection
schedule is a period-T sequence of permutations of [0, N): during slot t,
node i may send one unit of traffic to ``permutation(t mod T)(i)``. The
schedule induces a layered *virtual topology* on [0, N) x Z whose edges are
the physical edges (i, t) -> (pi_t(i), t+1) and the virtual (waiting) edges
(i, t) -> (i, t+1).

Routing paths are stored as step-kind strings over {'P', 'V'} relative to an
origin vertex; their endpoints are recovered by replay against a schedule.
All flow and demand values are exact ``fractions.Fraction`` amounts so that
tight capacity cases (load exactly 1) are decided without rounding.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

PHYSICAL = "P"
VIRTUAL = "V"

ZERO = Fraction(0)
ONE = Fraction(1)


def parse_fraction(text: str | int | Fraction) -> Fraction:
    """Parse an exact rational from a 'p/q' or integer string."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    return Fraction(text.strip())


def format_fraction(value: Fraction) -> str:
    """Serialize an exact rational as 'p/q' (or 'p' when integral)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


# ---------------------------------------------------------------------------
# Schedules and the virtual topology
# ---------------------------------------------------------------------------


class ConnectionSchedule:
    """A period-T sequence of permutations of [0, N).

    ``rows[k][i]`` is the node that i sends to during timeslots congruent to
    k mod T. ``family`` and ``params`` record how the schedule was generated
    (design family tag plus its parameters) and are carried through
    serialization so routing schemes can be rebuilt from a schedule document.
    """

    __slots__ = ("node_count", "period", "rows", "family", "params")

    def __init__(
        self,
        rows: Sequence[Sequence[int]],
        family: str = "explicit",
        params: Mapping[str, object] | None = None,
    ):
        table = tuple(tuple(row) for row in rows)
        if not table:
            raise ValueError("schedule needs at least one timeslot")
        node_count = len(table[0])
        if node_count < 2:
            raise ValueError("schedule needs at least two nodes")
        reference = list(range(node_count))
        for k, row in enumerate(table):
            if sorted(row) != reference:
                raise ValueError(f"slot {k} is not a permutation of [0, {node_count})")
        self.rows = table
        self.node_count = node_count
        self.period = len(table)
        self.family = family
        self.params = dict(params or {})

    def permutation(self, k: int) -> tuple[int, ...]:
        return self.rows[k % self.period]

    def dest(self, node: int, timeslot: int) -> int:
        """Receiver of the physical edge leaving (node, timeslot)."""
        return self.rows[timeslot % self.period][node]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ConnectionSchedule) and self.rows == other.rows

    def __repr__(self) -> str:
        return (
            f"ConnectionSchedule(family={self.family!r}, N={self.node_count}, "
            f"T={self.period})"
        )


@dataclass(frozen=True)
class VirtualNode:
    """A vertex (node, timeslot) of the virtual topology."""

    node: int
    timeslot: int


@dataclass(frozen=True)
class EdgeRef:
    """The unique physical edge leaving (sender, timeslot).

    Out-degree is exactly one per slot because schedules are permutation
    sequences, so (sender, timeslot) identifies the edge; the receiver is
    recovered from the schedule.
    """

    sender: int
    timeslot: int


@dataclass(frozen=True)
class TopologyWindow:
    """Explicit edge lists of the virtual topology over a slot range."""

    physical: tuple[tuple[VirtualNode, VirtualNode], ...]
    virtual: tuple[tuple[VirtualNode, VirtualNode], ...]


def build_virtual_topology_window(
    schedule: ConnectionSchedule, t_start: int, length: int
) -> TopologyWindow:
    """Materialize all edges leaving slots [t_start, t_start + length)."""
    if length < 1:
        raise ValueError("window length must be >= 1")
    physical = []
    virtual = []
    for t in range(t_start, t_start + length):
        row = schedule.permutation(t)
        for i in range(schedule.node_count):
            physical.append((VirtualNode(i, t), VirtualNode(row[i], t + 1)))
            virtual.append((VirtualNode(i, t), VirtualNode(i, t + 1)))
    return TopologyWindow(tuple(physical), tuple(virtual))


# ---------------------------------------------------------------------------
# Paths
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RoutePath:
    """A timed walk, stored as its origin and a 'P'/'V' step string.

    Latency is the number of steps (physical and virtual alike advance time
    by one slot); hops counts only the physical steps. The endpoint is not
    stored: it is fully determined by (origin, steps, schedule) and is
    recomputed by :func:`walk_path`.
    """

    origin: VirtualNode
    steps: str

    def __post_init__(self):
        if self.steps.strip(PHYSICAL + VIRTUAL):
            raise ValueError(f"steps must be drawn from 'P'/'V': {self.steps!r}")

    @property
    def latency(self) -> int:
        return len(self.steps)

    @property
    def hops(self) -> int:
        return self.steps.count(PHYSICAL)

    def shifted(self, delta: int) -> "RoutePath":
        """The same walk transposed by ``delta`` timeslots."""
        return RoutePath(VirtualNode(self.origin.node, self.origin.timeslot + delta), self.steps)


def walk_path(schedule: ConnectionSchedule, path: RoutePath) -> VirtualNode:
    """Replay a path's steps and return its endpoint."""
    if not 0 <= path.origin.node < schedule.node_count:
        raise ValueError("path origin node outside [0, N)")
    node = path.origin.node
    t = path.origin.timeslot
    for step in path.steps:
        if step == PHYSICAL:
            node = schedule.dest(node, t)
        t += 1
    return VirtualNode(node, t)


def path_physical_edges(schedule: ConnectionSchedule, path: RoutePath) -> Iterator[EdgeRef]:
    """Yield the physical edges a path traverses, in order."""
    node = path.origin.node
    t = path.origin.timeslot
    for step in path.steps:
        if step == PHYSICAL:
            yield EdgeRef(node, t)
            node = schedule.dest(node, t)
        t += 1


# ---------------------------------------------------------------------------
# Flows
# ---------------------------------------------------------------------------


class Flow:
    """A finite weighting of paths with exact nonnegative rational weights."""

    __slots__ = ("paths",)

    def __init__(self, paths: Mapping[RoutePath, Fraction] | None = None):
        self.paths: dict[RoutePath, Fraction] = {}
        if paths:
            for path, weight in paths.items():
                self.add(path, weight)

    def add(self, path: RoutePath, weight: Fraction) -> None:
        weight = Fraction(weight)
        if weight < 0:
            raise ValueError("flow weights must be nonnegative")
        if weight == 0:
            return
        self.paths[path] = self.paths.get(path, ZERO) + weight

    def __add__(self, other: "Flow") -> "Flow":
        total = Flow(self.paths)
        for path, weight in other.paths.items():
            total.add(path, weight)
        return total

    def __len__(self) -> int:
        return len(self.paths)

    def items(self):
        return self.paths.items()


def edge_flow(schedule: ConnectionSchedule, flow: Flow, edge: EdgeRef) -> Fraction:
    """Total weight of flow paths traversing one specific physical edge."""
    total = ZERO
    for path, weight in flow.items():
        for crossed in path_physical_edges(schedule, path):
            if crossed == edge:
                total += weight
                break
    return total


def is_feasible(
    schedule: ConnectionSchedule, flow: Flow
) -> tuple[bool, EdgeRef | None, Fraction]:
    """Check every physical edge carries load at most 1.

    Returns (feasible, worst edge, worst load); the worst edge is None for
    a flow that touches no physical edge.
    """
    loads: dict[EdgeRef, Fraction] = {}
    for path, weight in flow.items():
        for edge in path_physical_edges(schedule, path):
            loads[edge] = loads.get(edge, ZERO) + weight
    if not loads:
        return True, None, ZERO
    worst = max(loads, key=lambda e: (loads[e], -e.timeslot, -e.sender))
    return loads[worst] <= 1, worst, loads[worst]


# ---------------------------------------------------------------------------
# Routing schemes and demands
# ---------------------------------------------------------------------------


class RoutingScheme:
    """Oblivious routing scheme: a unit flow of paths for every (a, b, t).

    Subclasses implement :meth:`base_paths` for origination slots in
    [0, period); other slots are answered by periodicity, transposing every
    path by the matching multiple of the period.
    """

    def __init__(self, schedule: ConnectionSchedule, period: int, max_latency: int):
        self.schedule = schedule
        self.node_count = schedule.node_count
        self.period = period
        self.max_latency = max_latency

    def base_paths(self, a: int, b: int, t: int) -> dict[RoutePath, Fraction]:
        raise NotImplementedError

    def paths(self, a: int, b: int, t: int) -> dict[RoutePath, Fraction]:
        n = self.node_count
        if not (0 <= a < n and 0 <= b < n):
            raise ValueError("endpoints must lie in [0, N)")
        base_t = t % self.period
        mapping = self.base_paths(a, b, base_t)
        if base_t == t:
            return mapping
        delta = t - base_t
        return {path.shifted(delta): weight for path, weight in mapping.items()}


class DemandFunction:
    """Periodic map from timeslot to an N x N exact-rational demand matrix."""

    __slots__ = ("node_count", "period", "matrices")

    def __init__(self, matrices: Sequence[Sequence[Sequence[Fraction | int | str]]]):
        if not matrices:
            raise ValueError("demand needs at least one matrix")
        parsed = []
        node_count = len(matrices[0])
        for matrix in matrices:
            rows = []
            if len(matrix) != node_count:
                raise ValueError("demand matrices must share one node count")
            for row in matrix:
                if len(row) != node_count:
                    raise ValueError("demand matrices must be square")
                values = tuple(parse_fraction(v) for v in row)
                if any(v < 0 for v in values):
                    raise ValueError("demand entries must be nonnegative")
                rows.append(values)
            parsed.append(tuple(rows))
        self.matrices = tuple(parsed)
        self.node_count = node_count
        self.period = len(parsed)

    def matrix(self, t: int) -> tuple[tuple[Fraction, ...], ...]:
        return self.matrices[t % self.period]

    def requested_throughput(self) -> Fraction:
        """Maximum row or column sum over one period."""
        worst = ZERO
        for matrix in self.matrices:
            for row in matrix:
                worst = max(worst, sum(row, start=ZERO))
            for j in range(self.node_count):
                worst = max(worst, sum((row[j] for row in matrix), start=ZERO))
        return worst


def induce_flow(
    scheme: RoutingScheme,
    demand: DemandFunction,
    window: range | tuple[int, int],
) -> Flow:
    """Weight the scheme's paths by demand over a range of origination slots.

    The window must span at least one scheme period: shorter windows
    undercount steady-state congestion.
    """
    if isinstance(window, tuple):
        window = range(window[0], window[1])
    if len(window) < scheme.period:
        raise ValueError("analysis window shorter than one scheme period")
    if demand.node_count != scheme.node_count:
        raise ValueError("demand and scheme node counts differ")
    flow = Flow()
    for t in window:
        matrix = demand.matrix(t)
        for a in range(scheme.node_count):
            row = matrix[a]
            for b in range(scheme.node_count):
                amount = row[b]
                if amount == 0:
                    continue
                for path, weight in scheme.paths(a, b, t).items():
                    flow.add(path, amount * weight)
    return flow


# ---------------------------------------------------------------------------
# Schedule serialization
# ---------------------------------------------------------------------------

_FRACTION_PARAMS = {"delta"}


def schedule_to_document(schedule: ConnectionSchedule, include_table: bool = True) -> dict:
    """Build the JSON document form of a schedule.

    The explicit permutation table is included by default so consumers can
    replay the schedule without reimplementing the generator.
    """
    params = {}
    for key, value in schedule.params.items():
        params[key] = format_fraction(value) if isinstance(value, Fraction) else value
    document = {
        "family": schedule.family,
        "node_count": schedule.node_count,
        "period": schedule.period,
        "params": params,
    }
    if include_table:
        document["permutations"] = [list(row) for row in schedule.rows]
    return document


def schedule_from_document(document: Mapping[str, object]) -> ConnectionSchedule:
    """Rebuild a schedule from its JSON document form."""
    params = dict(document.get("params", {}))
    for key in _FRACTION_PARAMS & params.keys():
        params[key] = parse_fraction(params[key])
    family = str(document.get("family", "explicit"))
    table = document.get("permutations")
    if table is None:
        from . import schedules as _schedules

        return _schedules.generate_from_params(family, params, document)
    schedule = ConnectionSchedule(table, family=family, params=params)
    if "node_count" in document and schedule.node_count != document["node_count"]:
        raise ValueError("declared node_count disagrees with permutation table")
    if "period" in document and schedule.period != document["period"]:
        raise ValueError("declared period disagrees with permutation table")
    return schedule


def schedule_to_json(schedule: ConnectionSchedule, include_table: bool = True) -> str:
    return json.dumps(
        schedule_to_document(schedule, include_table=include_table),
        indent=2,
        sort_keys=True,
    )


def schedule_from_json(text: str) -> ConnectionSchedule:
    return schedule_from_document(json.loads(text))
