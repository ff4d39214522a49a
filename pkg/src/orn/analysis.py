"""Demand generation, congestion accounting, and throughput verification.

The worst-case verifier operationalizes the matching view of feasibility:
for a physical edge e, the per-pair traversal mass
``w[a][b] = sum over origination slots of one period of the weight of
(a, b) paths crossing e`` turns the capacity constraint under an arbitrary
demand matrix with row/column sums r into ``r * (max-weight perfect
matching of w) <= 1``. The guaranteed rate is therefore the reciprocal of
the largest matching value over one period of representative edges, and
the maximizing permutation is a concrete adversarial demand that saturates
the witness edge exactly.

All arithmetic is exact: demands, loads, and matching values are
``fractions.Fraction`` throughout, with the assignment problem solved on
integers after clearing denominators.
"""

from __future__ import annotations

import csv
import math
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import IO, Iterable, Mapping, Sequence

from .core import (
    ConnectionSchedule,
    DemandFunction,
    EdgeRef,
    Flow,
    RoutingScheme,
    ZERO,
    parse_fraction,
    format_fraction,
)

# ---------------------------------------------------------------------------
# Demand generators and inflation
# ---------------------------------------------------------------------------


def uniform_demand(node_count: int, rate: Fraction, period: int = 1) -> DemandFunction:
    """All-to-all demand r/N per ordered pair; requested throughput is r."""
    rate = Fraction(rate)
    if rate < 0:
        raise ValueError("rate must be nonnegative")
    entry = rate / node_count
    matrix = [[entry] * node_count for _ in range(node_count)]
    return DemandFunction([matrix] * period)


def permutation_demand(
    sigma: Sequence[int], rate: Fraction, period: int = 1
) -> DemandFunction:
    """Every node a sends rate r to sigma(a); requested throughput is r."""
    rate = Fraction(rate)
    if rate < 0:
        raise ValueError("rate must be nonnegative")
    node_count = len(sigma)
    if sorted(sigma) != list(range(node_count)):
        raise ValueError("sigma must be a permutation of [0, N)")
    matrix = [[ZERO] * node_count for _ in range(node_count)]
    for a, b in enumerate(sigma):
        matrix[a][b] = rate
    return DemandFunction([matrix] * period)


def inflate_demand(demand: DemandFunction, rate: Fraction) -> DemandFunction:
    """Greedily complete a sub-r-stochastic demand to exact sums r.

    Repeatedly picks the lowest-indexed row with deficient sum and the
    lowest-indexed column with deficient sum and adds the smaller of the
    two deficits; the result dominates the input entrywise and every row
    and column sum equals r exactly.
    """
    rate = Fraction(rate)
    n = demand.node_count
    inflated = []
    for matrix in demand.matrices:
        grid = [list(row) for row in matrix]
        row_sums = [sum(row, start=ZERO) for row in grid]
        col_sums = [sum((grid[i][j] for i in range(n)), start=ZERO) for j in range(n)]
        if any(s > rate for s in row_sums) or any(s > rate for s in col_sums):
            raise ValueError("a row or column sum already exceeds the target rate")
        while True:
            x = next((i for i in range(n) if row_sums[i] < rate), None)
            if x is None:
                break
            y = next(j for j in range(n) if col_sums[j] < rate)
            amount = min(rate - row_sums[x], rate - col_sums[y])
            grid[x][y] += amount
            row_sums[x] += amount
            col_sums[y] += amount
        inflated.append(grid)
    return DemandFunction(inflated)


# ---------------------------------------------------------------------------
# Demand serialization
# ---------------------------------------------------------------------------


def demand_to_document(demand: DemandFunction) -> dict:
    return {
        "node_count": demand.node_count,
        "period": demand.period,
        "matrices": [
            [[format_fraction(v) for v in row] for row in matrix]
            for matrix in demand.matrices
        ],
    }


def demand_from_document(document: Mapping[str, object]) -> DemandFunction:
    demand = DemandFunction(document["matrices"])
    if "node_count" in document and demand.node_count != document["node_count"]:
        raise ValueError("declared node_count disagrees with matrices")
    return demand


# ---------------------------------------------------------------------------
# Edge weight tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EdgeWeightMatrix:
    """Per-pair traversal mass of one physical edge over a period of
    origination slots."""

    edge: EdgeRef
    weights: tuple[tuple[Fraction, ...], ...]


def _weight_tables(
    scheme: RoutingScheme, latency_cap: int | None = None
) -> dict[tuple[int, int], list[list[Fraction]]]:
    """Traversal-mass tables for every representative edge (sender, slot).

    Folds all origination slots of one period onto edge classes
    (sender, timeslot mod T); by periodicity the table of a class equals
    the total mass crossing any single concrete edge of that class over
    all origination times.
    """
    cache = getattr(scheme, "_edge_weight_tables", None)
    if cache is not None:
        return cache
    schedule = scheme.schedule
    n = scheme.node_count
    period = scheme.period
    cap = scheme.max_latency if latency_cap is None else latency_cap
    rows = schedule.rows
    sched_period = schedule.period
    tables: dict[tuple[int, int], list[list[Fraction]]] = {}
    for t in range(period):
        for a in range(n):
            for b in range(n):
                for path, weight in scheme.paths(a, b, t).items():
                    if path.latency > cap:
                        raise ValueError("path exceeds the declared latency cap")
                    node = path.origin.node
                    slot = path.origin.timeslot
                    for step in path.steps:
                        if step == "P":
                            key = (node, slot % period)
                            table = tables.get(key)
                            if table is None:
                                table = [[ZERO] * n for _ in range(n)]
                                tables[key] = table
                            table[a][b] += weight
                            node = rows[slot % sched_period][node]
                        slot += 1
    scheme._edge_weight_tables = tables
    return tables


def edge_weights(
    scheme: RoutingScheme,
    edge: EdgeRef,
    latency_cap: int | None = None,
) -> EdgeWeightMatrix:
    """The traversal-mass matrix of one physical edge."""
    tables = _weight_tables(scheme, latency_cap)
    key = (edge.sender, edge.timeslot % scheme.period)
    table = tables.get(key)
    n = scheme.node_count
    if table is None:
        table = [[ZERO] * n for _ in range(n)]
    return EdgeWeightMatrix(edge, tuple(tuple(row) for row in table))


# ---------------------------------------------------------------------------
# Exact maximum-weight perfect matching
# ---------------------------------------------------------------------------


def _min_cost_assignment(cost: Sequence[Sequence[int]]) -> tuple[int, list[int]]:
    """O(n^3) shortest-augmenting-path assignment on integer costs."""
    n = len(cost)
    big = sum(max(abs(v) for v in row) for row in cost) * (n + 1) + 1
    u = [0] * (n + 1)
    v = [0] * (n + 1)
    matched_row = [0] * (n + 1)  # column j (1-based) -> row, 0 = free
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        matched_row[0] = i
        j0 = 0
        minv = [big] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = matched_row[j0]
            delta = big
            j1 = 0
            row = cost[i0 - 1]
            for j in range(1, n + 1):
                if not used[j]:
                    cur = row[j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[matched_row[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if matched_row[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            matched_row[j0] = matched_row[j1]
            j0 = j1
    assignment = [0] * n
    for j in range(1, n + 1):
        if matched_row[j]:
            assignment[matched_row[j] - 1] = j - 1
    total = sum(cost[i][assignment[i]] for i in range(n))
    return total, assignment


def max_weight_perfect_matching(
    weights: Sequence[Sequence[Fraction]],
) -> tuple[Fraction, tuple[int, ...]]:
    """Exact optimal assignment value and an argmax permutation.

    Rational weights are scaled by the lcm of their denominators so the
    classic integer assignment algorithm applies unchanged.
    """
    n = len(weights)
    if any(len(row) != n for row in weights):
        raise ValueError("weight matrix must be square")
    grid = [[Fraction(v) for v in row] for row in weights]
    scale = math.lcm(*(v.denominator for row in grid for v in row)) if n else 1
    cost = [[-(v.numerator * (scale // v.denominator)) for v in row] for row in grid]
    total, assignment = _min_cost_assignment(cost)
    return Fraction(-total, scale), tuple(assignment)


def _matching_value_job(
    args: tuple[tuple[int, int], list[list[int]], int]
) -> tuple[tuple[int, int], int, tuple[int, ...]]:
    key, cost, _ = args
    total, assignment = _min_cost_assignment(cost)
    return key, -total, tuple(assignment)


# ---------------------------------------------------------------------------
# Guaranteed throughput
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThroughputCertificate:
    """The verified rate together with the binding edge and adversary.

    ``rate * matching_value == 1``: the witness permutation demand at any
    rate above ``rate`` overloads the witness edge.
    """

    rate: Fraction
    edge: EdgeRef
    permutation: tuple[int, ...]
    matching_value: Fraction


def _threads_from_env() -> int:
    try:
        return max(1, int(os.environ.get("ORN_THREADS", "1")))
    except ValueError:
        return 1


def guaranteed_throughput(
    scheme: RoutingScheme,
    schedule: ConnectionSchedule | None = None,
    threads: int | None = None,
) -> ThroughputCertificate:
    """Largest rate the scheme can guarantee, with a binding witness.

    Considers one period of representative edges; periodicity makes every
    other edge equivalent to its representative. ``threads`` (default: the
    ORN_THREADS environment variable) parallelizes the per-edge matchings.
    """
    if schedule is not None and schedule != scheme.schedule:
        raise ValueError("schedule disagrees with the scheme's schedule")
    tables = _weight_tables(scheme)
    if not tables:
        raise ValueError("scheme routes no physical hops; throughput is unconstrained")
    jobs = []
    scales: dict[tuple[int, int], int] = {}
    for key in sorted(tables):
        table = tables[key]
        scale = math.lcm(*(v.denominator for row in table for v in row))
        cost = [[-(v.numerator * (scale // v.denominator)) for v in row] for row in table]
        scales[key] = scale
        jobs.append((key, cost, scale))
    threads = _threads_from_env() if threads is None else max(1, threads)
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_matching_value_job, jobs, chunksize=8))
    else:
        results = [_matching_value_job(job) for job in jobs]
    best_key = None
    best_value = ZERO
    best_perm: tuple[int, ...] = ()
    for key, raw_value, perm in results:
        value = Fraction(raw_value, scales[key])
        if value > best_value:
            best_key, best_value, best_perm = key, value, perm
    if best_key is None:
        raise ValueError("all edge weight tables are zero; throughput is unconstrained")
    return ThroughputCertificate(
        rate=1 / best_value,
        edge=EdgeRef(*best_key),
        permutation=best_perm,
        matching_value=best_value,
    )


# ---------------------------------------------------------------------------
# Congestion reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EdgeFlowReport:
    """Exact steady-state per-edge loads over one joint period."""

    node_count: int
    period: int
    loads: Mapping[EdgeRef, Fraction]
    max_load: Fraction
    worst_edge: EdgeRef
    feasible: bool


def congestion_report(
    scheme: RoutingScheme,
    demand: DemandFunction,
    schedule: ConnectionSchedule | None = None,
) -> EdgeFlowReport:
    """Steady-state loads of the induced flow, folded exactly.

    Origination slots run over one joint period lcm(T, T_D) and every load
    is accumulated onto edge classes modulo that period, which equals the
    steady-state load on every concrete edge of the class.
    """
    if schedule is not None and schedule != scheme.schedule:
        raise ValueError("schedule disagrees with the scheme's schedule")
    schedule = scheme.schedule
    n = scheme.node_count
    if demand.node_count != n:
        raise ValueError("demand and scheme node counts differ")
    window = math.lcm(scheme.period, demand.period)
    rows = schedule.rows
    sched_period = schedule.period
    loads: dict[tuple[int, int], Fraction] = {
        (i, t): ZERO for t in range(window) for i in range(n)
    }
    for t in range(window):
        matrix = demand.matrix(t)
        for a in range(n):
            row = matrix[a]
            for b in range(n):
                amount = row[b]
                if amount == 0:
                    continue
                for path, weight in scheme.paths(a, b, t).items():
                    mass = amount * weight
                    node = path.origin.node
                    slot = path.origin.timeslot
                    for step in path.steps:
                        if step == "P":
                            loads[(node, slot % window)] += mass
                            node = rows[slot % sched_period][node]
                        slot += 1
    worst_key = max(loads, key=lambda k: (loads[k], -k[1], -k[0]))
    max_load = loads[worst_key]
    return EdgeFlowReport(
        node_count=n,
        period=window,
        loads={EdgeRef(*key): value for key, value in sorted(loads.items())},
        max_load=max_load,
        worst_edge=EdgeRef(*worst_key),
        feasible=max_load <= 1,
    )


def report_to_csv(report: EdgeFlowReport, stream: IO[str]) -> None:
    """Write per-edge loads as (sender, timeslot, numerator, denominator)."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["sender", "timeslot", "load_num", "load_den"])
    for edge in sorted(report.loads, key=lambda e: (e.timeslot, e.sender)):
        load = report.loads[edge]
        writer.writerow([edge.sender, edge.timeslot, load.numerator, load.denominator])


# ---------------------------------------------------------------------------
# Adversarial permutation search (heuristic above desk scale)
# ---------------------------------------------------------------------------


def _permutation_load(
    tables: dict[tuple[int, int], list[list[Fraction]]], sigma: Sequence[int]
) -> Fraction:
    worst = ZERO
    for table in tables.values():
        load = sum((table[a][b] for a, b in enumerate(sigma)), start=ZERO)
        if load > worst:
            worst = load
    return worst


def find_worst_permutation(
    scheme: RoutingScheme, seed: int = 0, restarts: int = 4
) -> tuple[tuple[int, ...], Fraction]:
    """Permutation demand maximizing per-unit-rate edge load.

    Exhaustive up to 6 nodes; above that a seeded hill-climb over
    transpositions (clearly a heuristic: the verifier's certificate is the
    authoritative adversary). Returns (sigma, load per unit rate).
    """
    tables = _weight_tables(scheme)
    n = scheme.node_count
    if n <= 6:
        best = max(
            permutations(range(n)), key=lambda sigma: _permutation_load(tables, sigma)
        )
        return tuple(best), _permutation_load(tables, best)
    rng = random.Random(seed)
    best_sigma: tuple[int, ...] = tuple(range(n))
    best_load = _permutation_load(tables, best_sigma)
    for _ in range(restarts):
        sigma = list(range(n))
        rng.shuffle(sigma)
        load = _permutation_load(tables, sigma)
        improved = True
        while improved:
            improved = False
            for i in range(n - 1):
                for j in range(i + 1, n):
                    sigma[i], sigma[j] = sigma[j], sigma[i]
                    candidate = _permutation_load(tables, sigma)
                    if candidate > load:
                        load = candidate
                        improved = True
                    else:
                        sigma[i], sigma[j] = sigma[j], sigma[i]
        if load > best_load:
            best_load = load
            best_sigma = tuple(sigma)
    return best_sigma, best_load
