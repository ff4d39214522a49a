"""Command-line front end.

Subcommands bind the generators, routers, and verifiers into reproducible
experiments:

* ``orn schedule`` emits a schedule as a JSON document (explicit
  permutation table included by default);
* ``orn route`` prints the unit flow of paths for one (src, dst, slot);
* ``orn verify`` prints the guaranteed-throughput certificate and exits
  nonzero when the requested rate is not guaranteed; optionally also runs
  an exact congestion report for a concrete demand;
* ``orn curve`` exports tradeoff-curve samples as CSV;
* ``orn inflate`` completes a demand file to exact row/column sums.

Rationals are read and written as 'p/q' strings; outputs are byte-stable
across runs for a fixed invocation (and seed, for the heuristic adversary
search).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import analysis, bounds, routing, schedules
from .core import (
    format_fraction,
    parse_fraction,
    schedule_from_document,
    schedule_to_json,
    walk_path,
)


def _load_json(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)


def _build_schedule(args) -> "schedules.ConnectionSchedule":
    if args.family == "ebs":
        if args.l is None:
            raise ValueError("--l is required for the ebs family")
        params = schedules.EbsParams(l=args.l, n=args.n)
    elif args.family == "vbs":
        if args.h is None or args.delta is None:
            raise ValueError("--h and --delta are required for the vbs family")
        params = schedules.VbsParams(h=args.h, n=args.n, delta=parse_fraction(args.delta))
    else:  # proot: --n is the field size
        x = args.x if args.x is not None else schedules.find_primitive_root(args.n)
        proot = schedules.PrimitiveRootParams(node_count=args.n, x=x)
        return schedules.primitive_root_schedule(proot, period=args.period)
    if args.double_phases is not None:
        return schedules.doubled_phase_schedule(params, d=args.double_phases)
    if args.family == "ebs":
        return schedules.ebs_schedule(params)
    return schedules.vbs_schedule(params)


def cmd_schedule(args) -> int:
    schedule = _build_schedule(args)
    _write_text(args.out, schedule_to_json(schedule, include_table=not args.no_table))
    return 0


def cmd_route(args) -> int:
    schedule = schedule_from_document(_load_json(args.schedule))
    scheme = routing.scheme_for_schedule(schedule)
    paths = scheme.paths(args.src, args.dst, args.slot)
    total = sum(paths.values())
    max_latency = max((p.latency for p in paths), default=0)
    max_hops = max((p.hops for p in paths), default=0)
    print(
        f"{len(paths)} paths from ({args.src},{args.slot}) to {args.dst}: "
        f"total weight {format_fraction(total)}, "
        f"max latency {max_latency}, max hops {max_hops}"
    )
    if args.list_paths:
        for path in sorted(paths, key=lambda p: p.steps):
            end = walk_path(schedule, path)
            print(
                f"{path.steps} weight={format_fraction(paths[path])} "
                f"latency={path.latency} hops={path.hops} "
                f"end=({end.node},{end.timeslot})"
            )
    return 0


def _parse_demand(spec: str, node_count: int, rate: Fraction) -> analysis.DemandFunction:
    if spec == "uniform":
        return analysis.uniform_demand(node_count, rate)
    if spec.startswith("perm:"):
        sigma = _load_json(spec[len("perm:") :])
        return analysis.permutation_demand(sigma, rate)
    return analysis.demand_from_document(_load_json(spec))


def cmd_verify(args) -> int:
    schedule = schedule_from_document(_load_json(args.schedule))
    if args.scheme is not None and args.scheme != schedule.family:
        raise ValueError(
            f"--scheme {args.scheme} does not match schedule family {schedule.family}"
        )
    scheme = routing.scheme_for_schedule(schedule)
    rate = parse_fraction(args.rate)
    certificate = analysis.guaranteed_throughput(scheme, threads=args.threads)
    print(f"guaranteed throughput r* = {format_fraction(certificate.rate)}")
    print(
        f"witness edge: sender {certificate.edge.sender} "
        f"timeslot {certificate.edge.timeslot} "
        f"(matching value {format_fraction(certificate.matching_value)})"
    )
    print(f"witness permutation: {list(certificate.permutation)}")
    status = 0
    if rate > certificate.rate:
        print(f"requested rate {format_fraction(rate)} is NOT guaranteed")
        status = 1
    else:
        print(f"requested rate {format_fraction(rate)} is guaranteed")
    if args.adversary_search:
        sigma, load = analysis.find_worst_permutation(scheme, seed=args.seed)
        print(
            f"heuristic worst permutation {list(sigma)} "
            f"load-per-unit-rate {format_fraction(load)}"
        )
    if args.demand is not None:
        demand = _parse_demand(args.demand, schedule.node_count, rate)
        report = analysis.congestion_report(scheme, demand)
        verdict = "feasible" if report.feasible else "INFEASIBLE"
        print(
            f"demand report: max load {format_fraction(report.max_load)} at "
            f"sender {report.worst_edge.sender} timeslot {report.worst_edge.timeslot} "
            f"-> {verdict}"
        )
        if args.report is not None:
            with open(args.report, "w", encoding="utf-8") as handle:
                analysis.report_to_csv(report, handle)
        if not report.feasible:
            status = 1
    return status


def cmd_curve(args) -> int:
    points = bounds.tradeoff_curve(
        args.nodes,
        min_inv_rate=parse_fraction(args.min_inv_rate),
        max_inv_rate=parse_fraction(args.max_inv_rate),
        samples=args.samples,
    )
    if args.out is None:
        bounds.curve_to_csv(points, sys.stdout)
    else:
        with open(args.out, "w", encoding="utf-8") as handle:
            bounds.curve_to_csv(points, handle)
    return 0


def cmd_inflate(args) -> int:
    demand = analysis.demand_from_document(_load_json(args.demand))
    inflated = analysis.inflate_demand(demand, parse_fraction(args.rate))
    text = json.dumps(analysis.demand_to_document(inflated), indent=2, sort_keys=True)
    _write_text(args.out, text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orn",
        description="Oblivious reconfigurable network designs and exact verification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sched = sub.add_parser("schedule", help="generate a connection schedule")
    p_sched.add_argument("--family", choices=["ebs", "vbs", "proot"], required=True)
    p_sched.add_argument(
        "--n", type=int, required=True,
        help="digit base for ebs/vbs; field size for proot",
    )
    p_sched.add_argument("--l", type=int, help="ebs order (number of coordinates)")
    p_sched.add_argument("--h", type=int, help="vbs order")
    p_sched.add_argument("--delta", help="vbs hop-efficient fraction, as p/q")
    p_sched.add_argument("--x", type=int, help="proot primitive root (default: smallest)")
    p_sched.add_argument("--period", type=int, help="proot period (default: N-1)")
    p_sched.add_argument(
        "--double-phases", type=int, metavar="D",
        help="repeat each phase twice for d-regular use (requires D < n-1)",
    )
    p_sched.add_argument("--no-table", action="store_true", help="omit the permutation table")
    p_sched.add_argument("--out", help="output file (default: stdout)")
    p_sched.set_defaults(handler=cmd_schedule)

    p_route = sub.add_parser("route", help="print the unit flow for one (src, dst, slot)")
    p_route.add_argument("--schedule", required=True, help="schedule JSON document")
    p_route.add_argument("--src", type=int, required=True)
    p_route.add_argument("--dst", type=int, required=True)
    p_route.add_argument("--slot", type=int, required=True)
    p_route.add_argument("--list-paths", action="store_true")
    p_route.set_defaults(handler=cmd_route)

    p_verify = sub.add_parser("verify", help="verify a guaranteed-throughput rate")
    p_verify.add_argument("--schedule", required=True, help="schedule JSON document")
    p_verify.add_argument("--scheme", choices=["ebs", "vbs"], help="routing family (default: schedule family)")
    p_verify.add_argument("--rate", required=True, help="requested rate, as p/q")
    p_verify.add_argument("--threads", type=int, help="parallel matchings (default: ORN_THREADS)")
    p_verify.add_argument("--demand", help="also report congestion: uniform | perm:FILE | demand JSON file")
    p_verify.add_argument("--report", help="CSV output for the per-edge load report")
    p_verify.add_argument("--adversary-search", action="store_true",
                          help="also run the heuristic worst-permutation search")
    p_verify.add_argument("--seed", type=int, default=0, help="seed for heuristic searches")
    p_verify.set_defaults(handler=cmd_verify)

    p_curve = sub.add_parser("curve", help="export tradeoff-curve samples as CSV")
    p_curve.add_argument("--nodes", type=int, required=True)
    p_curve.add_argument("--min-inv-rate", default="2")
    p_curve.add_argument("--max-inv-rate", default="12")
    p_curve.add_argument("--samples", type=int, default=501)
    p_curve.add_argument("--out", help="output file (default: stdout)")
    p_curve.set_defaults(handler=cmd_curve)

    p_inflate = sub.add_parser("inflate", help="complete a demand file to exact sums")
    p_inflate.add_argument("--demand", required=True, help="demand JSON document")
    p_inflate.add_argument("--rate", required=True, help="target row/column sum, as p/q")
    p_inflate.add_argument("--out", help="output file (default: stdout)")
    p_inflate.set_defaults(handler=cmd_inflate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ValueError, OSError, json.JSONDecodeError, KeyError) as error:
        print(f"error: {error}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
