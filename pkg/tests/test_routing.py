from __future__ import annotations

from fractions import Fraction

import pytest

from orn.core import RoutePath, VirtualNode, walk_path, path_physical_edges
from orn.routing import (
    EbsRouting,
    EbsSemiRouting,
    VbsRouting,
    ebs_full_paths,
    ebs_semi_path,
    scheme_for_schedule,
    select_design,
    vbs_full_paths,
    vbs_he_semi_path,
    vbs_sb_semi_path,
)
from orn.schedules import (
    EbsParams,
    VbsParams,
    decode_digits,
    doubled_phase_schedule,
    ebs_schedule,
    encode_digits,
    primitive_root_schedule,
    PrimitiveRootParams,
    vandermonde_vector,
    vbs_schedule,
)


def hamming(a: int, b: int, n: int, width: int) -> int:
    da, db = decode_digits(a, n, width), decode_digits(b, n, width)
    return sum(x != y for x, y in zip(da, db))


def hop_slots(path: RoutePath) -> list[int]:
    return [path.origin.timeslot + i for i, s in enumerate(path.steps) if s == "P"]


# ---------------------------------------------------------------------------
# Elementary-basis semi-paths
# ---------------------------------------------------------------------------


def test_semi_path_identity_pair(ebs_9):
    semi = ebs_semi_path(ebs_9, 4, 4, 2)
    assert semi.path.steps == ""
    assert semi.hops == 0


def test_semi_path_order_two_example(ebs_9):
    # (A,A) -> (C,B) from slot 0: wait, then +(2,0) at slot 1, +(0,1) at slot 2
    target = encode_digits((2, 1), 3)
    semi = ebs_semi_path(ebs_9, 0, target, 0)
    assert semi.path.steps == "VPP"
    assert semi.latency == 3 and semi.hops == 2
    assert walk_path(ebs_9, semi.path).node == target


def test_semi_path_round_robin_example(ebs_4):
    # A -> C from slot 0: slot 0 offers +1, slot 1 offers +2
    semi = ebs_semi_path(ebs_4, 0, 2, 0)
    assert semi.path.steps == "VP"
    assert walk_path(ebs_4, semi.path) == VirtualNode(2, 2)
    assert semi.hops == 1


def test_semi_paths_exhaustive_order_two(ebs_9):
    # hops = Hamming distance, endpoint = b, completes within one epoch
    for t in range(ebs_9.period):
        for a in range(9):
            for b in range(9):
                semi = ebs_semi_path(ebs_9, a, b, t)
                assert semi.hops == hamming(a, b, 3, 2)
                assert semi.latency <= ebs_9.period
                assert walk_path(ebs_9, semi.path).node == b


# ---------------------------------------------------------------------------
# Elementary-basis full paths
# ---------------------------------------------------------------------------


def test_full_paths_unit_flow(ebs_4):
    paths = ebs_full_paths(ebs_4, 0, 2, 0)
    assert len(paths) == 4
    assert set(paths.values()) == {Fraction(1, 4)}
    assert sum(paths.values()) == 1


def test_full_paths_structure(ebs_9):
    scheme = EbsRouting(ebs_9)
    period = scheme.period
    for t in range(period):
        for a in range(9):
            for b in range(9):
                paths = scheme.paths(a, b, t)
                assert sum(paths.values()) == 1
                for path in paths:
                    assert path.origin == VirtualNode(a, t)
                    assert walk_path(ebs_9, path).node == b
                    assert path.hops <= 4  # two stages of at most l hops
                    assert path.latency <= 2 * period


def test_full_paths_max_latency_is_two_epochs(ebs_4, ebs_9):
    for schedule, expected in ((ebs_4, 6), (ebs_9, 8)):
        scheme = EbsRouting(schedule)
        n = schedule.node_count
        worst = max(
            path.latency
            for t in range(scheme.period)
            for a in range(n)
            for b in range(n)
            for path in scheme.paths(a, b, t)
        )
        assert worst == expected


def test_full_paths_visit_intermediate_after_one_epoch(ebs_4):
    # the c-th path waits at c until t + T before the second stage
    scheme = EbsRouting(ebs_4)
    paths = scheme.paths(0, 1, 0)
    midpoints = set()
    for path in paths:
        node, slot = path.origin.node, path.origin.timeslot
        for step in path.steps[: scheme.period]:
            if step == "P":
                node = ebs_4.dest(node, slot)
            slot += 1
        midpoints.add(node)
    assert midpoints == set(range(4))


def test_semi_scheme_routes_one_unit_path(ebs_9):
    scheme = EbsSemiRouting(ebs_9)
    paths = scheme.paths(1, 5, 2)
    assert len(paths) == 1
    ((path, weight),) = paths.items()
    assert weight == 1
    assert walk_path(ebs_9, path).node == 5


# ---------------------------------------------------------------------------
# Vandermonde-bases semi-paths
# ---------------------------------------------------------------------------


def test_sb_path_identity_pair(vbs_25):
    semi = vbs_sb_semi_path(vbs_25, 0, 7, 7)
    assert semi.hops == 0
    assert semi.latency == 12  # all-virtual span of h+1+Q phases


def test_sb_path_solves_vandermonde_system(vbs_25):
    # d = (2,3) against basis (v(0), v(1)): scales 4 then 3
    b = encode_digits((2, 3), 5)
    semi = vbs_sb_semi_path(vbs_25, 0, 0, b)
    assert semi.kind == "sb"
    assert hop_slots(semi.path) == [3, 6]  # scale 4 in phase 0, scale 3 in phase 1
    assert walk_path(vbs_25, semi.path).node == b


def test_sb_paths_replay_exhaustively(vbs_25):
    scheme = VbsRouting(vbs_25)
    span = 12
    for q in range(5):
        for a in range(25):
            for b in range(25):
                semi = scheme.sb_semi_path(q, a, b)
                end = walk_path(vbs_25, semi.path)
                assert end.node == b
                assert end.timeslot == q * 4 + span
                assert semi.hops <= 2


def test_he_path_absent_for_off_span_pair(vbs_25):
    # d = (2,3) is not a multiple of v(2) = (1,2)
    assert vbs_he_semi_path(vbs_25, 0, 0, encode_digits((2, 3), 5)) is None


def test_he_path_single_candidate_multiple(vbs_25):
    # d = 4 * v(2): one hop at scale 4 in phase 2, after an all-virtual buffer
    d = tuple((4 * v) % 5 for v in vandermonde_vector(2, 1, 5))
    semi = vbs_he_semi_path(vbs_25, 0, 0, encode_digits(d, 5))
    assert semi is not None and semi.kind == "he"
    assert semi.path.steps[: 2 * 4] == "V" * 8  # buffer of h+1 phases
    assert semi.hops == 1
    assert walk_path(vbs_25, semi.path).node == encode_digits(d, 5)


def test_he_destinations_are_candidate_span(vbs_25):
    # h=1, Q=1: from any (q, a) the HE-reachable set is {a + s*v(q+2)}
    scheme = VbsRouting(vbs_25)
    for q in range(5):
        vector = vandermonde_vector((q + 2) % 5, 1, 5)
        for a in range(25):
            digits = decode_digits(a, 5, 2)
            expected = {
                encode_digits(tuple((x + s * v) % 5 for x, v in zip(digits, vector)), 5)
                for s in range(1, 5)
            }
            reachable = {
                b for b in range(25) if scheme.he_semi_path(q, a, b) is not None
            }
            assert reachable == expected
            assert len(reachable) <= 1 * (5 - 1) ** 1  # C(Q,h) * (n-1)^h


def test_sb_and_he_use_disjoint_phases(vbs_25):
    scheme = VbsRouting(vbs_25)
    phase_len = 4
    for q in range(5):
        for a in range(25):
            for b in range(25):
                sb = scheme.sb_semi_path(q, a, b)
                for slot in hop_slots(sb.path):
                    assert q <= slot // phase_len <= q + 1
                he = scheme.he_semi_path(q, a, b)
                if he is not None:
                    for slot in hop_slots(he.path):
                        assert slot // phase_len == q + 2


# ---------------------------------------------------------------------------
# Vandermonde-bases full paths
# ---------------------------------------------------------------------------


def test_vbs_full_paths_unit_flow_and_endpoints(vbs_25):
    scheme = VbsRouting(vbs_25)
    for t in (0, 1, 7):
        for a in (0, 13):
            for b in range(25):
                paths = scheme.paths(a, b, t)
                assert sum(paths.values()) == 1
                lead = (-t) % 4
                for path in paths:
                    assert path.latency == lead + 24
                    assert walk_path(vbs_25, path).node == b


def test_vbs_full_path_latency_formula(vbs_25):
    scheme = VbsRouting(vbs_25)
    # (n-1)(3 + 2h + 2Q) - 1 = 4 * 7 - 1 = 27, attained at lead n-2
    assert scheme.max_latency == 27
    worst = max(
        path.latency for t in range(scheme.period) for path in scheme.paths(0, 7, t)
    )
    assert worst == 27


def test_vbs_boundary_start_has_no_leading_virtuals(vbs_25):
    scheme = VbsRouting(vbs_25)
    paths = scheme.paths(3, 9, 4)  # slot 4 is a phase boundary
    assert all(path.latency == 24 for path in paths)


def test_vbs_second_stage_prefers_hop_efficient(vbs_25):
    # 10 = (0,2) = 2*v(0)... and also spans; count HE usage among stages
    scheme = VbsRouting(vbs_25)
    kinds = set()
    for c in range(25):
        stage = scheme.he_semi_path(3, 7, c)
        kinds.add("he" if stage is not None else "sb")
    assert kinds == {"he", "sb"}  # some intermediates are HE-reachable, most not


# ---------------------------------------------------------------------------
# Doubled-phase routing
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def vbs_49_doubled():
    return doubled_phase_schedule(VbsParams(h=1, n=7, delta=Fraction(1, 18)), d=2)


def test_doubled_vbs_routes_same_parity_phases(vbs_49_doubled):
    scheme = VbsRouting(vbs_49_doubled)
    phase_len = 6
    for t in (0, 1, 6, 13):
        expected_parity = (-(-t // phase_len)) % 2
        for b in (1, 17, 30):
            for path in scheme.paths(5, b, t):
                slots = hop_slots(path)
                assert all((s // phase_len) % 2 == expected_parity for s in slots)
                for earlier, later in zip(slots, slots[1:]):
                    assert later - earlier >= 7  # at least n-1 apart
                assert walk_path(vbs_49_doubled, path).node == b


def test_doubled_vbs_latency_at_most_twice_base(vbs_49_doubled):
    base = vbs_schedule(VbsParams(h=1, n=7, delta=Fraction(1, 18)))
    doubled_scheme = VbsRouting(vbs_49_doubled)
    base_scheme = VbsRouting(base)
    assert doubled_scheme.max_latency <= 2 * base_scheme.max_latency


def test_doubled_ebs_greedy_respects_parity():
    schedule = doubled_phase_schedule(EbsParams(l=2, n=5), d=2)
    scheme = EbsRouting(schedule)
    phase_len = 4
    for t in (0, 3, 9):
        expected_parity = (-(-t // phase_len)) % 2
        for a in (0, 12):
            for b in range(25):
                semi = ebs_semi_path(schedule, a, b, t)
                assert walk_path(schedule, semi.path).node == b
                assert semi.latency <= schedule.period
                for slot in hop_slots(semi.path):
                    assert (slot // phase_len) % 2 == expected_parity
                paths = scheme.paths(a, b, t)
                assert sum(paths.values()) == 1
                assert all(p.latency <= 2 * schedule.period for p in paths)


# ---------------------------------------------------------------------------
# Scheme construction and design selection
# ---------------------------------------------------------------------------


def test_scheme_for_schedule_dispatch(ebs_4, vbs_25):
    assert isinstance(scheme_for_schedule(ebs_4), EbsRouting)
    assert isinstance(scheme_for_schedule(vbs_25), VbsRouting)
    proot = primitive_root_schedule(PrimitiveRootParams(node_count=11, x=2))
    with pytest.raises(ValueError, match="no routing scheme"):
        scheme_for_schedule(proot)


def test_select_design_integer_inverse_rates_pick_elementary_basis():
    quarter = select_design(Fraction(1, 4), 81)
    assert quarter.family == "ebs" and quarter.h == 2
    assert quarter.compatible and quarter.n == 9
    half = select_design(Fraction(1, 2), 10)
    assert half.family == "ebs" and half.h == 1 and half.n == 10


def test_select_design_small_eps_picks_vandermonde():
    rate = Fraction(50, 199)  # 1/(2r) = 199/100: h=1, eps=1/100
    choice = select_design(rate, 25)
    assert choice.family == "vbs"
    assert choice.h == 1 and choice.delta == Fraction(1, 25)
    assert choice.compatible and choice.n == 5
    assert choice.params() == VbsParams(h=1, n=5, delta=Fraction(1, 25))


def test_select_design_reports_incompatible_node_counts():
    choice = select_design(Fraction(1, 4), 10)  # 10 is not a perfect square
    assert choice.family == "ebs" and not choice.compatible
    assert "perfect 2-th power" in choice.required_form
    with pytest.raises(ValueError, match="incompatible"):
        choice.params()


def test_select_design_rejects_out_of_range_rates():
    with pytest.raises(ValueError):
        select_design(Fraction(2, 3), 16)
    with pytest.raises(ValueError):
        select_design(Fraction(0), 16)
