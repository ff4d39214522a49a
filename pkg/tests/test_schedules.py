from __future__ import annotations

from fractions import Fraction

import pytest

from orn.schedules import (
    EbsParams,
    ExtensionField,
    PrimitiveRootParams,
    VbsParams,
    decode_digits,
    delta_cap,
    doubled_phase_schedule,
    ebs_schedule,
    encode_digits,
    find_primitive_root,
    finite_field,
    hop_efficient_phase_count,
    is_prime,
    matrix_rank_mod,
    multiplicative_order,
    primitive_root_schedule,
    prime_power_decomposition,
    solve_mod_prime,
    unroll_schedule,
    vandermonde_vector,
    vbs_schedule,
)


def assert_all_slots_are_permutations(schedule):
    reference = list(range(schedule.node_count))
    for k in range(schedule.period):
        assert sorted(schedule.permutation(k)) == reference


# ---------------------------------------------------------------------------
# Number theory helpers
# ---------------------------------------------------------------------------


def test_prime_power_decomposition():
    assert prime_power_decomposition(8) == (2, 3)
    assert prime_power_decomposition(9) == (3, 2)
    assert prime_power_decomposition(11) == (11, 1)
    assert prime_power_decomposition(12) is None
    assert prime_power_decomposition(1) is None


def test_digit_codec_round_trip():
    for value in range(27):
        assert encode_digits(decode_digits(value, 3, 3), 3) == value
    assert decode_digits(5, 3, 2) == (2, 1)  # digit 0 least significant


def test_extension_field_is_a_field():
    fld = ExtensionField(2, 3)
    nonzero = list(range(1, 8))
    # closed multiplicative group of order 7
    products = {fld.mul(a, b) for a in nonzero for b in nonzero}
    assert 0 not in products
    for a in nonzero:
        assert sorted(fld.mul(a, b) for b in nonzero) == nonzero
    assert multiplicative_order(fld, find_primitive_root(8)) == 7


def test_solve_mod_prime_and_rank():
    # 2x2 system over F_5 used by the single-basis example
    assert solve_mod_prime([[1, 1], [0, 1]], [2, 3], 5) == [4, 3]
    assert solve_mod_prime([[1], [2]], [2, 4], 5) == [2]
    assert solve_mod_prime([[1], [2]], [2, 3], 5) is None
    assert matrix_rank_mod([[1, 2], [2, 4]], 5) == 1
    assert matrix_rank_mod([[1, 0], [0, 1]], 5) == 2


# ---------------------------------------------------------------------------
# Elementary-basis schedules
# ---------------------------------------------------------------------------


def test_ebs_order_one_is_single_round_robin():
    schedule = ebs_schedule(EbsParams(l=1, n=4))
    assert schedule.period == 3
    assert schedule.rows[0][0] == 1  # slot 0 adds 1


def test_ebs_order_two_slots(ebs_9):
    assert ebs_9.period == 4
    assert ebs_9.rows[0][0] == 1  # +(1,0)
    assert ebs_9.rows[1][0] == 2  # +(2,0)
    assert ebs_9.rows[2][0] == 3  # +(0,1)
    assert ebs_9.rows[3][0] == 6  # +(0,2)
    # row (B,C) = 1 + 2*3 = 7: slot 0 adds (1,0) -> (C,C) = 8
    assert ebs_9.rows[0][7] == 8
    assert_all_slots_are_permutations(ebs_9)


def test_ebs_phase_completeness(ebs_9):
    # within one epoch, each coordinate reaches each target digit exactly once
    n, l = 3, 2
    for a in range(9):
        digits = decode_digits(a, n, l)
        for p in range(l):
            for target in range(n):
                if target == digits[p]:
                    continue
                fixing = [
                    k
                    for k in range(ebs_9.period)
                    if decode_digits(ebs_9.rows[k][a], n, l)[p] == target
                    and decode_digits(ebs_9.rows[k][a], n, l)[1 - p] == digits[1 - p]
                ]
                assert len(fixing) == 1


def test_ebs_rejects_bad_parameters():
    with pytest.raises(ValueError):
        EbsParams(l=0, n=4)
    with pytest.raises(ValueError):
        EbsParams(l=2, n=1)


# ---------------------------------------------------------------------------
# Vandermonde-bases schedules
# ---------------------------------------------------------------------------


def test_vbs_phase_zero_uses_unit_vector(vbs_25):
    # v(0) = (1, 0): slot 0 maps (x0, x1) -> (x0 + 1, x1)
    assert vbs_25.rows[0][0] == 1
    assert vbs_25.rows[0][5] == 6


def test_vbs_phase_two_scale_one():
    # v(2) = (1, 2): slot k = 4*2 + 1 - 1 = 8 maps (x0, x1) -> (x0+1, x1+2)
    schedule = vbs_schedule(VbsParams(h=1, n=5, delta=Fraction(1, 18)))
    assert schedule.rows[8][0] == encode_digits((1, 2), 5)
    assert schedule.period == 20
    assert_all_slots_are_permutations(schedule)


def test_vbs_vandermonde_windows_are_invertible():
    params = VbsParams(h=2, n=11, delta=Fraction(1, 50))
    assert delta_cap(2) == Fraction(4, 75)
    schedule = vbs_schedule(params)
    assert_all_slots_are_permutations(schedule)
    h, n, q = params.h, params.n, params.q
    for start in range(n):
        basis = [vandermonde_vector((start + j) % n, h, n) for j in range(h + 1)]
        matrix = [[basis[j][i] for j in range(h + 1)] for i in range(h + 1)]
        assert matrix_rank_mod(matrix, n) == h + 1
    # any h distinct vectors are independent as well
    from itertools import combinations

    for phases in combinations(range(n), h):
        vectors = [vandermonde_vector(p, h, n) for p in phases]
        matrix = [[vec[i] for vec in vectors] for i in range(h + 1)]
        assert matrix_rank_mod(matrix, n) == h


def test_vbs_q_selection():
    # h=1: smallest Q >= max(1, 1) with C(Q, 1) >= delta * n
    assert hop_efficient_phase_count(1, 13, Fraction(1, 18)) == 1
    assert hop_efficient_phase_count(1, 37, Fraction(1, 18)) == 3  # 37/18 > 2
    # the 2h^2 - h floor binds for h=2 even when delta is tiny
    assert hop_efficient_phase_count(2, 11, Fraction(1, 1000)) == 6


def test_vbs_rejects_invalid_parameters():
    with pytest.raises(ValueError, match="prime"):
        VbsParams(h=1, n=4, delta=Fraction(1, 18))
    with pytest.raises(ValueError, match="delta"):
        VbsParams(h=1, n=5, delta=Fraction(1, 17))  # above the 1/18 cap
    with pytest.raises(ValueError, match="n > h \\+ 1 \\+ Q"):
        VbsParams(h=2, n=3, delta=Fraction(1, 75))


# ---------------------------------------------------------------------------
# Primitive-root schedules
# ---------------------------------------------------------------------------


def test_primitive_root_schedule_powers_of_two_mod_11():
    schedule = primitive_root_schedule(PrimitiveRootParams(node_count=11, x=2))
    assert schedule.period == 10
    assert schedule.rows[0][0] == 1
    assert schedule.rows[1][0] == 2
    assert schedule.rows[2][0] == 4
    assert_all_slots_are_permutations(schedule)


def test_primitive_root_rejected_by_order_computation():
    fld = finite_field(11)
    assert multiplicative_order(fld, 3) == 5  # brute-force oracle
    with pytest.raises(ValueError, match="order 5"):
        PrimitiveRootParams(node_count=11, x=3)


def test_primitive_root_offsets_cycle_with_order():
    # x = 2 mod 13: 2^12 = 1, so a period-12 schedule ends where it began
    schedule = primitive_root_schedule(PrimitiveRootParams(node_count=13, x=2), period=12)
    offsets = [schedule.rows[k][0] for k in range(12)]
    assert offsets[0] == 1
    assert len(set(offsets)) == 12  # all nonzero residues: order is exactly 12


def test_primitive_root_on_extension_field():
    x = find_primitive_root(9)
    schedule = primitive_root_schedule(PrimitiveRootParams(node_count=9, x=x))
    assert schedule.period == 8
    assert_all_slots_are_permutations(schedule)
    offsets = {schedule.rows[k][0] for k in range(8)}
    assert offsets == set(range(1, 9))  # hits every nonzero element once


def test_primitive_root_custom_period():
    schedule = primitive_root_schedule(PrimitiveRootParams(node_count=11, x=2), period=4)
    assert schedule.period == 4


# ---------------------------------------------------------------------------
# Unrolling and doubled phases
# ---------------------------------------------------------------------------


def test_unroll_identity_for_d_one(ebs_4):
    unrolled = unroll_schedule([[row] for row in ebs_4.rows])
    assert unrolled.rows == ebs_4.rows
    assert unrolled.params["d"] == 1


def test_unroll_two_matchings_per_slot():
    sigma = [1, 0, 3, 2]
    tau = [2, 3, 0, 1]
    unrolled = unroll_schedule([[sigma, tau]])
    assert unrolled.period == 2
    assert unrolled.rows == (tuple(sigma), tuple(tau))


def test_unroll_multiplies_period_by_d():
    # a path spanning L slots of the d-regular view spans d*L slots unrolled
    slots = [[[1, 0], [1, 0]], [[0, 1], [1, 0]], [[1, 0], [0, 1]]]
    unrolled = unroll_schedule(slots)
    assert unrolled.period == 2 * 3
    assert unrolled.params["base_period"] == 3


def test_doubled_phases_repeat_each_vector(vbs_25):
    doubled = doubled_phase_schedule(VbsParams(h=1, n=5, delta=Fraction(1, 18)), d=2)
    assert doubled.period == 2 * vbs_25.period
    phase_len = 4
    for p in range(10):
        base_phase = p // 2
        for s in range(phase_len):
            assert (
                doubled.rows[p * phase_len + s]
                == vbs_25.rows[base_phase * phase_len + s]
            )
    assert doubled.params["doubled"] is True


def test_doubling_is_not_a_no_op(ebs_9):
    doubled = doubled_phase_schedule(EbsParams(l=2, n=3), d=1)
    assert doubled.period == 2 * ebs_9.period  # doubling again would quadruple


def test_doubled_phases_reject_large_d():
    with pytest.raises(ValueError, match="d < n - 1"):
        doubled_phase_schedule(VbsParams(h=1, n=5, delta=Fraction(1, 18)), d=4)
