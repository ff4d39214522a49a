"""Oblivious routing schemes for the generated schedule families.

Both families route with Valiant load balancing: a full path from (a, t) to
b concatenates two *semi-paths* through a uniformly weighted intermediate
node c, giving N paths of weight 1/N each.

Elementary-basis semi-paths are greedy: traverse the outgoing physical edge
whenever it matches the destination in the modified coordinate (decreasing
Hamming distance), otherwise wait. Vandermonde semi-paths come in two kinds:
single-basis (SB) paths solve Y s = b - a against the basis of the next
h + 1 phase vectors and hop once per nonzero coefficient, while
hop-efficient (HE) paths wait out an all-virtual buffer of h + 1 phases and
then spend at most h hops among the following Q phases. HE paths are used
whenever one exists for the pair, independently per semi-path stage.

On doubled-phase schedules every routed semi-path draws its hops from
all-even or all-odd phases (the parity of the first full phase after the
request), keeping physical hops at least n - 1 slots apart.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .core import ConnectionSchedule, RoutePath, RoutingScheme, VirtualNode, PHYSICAL, VIRTUAL
from .schedules import (
    EbsParams,
    VbsParams,
    decode_digits,
    delta_cap,
    hop_efficient_phase_count,
    is_prime,
    solve_mod_prime,
    vandermonde_vector,
)

SB = "sb"
HE = "he"
GREEDY = "greedy"


@dataclass(frozen=True)
class SemiPath:
    """One load-balancing stage: a path from (a, t) to the destination's
    timeline, tagged with the strategy that produced it."""

    path: RoutePath
    kind: str

    @property
    def latency(self) -> int:
        return self.path.latency

    @property
    def hops(self) -> int:
        return self.path.hops


def _schedule_geometry(schedule: ConnectionSchedule) -> tuple[int, int, bool]:
    """(digit base n, coordinate count, doubled?) of a basis schedule."""
    params = schedule.params
    n = int(params["n"])
    if schedule.family == "ebs":
        width = int(params["l"])
    elif schedule.family == "vbs":
        width = int(params["h"]) + 1
    else:
        raise ValueError(f"no routing scheme defined for family {schedule.family!r}")
    return n, width, bool(params.get("doubled"))


def _first_full_phase(t: int, phase_len: int) -> int:
    return -(-t // phase_len)  # ceil division


# ---------------------------------------------------------------------------
# Elementary-basis routing
# ---------------------------------------------------------------------------


def _ebs_vector_index(phase: int, l: int, doubled: bool) -> int:
    return (phase // 2) % l if doubled else phase % l


def ebs_semi_path(schedule: ConnectionSchedule, a: int, b: int, t: int) -> SemiPath:
    """Greedy coordinate-fixing walk from (a, t) to b's timeline.

    Hops equal the Hamming distance between the coordinate tuples of a and
    b, and the walk completes within one epoch (one doubled epoch on a
    doubled-phase schedule).
    """
    if schedule.family != "ebs":
        raise ValueError("greedy semi-paths are defined on elementary-basis schedules")
    n, l, doubled = _schedule_geometry(schedule)
    phase_len = n - 1
    parity = _first_full_phase(t, phase_len) % 2 if doubled else None
    target = decode_digits(b, n, l)
    node_digits = list(decode_digits(a, n, l))
    steps = []
    slot = t
    budget = 2 * schedule.period + phase_len
    while tuple(node_digits) != target:
        phase, scale_index = divmod(slot, phase_len)
        s = scale_index + 1
        coord = _ebs_vector_index(phase, l, doubled)
        take = (node_digits[coord] + s) % n == target[coord]
        if doubled and phase % 2 != parity:
            take = False
        if take:
            node_digits[coord] = target[coord]
            steps.append(PHYSICAL)
        else:
            steps.append(VIRTUAL)
        slot += 1
        if slot - t > budget:
            raise AssertionError("greedy walk failed to terminate within an epoch")
    return SemiPath(RoutePath(VirtualNode(a, t), "".join(steps)), GREEDY)


class EbsRouting(RoutingScheme):
    """Valiant load balancing over greedy semi-paths.

    The second stage starts exactly one epoch after the first: the path
    waits at the intermediate node until t + T before heading to the
    destination, so every full path has latency in [T, 2T].
    """

    def __init__(self, schedule: ConnectionSchedule):
        if schedule.family != "ebs":
            raise ValueError("EbsRouting requires an elementary-basis schedule")
        super().__init__(schedule, schedule.period, 2 * schedule.period)
        self._semi_cache: dict[tuple[int, int, int], str] = {}

    def semi_steps(self, a: int, b: int, t: int) -> str:
        key = (t % self.period, a, b)
        steps = self._semi_cache.get(key)
        if steps is None:
            semi = ebs_semi_path(self.schedule, a, b, key[0])
            if semi.latency > self.period:
                raise AssertionError("semi-path exceeded one epoch")
            steps = semi.path.steps
            self._semi_cache[key] = steps
        return steps

    def base_paths(self, a: int, b: int, t: int) -> dict[RoutePath, Fraction]:
        period = self.period
        weight = Fraction(1, self.node_count)
        origin = VirtualNode(a, t)
        out: dict[RoutePath, Fraction] = {}
        for c in range(self.node_count):
            first = self.semi_steps(a, c, t)
            second = self.semi_steps(c, b, t + period)
            padding = VIRTUAL * (period - len(first))
            out[RoutePath(origin, first + padding + second)] = weight
        return out


def ebs_full_paths(
    schedule: ConnectionSchedule, a: int, b: int, t: int
) -> dict[RoutePath, Fraction]:
    """The unit flow of N load-balanced paths from (a, t) to b's timeline."""
    return EbsRouting(schedule).paths(a, b, t)


class EbsSemiRouting(RoutingScheme):
    """Single-stage greedy semi-paths as a unit-flow scheme.

    Routes each (a, b, t) along its one greedy semi-path at weight 1. Used
    to account for the two load-balancing stages of the full scheme
    separately: under a demand with all row and column sums equal to r,
    each stage of the full scheme loads every edge exactly like this scheme
    under uniform all-to-all demand at rate r.
    """

    def __init__(self, schedule: ConnectionSchedule):
        if schedule.family != "ebs":
            raise ValueError("EbsSemiRouting requires an elementary-basis schedule")
        super().__init__(schedule, schedule.period, schedule.period)

    def base_paths(self, a: int, b: int, t: int) -> dict[RoutePath, Fraction]:
        return {ebs_semi_path(self.schedule, a, b, t).path: Fraction(1)}


# ---------------------------------------------------------------------------
# Vandermonde-bases routing
# ---------------------------------------------------------------------------


class VbsRouting(RoutingScheme):
    """Valiant load balancing over SB/HE semi-paths.

    Semi-paths are only defined starting at phase boundaries, so a path
    first traverses up to n - 2 virtual edges; each semi-path then spans
    exactly h + 1 + Q phases and the second stage starts h + 1 + Q phases
    after the first.
    """

    def __init__(self, schedule: ConnectionSchedule):
        if schedule.family != "vbs":
            raise ValueError("VbsRouting requires a Vandermonde-bases schedule")
        params = schedule.params
        self.h = int(params["h"])
        self.n = int(params["n"])
        self.q_phases = int(params["q"])
        self.doubled = bool(params.get("doubled"))
        self.stride = 2 if self.doubled else 1
        self.phase_len = self.n - 1
        self.span_phases = (self.h + 1 + self.q_phases) * self.stride
        max_latency = (self.n - 2) + 2 * self.span_phases * self.phase_len
        super().__init__(schedule, schedule.period, max_latency)
        self._semi_cache: dict[tuple[int, int, int], str] = {}
        self._phase_count = schedule.period // self.phase_len

    def _vector(self, phase: int) -> tuple[int, ...]:
        index = (phase // 2) if self.doubled else phase
        return vandermonde_vector(index % self.n, self.h, self.n)

    def _distance(self, a: int, b: int) -> tuple[int, ...]:
        da = decode_digits(a, self.n, self.h + 1)
        db = decode_digits(b, self.n, self.h + 1)
        return tuple((y - x) % self.n for x, y in zip(da, db))

    def _steps_from_hops(self, hops: dict[int, int]) -> str:
        """Render a semi-path as steps; hops maps phase offset -> scale."""
        chars = []
        for offset in range(self.span_phases):
            scale = hops.get(offset, 0)
            for s in range(1, self.n):
                chars.append(PHYSICAL if s == scale else VIRTUAL)
        return "".join(chars)

    def sb_semi_path(self, q: int, a: int, b: int) -> SemiPath:
        """Single-basis semi-path starting at the first slot of phase q.

        Solves the Vandermonde system over F_n for the basis of phases
        q, q+stride, ..., then hops once per nonzero coefficient and waits
        out Q further phases.
        """
        d = self._distance(a, b)
        basis = [self._vector(q + j * self.stride) for j in range(self.h + 1)]
        matrix = [[basis[j][i] for j in range(self.h + 1)] for i in range(self.h + 1)]
        solution = solve_mod_prime(matrix, d, self.n)
        if solution is None:  # basis is invertible, so this cannot happen
            raise AssertionError("Vandermonde basis failed to span the distance vector")
        hops = {
            j * self.stride: s for j, s in enumerate(solution) if s
        }
        path = RoutePath(
            VirtualNode(a, q * self.phase_len), self._steps_from_hops(hops)
        )
        return SemiPath(path, SB)

    def he_semi_path(self, q: int, a: int, b: int) -> SemiPath | None:
        """Hop-efficient semi-path, or None when the pair has none.

        After an all-virtual buffer of h + 1 phases the walk may hop in at
        most h of the next Q phases. The canonical choice is the
        lexicographically smallest set of candidate phase offsets whose
        vectors span b - a; the scale vector is then unique.
        """
        if a == b:
            return None
        d = self._distance(a, b)
        candidates = [
            self._vector(q + (self.h + 1 + j) * self.stride)
            for j in range(self.q_phases)
        ]
        for chosen in combinations(range(self.q_phases), self.h):  # Q >= h by construction
            matrix = [[candidates[j][i] for j in chosen] for i in range(self.h + 1)]
            solution = solve_mod_prime(matrix, d, self.n)
            if solution is None:
                continue
            hops = {
                (self.h + 1 + chosen[idx]) * self.stride: s
                for idx, s in enumerate(solution)
                if s
            }
            path = RoutePath(
                VirtualNode(a, q * self.phase_len), self._steps_from_hops(hops)
            )
            return SemiPath(path, HE)
        return None

    def semi_steps(self, q: int, a: int, b: int) -> str:
        key = (q % self._phase_count, a, b)
        steps = self._semi_cache.get(key)
        if steps is None:
            semi = self.he_semi_path(key[0], a, b) or self.sb_semi_path(key[0], a, b)
            steps = semi.path.steps
            self._semi_cache[key] = steps
        return steps

    def base_paths(self, a: int, b: int, t: int) -> dict[RoutePath, Fraction]:
        lead = (-t) % self.phase_len
        q0 = (t + lead) // self.phase_len
        q1 = q0 + self.span_phases
        weight = Fraction(1, self.node_count)
        origin = VirtualNode(a, t)
        prefix = VIRTUAL * lead
        out: dict[RoutePath, Fraction] = {}
        for c in range(self.node_count):
            steps = prefix + self.semi_steps(q0, a, c) + self.semi_steps(q1, c, b)
            out[RoutePath(origin, steps)] = weight
        return out


def vbs_sb_semi_path(schedule: ConnectionSchedule, q: int, a: int, b: int) -> SemiPath:
    return VbsRouting(schedule).sb_semi_path(q, a, b)


def vbs_he_semi_path(
    schedule: ConnectionSchedule, q: int, a: int, b: int
) -> SemiPath | None:
    return VbsRouting(schedule).he_semi_path(q, a, b)


def vbs_full_paths(
    schedule: ConnectionSchedule, a: int, b: int, t: int
) -> dict[RoutePath, Fraction]:
    return VbsRouting(schedule).paths(a, b, t)


def scheme_for_schedule(schedule: ConnectionSchedule) -> RoutingScheme:
    """The routing scheme paired with a generated schedule family."""
    if schedule.family == "ebs":
        return EbsRouting(schedule)
    if schedule.family == "vbs":
        return VbsRouting(schedule)
    raise ValueError(f"no routing scheme defined for family {schedule.family!r}")


# ---------------------------------------------------------------------------
# Design selection
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DesignChoice:
    """Which design family serves a target rate, with its parameters.

    ``compatible`` records whether the requested node count fits the
    family's required form; ``required_form`` describes that form either
    way.
    """

    family: str
    rate: Fraction
    h: int
    delta: Fraction | None
    node_count: int
    n: int | None
    compatible: bool
    required_form: str

    def params(self) -> EbsParams | VbsParams:
        if not self.compatible:
            raise ValueError(f"N={self.node_count} is incompatible: {self.required_form}")
        if self.family == "ebs":
            return EbsParams(l=self.h, n=self.n)
        return VbsParams(h=self.h, n=self.n, delta=self.delta)


def _integer_root(value: int, k: int) -> int | None:
    root = round(value ** (1.0 / k))
    for candidate in (root - 1, root, root + 1):
        if candidate >= 1 and candidate**k == value:
            return candidate
    return None


def select_design(r: Fraction, node_count: int) -> DesignChoice:
    """Pick the lower-latency family guaranteeing throughput r on N nodes.

    Decomposing 1/(2r) = h + 1 - eps, the Vandermonde design with
    delta = 4*eps applies while delta stays below its admissibility cap;
    otherwise the elementary-basis design of order h is used.
    """
    from .bounds import decompose_rate

    decomposition = decompose_rate(r)
    h, eps = decomposition.h, decomposition.eps
    delta = 4 * eps
    if 0 < delta <= delta_cap(h):
        n = _integer_root(node_count, h + 1)
        if n is None or not is_prime(n):
            compatible = False
            n_ok = None
        else:
            q = hop_efficient_phase_count(h, n, delta)
            compatible = n > h + 1 + q
            n_ok = n if compatible else None
        required = (
            f"N must be n^{h + 1} for a prime n with n > h + 1 + Q "
            f"(h={h}, delta={delta})"
        )
        return DesignChoice(
            family="vbs",
            rate=Fraction(r),
            h=h,
            delta=delta,
            node_count=node_count,
            n=n_ok,
            compatible=compatible,
            required_form=required,
        )
    n = _integer_root(node_count, h)
    compatible = n is not None and n >= 2
    return DesignChoice(
        family="ebs",
        rate=Fraction(r),
        h=h,
        delta=None,
        node_count=node_count,
        n=n if compatible else None,
        compatible=compatible,
        required_form=f"N must be a perfect {h}-th power n^{h} with n >= 2",
    )
