"""Connection-schedule generators.

Three design families plus two transformations:

* elementary-basis (``ebs``): nodes are length-l digit tuples over Z/n and
  slot (n-1)*p + s - 1 sends i to i + s*e_p, i.e. one n-node round robin per
  coordinate phase, epoch length l*(n-1);
* Vandermonde-bases (``vbs``): nodes are vectors in F_n^(h+1) for prime n and
  phase p uses the direction vector v(p) = (1, p, p^2, ..., p^h), period
  n*(n-1);
* primitive-root (``proot``): nodes are the field with N elements and slot k
  sends i to i + x^k for a primitive root x;
* ``unroll_schedule`` flattens d permutations per slot into d consecutive
  1-regular slots;
* ``doubled_phase_schedule`` repeats every phase twice so that routing
  restricted to same-parity phases never uses two physical hops within d
  consecutive slots (d < n-1).

Node ids encode coordinate tuples in mixed radix, digit 0 least significant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .core import ConnectionSchedule


# ---------------------------------------------------------------------------
# Small number theory and finite fields
# ---------------------------------------------------------------------------


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def prime_power_decomposition(n: int) -> tuple[int, int] | None:
    """Return (p, k) with n == p**k and p prime, or None."""
    if n < 2:
        return None
    p = 2
    while p * p <= n:
        if n % p == 0:
            k = 0
            m = n
            while m % p == 0:
                m //= p
                k += 1
            return (p, k) if m == 1 else None
        p += 1
    return (n, 1)


def encode_digits(digits: Sequence[int], base: int) -> int:
    """Mixed-radix encode, digit 0 least significant."""
    value = 0
    for digit in reversed(digits):
        value = value * base + digit
    return value


def decode_digits(value: int, base: int, width: int) -> tuple[int, ...]:
    digits = []
    for _ in range(width):
        digits.append(value % base)
        value //= base
    return tuple(digits)


class PrimeField:
    """Arithmetic on [0, p) for prime p."""

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.size = p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.size

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.size


class ExtensionField:
    """GF(p^k) with elements encoded as base-p digit strings of length k.

    Multiplication reduces polynomial products modulo a monic irreducible
    found by exhaustive search; addition is digit-wise mod p, which matches
    the integer encoding used for node ids.
    """

    def __init__(self, p: int, k: int):
        if not is_prime(p) or k < 2:
            raise ValueError("extension field needs prime p and k >= 2")
        self.p = p
        self.k = k
        self.size = p**k
        self.modulus = self._find_irreducible()

    def _poly_mul(self, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] = (out[i + j] + ai * bj) % self.p
        return tuple(out)

    def _poly_mod(self, a: Sequence[int], m: Sequence[int]) -> tuple[int, ...]:
        # m is monic; coefficients ascending, index = degree
        a = list(a)
        dm = len(m) - 1
        for i in range(len(a) - 1, dm - 1, -1):
            coeff = a[i] % self.p
            if coeff:
                for j in range(dm + 1):
                    a[i - dm + j] = (a[i - dm + j] - coeff * m[j]) % self.p
        return tuple(c % self.p for c in a[:dm])

    def _find_irreducible(self) -> tuple[int, ...]:
        # Trial division by all monic polynomials of degree <= k//2.
        p, k = self.p, self.k
        divisors = []
        for deg in range(1, k // 2 + 1):
            for body in range(p**deg):
                divisors.append(decode_digits(body, p, deg) + (1,))
        for body in range(p**k):
            candidate = decode_digits(body, p, k) + (1,)
            if all(any(self._poly_mod(candidate, d)) for d in divisors):
                return candidate
        raise RuntimeError("no irreducible polynomial found")  # unreachable

    def add(self, a: int, b: int) -> int:
        da = decode_digits(a, self.p, self.k)
        db = decode_digits(b, self.p, self.k)
        return encode_digits(tuple((x + y) % self.p for x, y in zip(da, db)), self.p)

    def mul(self, a: int, b: int) -> int:
        da = decode_digits(a, self.p, self.k)
        db = decode_digits(b, self.p, self.k)
        product = self._poly_mod(self._poly_mul(da, db), self.modulus)
        return encode_digits(product + (0,) * (self.k - len(product)), self.p)


def finite_field(size: int) -> PrimeField | ExtensionField:
    decomposition = prime_power_decomposition(size)
    if decomposition is None:
        raise ValueError(f"{size} is not a prime power")
    p, k = decomposition
    return PrimeField(p) if k == 1 else ExtensionField(p, k)


def multiplicative_order(fld: PrimeField | ExtensionField, x: int) -> int:
    if x == 0:
        raise ValueError("0 has no multiplicative order")
    power = x
    order = 1
    while power != 1:
        power = fld.mul(power, x)
        order += 1
        if order > fld.size:
            raise RuntimeError("order computation diverged")
    return order


def is_primitive_root(fld: PrimeField | ExtensionField, x: int) -> bool:
    return x != 0 and multiplicative_order(fld, x) == fld.size - 1


def find_primitive_root(size: int) -> int:
    """Smallest primitive root of GF(size) under the integer encoding."""
    fld = finite_field(size)
    for x in range(2, size):
        if is_primitive_root(fld, x):
            return x
    raise ValueError(f"no primitive root in GF({size})")  # only GF(2), GF(3) corner


# ---------------------------------------------------------------------------
# Modular linear algebra (used by Vandermonde routing and tests)
# ---------------------------------------------------------------------------


def solve_mod_prime(
    matrix: Sequence[Sequence[int]], rhs: Sequence[int], p: int
) -> list[int] | None:
    """Solve matrix @ x = rhs over F_p, or return None when inconsistent.

    The matrix may be rectangular (rows x cols). When the system is
    underdetermined, free variables are set to 0.
    """
    rows = [list(row) + [r % p] for row, r in zip(matrix, rhs)]
    n_rows = len(rows)
    n_cols = len(matrix[0]) if matrix else 0
    pivot_cols: list[int] = []
    r = 0
    for c in range(n_cols):
        pivot = next((i for i in range(r, n_rows) if rows[i][c] % p), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [(v * inv) % p for v in rows[r]]
        for i in range(n_rows):
            if i != r and rows[i][c] % p:
                factor = rows[i][c]
                rows[i] = [(vi - factor * vr) % p for vi, vr in zip(rows[i], rows[r])]
        pivot_cols.append(c)
        r += 1
        if r == n_rows:
            break
    for i in range(r, n_rows):
        if rows[i][-1] % p:
            return None
    solution = [0] * n_cols
    for i, c in enumerate(pivot_cols):
        solution[c] = rows[i][-1] % p
    return solution


def matrix_rank_mod(matrix: Sequence[Sequence[int]], p: int) -> int:
    rows = [[v % p for v in row] for row in matrix]
    rank = 0
    n_cols = len(rows[0]) if rows else 0
    for c in range(n_cols):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = pow(rows[rank][c], -1, p)
        rows[rank] = [(v * inv) % p for v in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][c]:
                factor = rows[i][c]
                rows[i] = [(vi - factor * vr) % p for vi, vr in zip(rows[i], rows[rank])]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# Design parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EbsParams:
    """Elementary-basis design of order ``l`` over digit base ``n``."""

    l: int
    n: int

    def __post_init__(self):
        if self.l < 1:
            raise ValueError("order must be >= 1")
        if self.n < 2:
            raise ValueError("digit base must be >= 2")

    @property
    def node_count(self) -> int:
        return self.n**self.l

    @property
    def period(self) -> int:
        return self.l * (self.n - 1)


def delta_cap(h: int) -> Fraction:
    """Largest admissible hop-efficient fraction: 1 / (4(h+1)(1 + 1/(2h))^2)."""
    return Fraction(h * h, (h + 1) * (2 * h + 1) ** 2)


def hop_efficient_phase_count(h: int, n: int, delta: Fraction) -> int:
    """Smallest Q >= max(h, 2h^2 - h) with C(Q, h) >= delta * n.

    The 2h^2 - h floor keeps the throughput analysis applicable regardless
    of how small delta is.
    """
    q = max(h, 2 * h * h - h)
    while Fraction(math.comb(q, h)) < delta * n:
        q += 1
    return q


@dataclass(frozen=True)
class VbsParams:
    """Vandermonde-bases design: N = n^(h+1) nodes for prime n.

    ``delta`` is the target fraction of node pairs joined by hop-efficient
    semi-paths; ``q`` (derived) is how many future phases those paths may
    draw hops from.
    """

    h: int
    n: int
    delta: Fraction

    def __post_init__(self):
        if self.h < 1:
            raise ValueError("h must be >= 1")
        if not is_prime(self.n):
            raise ValueError(f"base {self.n} must be prime")
        delta = Fraction(self.delta)
        object.__setattr__(self, "delta", delta)
        if not 0 < delta <= delta_cap(self.h):
            raise ValueError(
                f"delta must lie in (0, {delta_cap(self.h)}] for h={self.h}"
            )
        q = hop_efficient_phase_count(self.h, self.n, delta)
        if self.n <= self.h + 1 + q:
            raise ValueError(
                f"need n > h + 1 + Q = {self.h + 1 + q} for disjoint phase windows; "
                f"n={self.n} is too small"
            )
        object.__setattr__(self, "q", q)

    q: int = field(init=False)

    @property
    def node_count(self) -> int:
        return self.n ** (self.h + 1)

    @property
    def period(self) -> int:
        return self.n * (self.n - 1)


@dataclass(frozen=True)
class PrimitiveRootParams:
    """Prime-power field size and a generator of its multiplicative group."""

    node_count: int
    x: int

    def __post_init__(self):
        fld = finite_field(self.node_count)
        if not 1 <= self.x < self.node_count:
            raise ValueError("x must be a nonzero field element")
        if not is_primitive_root(fld, self.x):
            order = multiplicative_order(fld, self.x)
            raise ValueError(
                f"{self.x} has multiplicative order {order} < {self.node_count - 1}, "
                "not a primitive root"
            )


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


def _basis_rows(
    node_count: int, n: int, phase_vectors: Sequence[Sequence[int]], width: int
) -> list[list[int]]:
    """Rows for slot (n-1)*p + s - 1 sending i to i + s * vector(p)."""
    coords = [decode_digits(i, n, width) for i in range(node_count)]
    rows = []
    for vector in phase_vectors:
        for s in range(1, n):
            offset = tuple((s * v) % n for v in vector)
            row = [
                encode_digits(tuple((c + o) % n for c, o in zip(coord, offset)), n)
                for coord in coords
            ]
            rows.append(row)
    return rows


def ebs_schedule(params: EbsParams) -> ConnectionSchedule:
    """Round-robin-per-coordinate schedule with epoch length l*(n-1)."""
    vectors = []
    for p in range(params.l):
        basis = [0] * params.l
        basis[p] = 1
        vectors.append(basis)
    rows = _basis_rows(params.node_count, params.n, vectors, params.l)
    return ConnectionSchedule(
        rows, family="ebs", params={"l": params.l, "n": params.n}
    )


def vandermonde_vector(p: int, h: int, n: int) -> tuple[int, ...]:
    return tuple(pow(p, j, n) for j in range(h + 1))


def vbs_schedule(params: VbsParams) -> ConnectionSchedule:
    """Vandermonde-bases schedule: phase p uses v(p) = (1, p, ..., p^h)."""
    vectors = [vandermonde_vector(p, params.h, params.n) for p in range(params.n)]
    rows = _basis_rows(params.node_count, params.n, vectors, params.h + 1)
    return ConnectionSchedule(
        rows,
        family="vbs",
        params={"h": params.h, "n": params.n, "delta": params.delta, "q": params.q},
    )


def primitive_root_schedule(
    params: PrimitiveRootParams, period: int | None = None
) -> ConnectionSchedule:
    """Slot k sends i to i + x^k in GF(N).

    The design leaves the period open; the default is one full cycle of
    powers, T = N - 1.
    """
    fld = finite_field(params.node_count)
    if period is None:
        period = params.node_count - 1
    if period < 1:
        raise ValueError("period must be >= 1")
    rows = []
    offset = 1  # x^0 at slot 0
    for _ in range(period):
        rows.append([fld.add(i, offset) for i in range(params.node_count)])
        offset = fld.mul(offset, params.x)
    return ConnectionSchedule(
        rows,
        family="proot",
        params={"x": params.x, "node_count": params.node_count},
    )


def unroll_schedule(
    slots: Sequence[Sequence[Sequence[int]]],
    family: str = "unrolled",
) -> ConnectionSchedule:
    """Flatten a d-regular schedule given as d permutations per slot.

    The d-regular connectivity of each slot must already be decomposed into
    d permutations (edge-disjoint perfect matchings); slot t's j-th
    permutation lands at 1-regular slot t*d + j, so the output period is d
    times the input period and a path spanning L d-regular slots spans d*L
    unrolled slots.
    """
    if not slots:
        raise ValueError("need at least one slot")
    d = len(slots[0])
    if d < 1 or any(len(slot) != d for slot in slots):
        raise ValueError("every slot must carry the same number d >= 1 of permutations")
    rows = [perm for slot in slots for perm in slot]
    return ConnectionSchedule(
        rows, family=family, params={"d": d, "base_period": len(slots)}
    )


def doubled_phase_schedule(
    base: EbsParams | VbsParams, d: int = 2
) -> ConnectionSchedule:
    """Iterate every phase twice so routing can keep its hops d slots apart.

    Phase p of the doubled schedule uses the base schedule's phase p // 2
    direction vector. Applicable for target regularity d < n - 1; routed
    paths then restrict their hops to all-even or all-odd phases, spacing
    any two physical hops at least n - 1 slots apart.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    if d >= base.n - 1:
        raise ValueError(f"doubled phases require d < n - 1 = {base.n - 1}")
    if isinstance(base, EbsParams):
        width = base.l
        base_vectors = []
        for p in range(base.l):
            vec = [0] * base.l
            vec[p] = 1
            base_vectors.append(vec)
        family = "ebs"
        params: dict[str, object] = {"l": base.l, "n": base.n}
    else:
        width = base.h + 1
        base_vectors = [
            list(vandermonde_vector(p, base.h, base.n)) for p in range(base.n)
        ]
        family = "vbs"
        params = {"h": base.h, "n": base.n, "delta": base.delta, "q": base.q}
    doubled_vectors = [base_vectors[p // 2] for p in range(2 * len(base_vectors))]
    rows = _basis_rows(base.node_count, base.n, doubled_vectors, width)
    params.update({"doubled": True, "d": d})
    return ConnectionSchedule(rows, family=family, params=params)


def generate_from_params(
    family: str, params: Mapping[str, object], document: Mapping[str, object]
) -> ConnectionSchedule:
    """Regenerate a schedule from a document that omits the explicit table."""
    if family == "ebs":
        base = EbsParams(l=int(params["l"]), n=int(params["n"]))
        if params.get("doubled"):
            return doubled_phase_schedule(base, d=int(params.get("d", 2)))
        return ebs_schedule(base)
    if family == "vbs":
        base = VbsParams(
            h=int(params["h"]), n=int(params["n"]), delta=Fraction(params["delta"])
        )
        if params.get("doubled"):
            return doubled_phase_schedule(base, d=int(params.get("d", 2)))
        return vbs_schedule(base)
    if family == "proot":
        proot = PrimitiveRootParams(
            node_count=int(params["node_count"]), x=int(params["x"])
        )
        return primitive_root_schedule(proot, period=document.get("period"))
    raise ValueError(f"cannot regenerate schedule family {family!r} without a table")
