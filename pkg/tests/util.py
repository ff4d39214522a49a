"""Shared test helpers: independent oracles and random-instance generators."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import permutations

from orn.core import DemandFunction


def brute_force_matching(weights) -> tuple[Fraction, tuple[int, ...]]:
    """Factorial-time assignment oracle: max over all permutations."""
    n = len(weights)
    best = None
    best_sigma: tuple[int, ...] = ()
    for sigma in permutations(range(n)):
        value = sum((weights[i][sigma[i]] for i in range(n)), start=Fraction(0))
        if best is None or value > best:
            best, best_sigma = value, sigma
    return best, best_sigma


def random_fraction(rng: random.Random, max_value: Fraction = Fraction(1)) -> Fraction:
    denominator = rng.randint(1, 12)
    numerator = rng.randint(0, denominator)
    return Fraction(numerator, denominator) * max_value


def random_substochastic(
    rng: random.Random, node_count: int, rate: Fraction
) -> DemandFunction:
    """A demand matrix with every row and column sum at most ``rate``."""
    raw = [[Fraction(rng.randint(0, 9)) for _ in range(node_count)] for _ in range(node_count)]
    worst = max(
        max(sum(row, start=Fraction(0)) for row in raw),
        max(
            sum((raw[i][j] for i in range(node_count)), start=Fraction(0))
            for j in range(node_count)
        ),
    )
    if worst == 0:
        return DemandFunction([raw])
    scale = rate * random_fraction(rng) / worst
    return DemandFunction([[[value * scale for value in row] for row in raw]])
