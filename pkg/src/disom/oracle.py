"""Exact combinatorial oracles for validating the stochastic components.

Binomial coefficients are kept as exact integers throughout; division happens
once at the end (Python's big-int true division rounds correctly), so the
hypergeometric sums carry no accumulation error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .landscape import FrozenLandscape, SearchPoint

_CENSUS_LIMIT = 10_000_000


class LayerTooLargeError(ValueError):
    """Brute-force enumeration refused: the Hamming layer exceeds the size bound."""


@dataclass(frozen=True)
class LayerQuery:
    """Parameters of a fitness-gain question: n bits, k zeros, ell flips, gain t."""

    n: int
    k: int
    ell: int
    t: int

    def __post_init__(self):
        if not (0 <= self.k <= self.n):
            raise ValueError(f"need 0 <= k <= n, got k={self.k}, n={self.n}")
        if not (1 <= self.ell <= self.n):
            raise ValueError(f"need 1 <= ell <= n, got ell={self.ell}")
        if self.t < 0:
            raise ValueError(f"need t >= 0, got t={self.t}")


def fitness_gain_prob(q: LayerQuery) -> float:
    """Pr[OneMax gain >= t | exactly ell bits flip] for a point with k zeros.

    Gaining at least t requires at least ceil((ell + t) / 2) of the flips to
    hit zero-bits; summing the hypergeometric terms from there gives

        sum_i C(k, i) * C(n - k, ell - i) / C(n, ell).
    """
    lo = -(-(q.ell + q.t) // 2)  # ceil((ell + t) / 2)
    numerator = sum(math.comb(q.k, i) * math.comb(q.n - q.k, q.ell - i) for i in range(lo, q.ell + 1))
    return numerator / math.comb(q.n, q.ell)


def fitness_gain_exact_prob(n: int, k: int, ell: int, t: int) -> float:
    """Point-mass version: Pr[OneMax gain is exactly t], t may be negative.

    A gain of exactly t needs i = (ell + t) / 2 zero-bit flips; odd ell + t is
    impossible.  Summed over all integer t at fixed ell this is 1.
    """
    if (ell + t) % 2 != 0:
        return 0.0
    i = (ell + t) // 2
    if i < 0 or i > ell:
        return 0.0
    return math.comb(k, i) * math.comb(n - k, ell - i) / math.comb(n, ell)


def hamming_layer_size(n: int, ell: int) -> int:
    """|{y : H(x, y) = ell}| = C(n, ell), exact."""
    if not (0 <= ell <= n):
        raise ValueError(f"need 0 <= ell <= n, got ell={ell}, n={n}")
    return math.comb(n, ell)


def brute_force_layer_census(
    L: FrozenLandscape, x: SearchPoint, ell: int
) -> tuple[int, int]:
    """(distorted count, layer size) over every point at Hamming distance ell from x.

    Enumerates the full layer through the landscape; refuses layers larger
    than 10^7 points.
    """
    size = hamming_layer_size(x.n, ell)
    if size > _CENSUS_LIMIT:
        raise LayerTooLargeError(
            f"C({x.n}, {ell}) = {size} exceeds the enumeration bound {_CENSUS_LIMIT}"
        )
    distorted = 0
    base = x.bits
    for positions in combinations(range(x.n), ell):
        bits = base.copy()
        idx = np.fromiter(positions, dtype=np.int64, count=ell)
        bits[idx] ^= 1
        if L.evaluate(SearchPoint(bits)).distorted:
            distorted += 1
    return distorted, size
