"""Frozen distorted-OneMax landscape.

A landscape is (n, p, distribution, seed).  Every point's fitness is OneMax
plus, with probability p, an additive distortion drawn once per point from
the distribution.  "Once" is realized without storage: the keyed PRF of the
point's canonical encoding yields two uniforms, one deciding distorted-or-not
and one feeding the quantile function, so re-evaluating any point is
bit-identical and the full 2^n landscape never materializes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import prf
from .distributions import DistortionSpec, _quantile


class DimensionError(ValueError):
    """Point length does not match the landscape or partner point."""


class SearchPoint:
    """Fixed-length bit vector.  Treat as immutable once constructed."""

    __slots__ = ("bits",)

    def __init__(self, bits):
        arr = np.asarray(bits, dtype=np.uint8)
        if arr.ndim != 1:
            raise ValueError("bits must be one-dimensional")
        if arr.size and arr.max() > 1:
            raise ValueError("bits must be 0/1 valued")
        self.bits = arr

    @property
    def n(self) -> int:
        return self.bits.size

    @classmethod
    def zeros(cls, n: int) -> "SearchPoint":
        return cls(np.zeros(n, dtype=np.uint8))

    @classmethod
    def ones(cls, n: int) -> "SearchPoint":
        return cls(np.ones(n, dtype=np.uint8))

    @classmethod
    def from_string(cls, text: str) -> "SearchPoint":
        return cls(np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0"))

    def encode(self) -> bytes:
        """Canonical byte encoding: BE32 length prefix + MSB-first packed bits."""
        return prf.encode_point(self.n, np.packbits(self.bits, bitorder="big").tobytes())

    def copy(self) -> "SearchPoint":
        return SearchPoint(self.bits.copy())

    def __eq__(self, other) -> bool:
        if not isinstance(other, SearchPoint):
            return NotImplemented
        return self.bits.size == other.bits.size and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self) -> int:
        return hash(self.encode())

    def __repr__(self) -> str:
        body = "".join(map(str, self.bits.tolist()))
        if len(body) > 64:
            body = body[:61] + "..."
        return f"SearchPoint({body})"


@dataclass(frozen=True)
class FitnessValue:
    """Decomposed fitness: total = om + distortion, distortion 0 when clean."""

    om: int
    distorted: bool
    distortion: float
    total: float


def onemax(x: SearchPoint) -> int:
    return int(np.count_nonzero(x.bits))


def zeromax(x: SearchPoint) -> int:
    return x.n - onemax(x)


def hamming_distance(x: SearchPoint, y: SearchPoint) -> int:
    if x.n != y.n:
        raise DimensionError(f"length mismatch: {x.n} vs {y.n}")
    return int(np.count_nonzero(x.bits != y.bits))


def uniform_point(n: int, rng) -> SearchPoint:
    """Uniform random point; consumes exactly n unit draws (bit i set iff draw < 0.5)."""
    bits = np.empty(n, dtype=np.uint8)
    for i in range(n):
        bits[i] = 1 if rng.next_unit() < 0.5 else 0
    return SearchPoint(bits)


@dataclass(frozen=True)
class FrozenLandscape:
    """Deterministic distorted-OneMax instance."""

    n: int
    p: float
    dist: DistortionSpec
    seed: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n!r}")
        if not (0.0 <= self.p <= 1.0):
            raise ValueError(f"p must lie in [0, 1], got {self.p!r}")
        object.__setattr__(self, "seed", int(self.seed) & prf.MASK64)

    def point_uniforms(self, x: SearchPoint) -> tuple[float, float]:
        """The frozen pair (u1, u2) attached to x: distortion coin and quantile input."""
        h1, h2 = prf.hash_bytes(self.seed, x.encode())
        return prf.unit(h1), prf.unit(h2)

    def evaluate(self, x: SearchPoint) -> FitnessValue:
        if x.n != self.n:
            raise DimensionError(f"point length {x.n} does not match landscape n={self.n}")
        om = onemax(x)
        u1, u2 = self.point_uniforms(x)
        if u1 < self.p:
            code, p0, p1 = self.dist.params()
            d = _quantile(code, p0, p1, u2)
            return FitnessValue(om=om, distorted=True, distortion=d, total=om + d)
        return FitnessValue(om=om, distorted=False, distortion=0.0, total=float(om))
