"""Deterministic random stream used by the evolutionary algorithms.

SplitMix64: the state advances by the golden gamma once per draw and the
output is the splitmix64 finalizer of the state.  Chosen over library
generators because the identical sequence is cheap to reproduce inside the
JIT kernels, which is what makes single-run results bit-reproducible across
the pure-Python and compiled engines.

Draw-order contract (consumed by both engines, do not reorder):
  * initial point: n unit draws, bit i set iff draw < 0.5;
  * each offspring: n unit draws in bit order, bit flipped iff draw < rate;
  * after the lambda offspring of a generation: exactly one bounded draw
    (with its rejection retries) iff the best total is tied between two or
    more offspring.
"""

from __future__ import annotations

from .prf import GOLDEN, MASK64, mix64

_INV53 = 2.0 ** -53


class SplitMix64:
    """64-bit counter RNG; state is a single word."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def copy(self) -> "SplitMix64":
        return SplitMix64(self.state)

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def next_unit(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * _INV53

    def next_below(self, bound: int) -> int:
        """Uniform integer in [0, bound), exactly unbiased via rejection."""
        if bound <= 0:
            raise ValueError(f"bound must be positive, got {bound!r}")
        if bound == 1:
            return 0
        # 2**64 = q*bound + rem; accept draws below q*bound.
        rem = ((MASK64 % bound) + 1) % bound
        limit = MASK64 - rem
        while True:
            u = self.next_u64()
            if u <= limit:
                return u % bound
