"""Keyed pseudorandom function behind the frozen landscape, version 1.

The landscape never stores per-point state: the two uniforms that decide
whether a point is distorted and how large its distortion is are recomputed
on demand from a keyed hash of the point's canonical encoding.  The exact
construction below is a compatibility contract; changing any step changes
every landscape and bumps ``PRF_VERSION``.

Canonical point encoding
    ``BE32(n)`` followed by the bits packed most-significant-bit first into
    ``ceil(n / 8)`` bytes, trailing bit positions zero.

Hash (two 64-bit outputs)
    The encoding is zero-padded at the end to a multiple of 8 bytes and read
    as big-endian 64-bit words ``w_1 .. w_m``.  With ``mix`` the splitmix64
    finalizer and ``key`` the 64-bit landscape seed::

        h   = mix(key XOR GOLDEN)
        h   = mix(h XOR w_i)            for i = 1 .. m
        h1  = mix(h XOR len_bytes)      # unpadded encoding length
        h2  = mix(h1 XOR GOLDEN2)

Unit-interval mapping
    ``u = h * 2**-64`` with the zero word mapped to ``2**-64`` and results
    that round up to 1.0 pulled down to the largest double below 1, keeping
    u strictly inside (0, 1).

All arithmetic is on 64-bit words; the pure-Python implementation here masks
explicitly and is mirrored word-for-word by the JIT kernels in ``_fast``.
"""

from __future__ import annotations

import struct

PRF_VERSION = 1

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15
GOLDEN2 = 0xD6E8FEB86659FD93

_TINY = 2.0 ** -64
_BELOW_ONE = 1.0 - 2.0 ** -53  # math.nextafter(1.0, 0.0)


def mix64(z: int) -> int:
    """splitmix64 finalizer: bijective on 64-bit words, full avalanche."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def words_of(data: bytes) -> list[int]:
    """Big-endian 64-bit words of ``data`` zero-padded to a multiple of 8 bytes."""
    pad = (-len(data)) % 8
    if pad:
        data = data + b"\x00" * pad
    return [int.from_bytes(data[i : i + 8], "big") for i in range(0, len(data), 8)]


def hash_words(key: int, words, nbytes: int) -> tuple[int, int]:
    """Core sponge over pre-packed words; ``nbytes`` is the unpadded length."""
    h = mix64((key & MASK64) ^ GOLDEN)
    for w in words:
        h = mix64(h ^ w)
    h1 = mix64(h ^ nbytes)
    h2 = mix64(h1 ^ GOLDEN2)
    return h1, h2


def hash_bytes(key: int, data: bytes) -> tuple[int, int]:
    return hash_words(key, words_of(data), len(data))


def unit(h: int) -> float:
    """Map a 64-bit word into (0, 1), endpoints excluded."""
    u = h * _TINY
    if u <= 0.0:
        return _TINY
    if u >= 1.0:
        return _BELOW_ONE
    return u


def encode_point(n: int, packed_bits: bytes) -> bytes:
    """Length-prefixed canonical encoding of a point whose bits are already packed."""
    return struct.pack(">I", n) + packed_bits


def derive_seed(master_seed: int, label: str) -> int:
    """Stable 64-bit sub-seed for ``label`` under ``master_seed``.

    Batch runners use this to give every (cell, run, role) its own landscape
    and mutation seeds, so results do not depend on execution order.
    """
    return hash_bytes(master_seed, label.encode("utf-8"))[0]
