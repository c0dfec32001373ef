"""Compiled run engine.

Numba translations of the PRF, the SplitMix64 stream and the generation loop.
The integer kernels mirror ``prf``/``rng`` word for word (the pure-Python
versions mask to 64 bits, uint64 wraps natively here) and the scalar quantile
code is compiled from the very same source in ``distributions``, so a run
executed here is bit-identical to the reference engine.  Parity is enforced
by tests, not assumed.

The main kernel is compiled with ``nogil`` so batch runners get real
parallelism from threads.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from . import prf
from .distributions import _build_quantile, _erfinv
from .ea import COMMA, EAConfig, RunResult, TraceEvent
from .landscape import FitnessValue, FrozenLandscape, SearchPoint

U64 = np.uint64
_GOLDEN = U64(prf.GOLDEN)
_GOLDEN2 = U64(prf.GOLDEN2)
_U64_MAX = U64(0xFFFFFFFFFFFFFFFF)
_ONE = U64(1)
_INV53 = 2.0 ** -53
_INV64 = 2.0 ** -64
_BELOW_ONE = 1.0 - 2.0 ** -53

_mix64 = njit(cache=True)(prf.mix64)
_erfinv_jit = njit(cache=True)(_erfinv)
_quantile_jit = njit(_build_quantile(_erfinv_jit))


@njit(cache=True)
def _unit(h):
    u = h * _INV64
    if u <= 0.0:
        return _INV64
    if u >= 1.0:
        return _BELOW_ONE
    return u


@njit(cache=True)
def _hash_words(key, words, nbytes):
    h = _mix64(key ^ _GOLDEN)
    for i in range(words.shape[0]):
        h = _mix64(h ^ words[i])
    h1 = _mix64(h ^ nbytes)
    h2 = _mix64(h1 ^ _GOLDEN2)
    return h1, h2


@njit(nogil=True)
def _run_kernel(
    variant_comma,
    n,
    lam,
    rate,
    target,
    cutoff,
    land_seed,
    rng_seed,
    p,
    dist_code,
    d0,
    d1,
    word_index,
    bit_shift,
    W,
    nbytes,
    dense,
):
    state = U64(rng_seed)

    # Initial parent: n unit draws, bit i set iff draw < 0.5.
    parent = np.zeros(W, dtype=np.uint64)
    parent[0] = U64(n) << U64(32)
    parent_om = 0
    for i in range(n):
        state = state + _GOLDEN
        u = (_mix64(state) >> U64(11)) * _INV53
        if u < 0.5:
            parent[word_index[i]] |= _ONE << bit_shift[i]
            parent_om += 1

    h1, h2 = _hash_words(U64(land_seed), parent, U64(nbytes))
    parent_distorted = _unit(h1) < p
    parent_distortion = 0.0
    if parent_distorted:
        parent_distortion = _quantile_jit(dist_code, d0, d1, _unit(h2))
    parent_total = parent_om + parent_distortion

    # Offspring workspace.
    off = np.empty((lam, W), dtype=np.uint64)
    off_om = np.empty(lam, dtype=np.int64)
    off_distorted = np.empty(lam, dtype=np.uint8)
    off_distortion = np.empty(lam, dtype=np.float64)
    off_total = np.empty(lam, dtype=np.float64)
    ties = np.empty(lam, dtype=np.int64)

    # Trace buffers, doubled on demand; row 0 is the initial state.
    cap = 1024
    ev_gen = np.empty(cap, dtype=np.int64)
    ev_om = np.empty(cap, dtype=np.int64)
    ev_dist = np.empty(cap, dtype=np.float64)
    ev_total = np.empty(cap, dtype=np.float64)
    ev_acc = np.empty(cap, dtype=np.uint8)
    ev_gen[0] = 0
    ev_om[0] = parent_om
    ev_dist[0] = parent_distortion
    ev_total[0] = parent_total
    ev_acc[0] = 1
    count = 1

    max_flips = 0
    gen = 0
    while parent_total < target and gen < cutoff:
        for i in range(lam):
            for w in range(W):
                off[i, w] = parent[w]
            om = parent_om
            flips = 0
            for b in range(n):
                state = state + _GOLDEN
                u = (_mix64(state) >> U64(11)) * _INV53
                if u < rate:
                    wi = word_index[b]
                    mask = _ONE << bit_shift[b]
                    if off[i, wi] & mask != U64(0):
                        om -= 1
                    else:
                        om += 1
                    off[i, wi] ^= mask
                    flips += 1
            if flips > max_flips:
                max_flips = flips
            h1, h2 = _hash_words(U64(land_seed), off[i], U64(nbytes))
            if _unit(h1) < p:
                d = _quantile_jit(dist_code, d0, d1, _unit(h2))
                off_distorted[i] = 1
                off_distortion[i] = d
                off_total[i] = om + d
            else:
                off_distorted[i] = 0
                off_distortion[i] = 0.0
                off_total[i] = om
            off_om[i] = om

        best = off_total[0]
        for i in range(1, lam):
            if off_total[i] > best:
                best = off_total[i]
        m = 0
        for i in range(lam):
            if off_total[i] == best:
                ties[m] = i
                m += 1
        if m > 1:
            bound = U64(m)
            rem = ((_U64_MAX % bound) + _ONE) % bound
            limit = _U64_MAX - rem
            while True:
                state = state + _GOLDEN
                z = _mix64(state)
                if z <= limit:
                    chosen = ties[np.int64(z % bound)]
                    break
        else:
            chosen = ties[0]

        changed = False
        if variant_comma or off_total[chosen] >= parent_total:
            for w in range(W):
                if parent[w] != off[chosen, w]:
                    changed = True
                    break
            for w in range(W):
                parent[w] = off[chosen, w]
            parent_om = off_om[chosen]
            parent_distorted = off_distorted[chosen] != 0
            parent_distortion = off_distortion[chosen]
            parent_total = off_total[chosen]
        gen += 1

        if changed or dense:
            if count == cap:
                cap *= 2
                ng = np.empty(cap, dtype=np.int64)
                no = np.empty(cap, dtype=np.int64)
                nd = np.empty(cap, dtype=np.float64)
                nt = np.empty(cap, dtype=np.float64)
                na = np.empty(cap, dtype=np.uint8)
                ng[:count] = ev_gen[:count]
                no[:count] = ev_om[:count]
                nd[:count] = ev_dist[:count]
                nt[:count] = ev_total[:count]
                na[:count] = ev_acc[:count]
                ev_gen, ev_om, ev_dist, ev_total, ev_acc = ng, no, nd, nt, na
            ev_gen[count] = gen
            ev_om[count] = parent_om
            ev_dist[count] = parent_distortion
            ev_total[count] = parent_total
            ev_acc[count] = 1 if changed else 0
            count += 1

    if ev_gen[count - 1] != gen:
        if count == cap:
            cap += 1
            ng = np.empty(cap, dtype=np.int64)
            no = np.empty(cap, dtype=np.int64)
            nd = np.empty(cap, dtype=np.float64)
            nt = np.empty(cap, dtype=np.float64)
            na = np.empty(cap, dtype=np.uint8)
            ng[:count] = ev_gen[:count]
            no[:count] = ev_om[:count]
            nd[:count] = ev_dist[:count]
            nt[:count] = ev_total[:count]
            na[:count] = ev_acc[:count]
            ev_gen, ev_om, ev_dist, ev_total, ev_acc = ng, no, nd, nt, na
        ev_gen[count] = gen
        ev_om[count] = parent_om
        ev_dist[count] = parent_distortion
        ev_total[count] = parent_total
        ev_acc[count] = 0
        count += 1

    success = parent_total >= target
    return (
        success,
        gen,
        max_flips,
        parent,
        parent_om,
        parent_distorted,
        parent_distortion,
        parent_total,
        ev_gen[:count],
        ev_om[:count],
        ev_dist[:count],
        ev_total[:count],
        ev_acc[:count],
    )


_WORD_MAPS: dict[int, tuple] = {}


def _word_map(n: int):
    """Per-bit (word, shift) layout of the canonical encoding for length n."""
    cached = _WORD_MAPS.get(n)
    if cached is None:
        nbytes = 4 + (n + 7) // 8
        W = (nbytes + 7) // 8
        word_index = np.empty(n, dtype=np.int64)
        bit_shift = np.empty(n, dtype=np.uint64)
        for i in range(n):
            byte_index = 4 + (i >> 3)
            word_index[i] = byte_index >> 3
            bit_shift[i] = (7 - (byte_index & 7)) * 8 + (7 - (i & 7))
        cached = (word_index, bit_shift, W, nbytes)
        _WORD_MAPS[n] = cached
    return cached


def _bits_from_words(words, word_index, bit_shift, n):
    bits = np.empty(n, dtype=np.uint8)
    for i in range(n):
        bits[i] = (int(words[word_index[i]]) >> int(bit_shift[i])) & 1
    return bits


def run_jit(L: FrozenLandscape, config: EAConfig) -> RunResult:
    word_index, bit_shift, W, nbytes = _word_map(config.n)
    dist_code, d0, d1 = L.dist.params()
    (
        success,
        gen,
        max_flips,
        parent_words,
        parent_om,
        parent_distorted,
        parent_distortion,
        parent_total,
        ev_gen,
        ev_om,
        ev_dist,
        ev_total,
        ev_acc,
    ) = _run_kernel(
        config.variant == COMMA,
        config.n,
        config.lam,
        config.mutation_rate,
        float(config.target),
        config.cutoff_generations,
        U64(L.seed),
        U64(config.rng_seed & prf.MASK64),
        float(L.p),
        dist_code,
        float(d0),
        float(d1),
        word_index,
        bit_shift,
        W,
        nbytes,
        config.dense_trace,
    )
    trace = tuple(
        TraceEvent(int(g), int(o), float(d), float(t), bool(a))
        for g, o, d, t, a in zip(ev_gen, ev_om, ev_dist, ev_total, ev_acc)
    )
    final = FitnessValue(
        om=int(parent_om),
        distorted=bool(parent_distorted),
        distortion=float(parent_distortion),
        total=float(parent_total),
    )
    return RunResult(
        success=bool(success),
        generations=int(gen),
        evaluations=1 + config.lam * int(gen),
        final=final,
        trace=trace,
        final_point=SearchPoint(_bits_from_words(parent_words, word_index, bit_shift, config.n)),
        om_reached_target=final.om >= config.target,
        max_mutation_flips=int(max_flips),
    )


def warmup() -> None:
    """Force kernel compilation outside timed sections."""
    from .distributions import exponential

    L = FrozenLandscape(n=8, p=0.5, dist=exponential(1.0), seed=1)
    cfg = EAConfig(variant="plus", n=8, lam=2, kstar=0.0, cutoff_generations=3, rng_seed=1)
    run_jit(L, cfg)
