"""(1+lambda) and (1,lambda) evolutionary algorithms with fixed-target termination.

Both variants keep a single parent, create lambda offspring by standard bit
mutation (each bit flips independently, default rate 1/n) and pick the best
offspring, breaking exact fitness ties uniformly at random.  Plus selection
replaces the parent only when the best offspring is at least as fit (equality
accepts); comma selection replaces it unconditionally.  A run stops when the
parent's total fitness reaches n - kstar or after cutoff_generations
generations, whichever comes first.

Two engines produce bit-identical results: a pure-Python reference (this
module) and a compiled kernel (``_fast``), both consuming the SplitMix64
stream in the order documented in ``rng``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

from .landscape import FitnessValue, FrozenLandscape, SearchPoint, uniform_point
from .rng import SplitMix64

PLUS = "plus"
COMMA = "comma"


@dataclass(frozen=True)
class EAConfig:
    variant: str
    n: int
    lam: int
    kstar: float
    cutoff_generations: int
    rng_seed: int
    mutation_rate: float | None = None
    dense_trace: bool = False

    def __post_init__(self):
        if self.variant not in (PLUS, COMMA):
            raise ValueError(f"variant must be {PLUS!r} or {COMMA!r}, got {self.variant!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.lam < 1:
            raise ValueError("lambda must be >= 1")
        if not (0.0 <= self.kstar < self.n):
            raise ValueError(f"kstar must lie in [0, n), got {self.kstar!r}")
        if self.cutoff_generations < 0:
            raise ValueError("cutoff_generations must be >= 0")
        rate = self.mutation_rate
        if rate is None:
            object.__setattr__(self, "mutation_rate", 1.0 / self.n)
        elif not (0.0 < rate <= 1.0):
            raise ValueError(f"mutation_rate must lie in (0, 1], got {rate!r}")

    @property
    def target(self) -> float:
        return self.n - self.kstar


@dataclass(frozen=True)
class TraceEvent:
    """State after one generation; accepted means the parent's bits changed."""

    generation: int
    om: int
    distortion: float
    total: float
    accepted: bool


@dataclass(frozen=True)
class RunResult:
    success: bool
    generations: int
    evaluations: int
    final: FitnessValue
    trace: tuple[TraceEvent, ...]
    final_point: SearchPoint = field(compare=False, default=None)
    om_reached_target: bool = False
    max_mutation_flips: int = 0


def mutate(x: SearchPoint, rate: float, rng: SplitMix64) -> SearchPoint:
    """Flip each bit independently with probability ``rate``; consumes n draws."""
    bits = x.bits.copy()
    for i in range(bits.size):
        if rng.next_unit() < rate:
            bits[i] ^= 1
    return SearchPoint(bits)


def select_best(fitnesses, rng: SplitMix64) -> int:
    """Index of the maximal total; exact ties resolved by one uniform draw."""
    if len(fitnesses) == 0:
        raise ValueError("select_best requires at least one fitness")
    best = max(f.total for f in fitnesses)
    ties = [i for i, f in enumerate(fitnesses) if f.total == best]
    if len(ties) == 1:
        return ties[0]
    return ties[rng.next_below(len(ties))]


def _spawn(parent: SearchPoint, L: FrozenLandscape, config: EAConfig, rng: SplitMix64):
    offspring = []
    for _ in range(config.lam):
        y = mutate(parent, config.mutation_rate, rng)
        offspring.append((y, L.evaluate(y)))
    return offspring


def step_plus(parent, parent_fit, L, config, rng):
    """One plus generation: (new parent, its fitness, accepted).

    accepted reports the selection branch (best total >= parent total), which
    includes acceptance of clones at equal fitness.
    """
    offspring = _spawn(parent, L, config, rng)
    i = select_best([f for _, f in offspring], rng)
    y, fy = offspring[i]
    if fy.total >= parent_fit.total:
        return y, fy, True
    return parent, parent_fit, False


def step_comma(parent, L, config, rng):
    """One comma generation: best offspring replaces the parent unconditionally."""
    offspring = _spawn(parent, L, config, rng)
    i = select_best([f for _, f in offspring], rng)
    return offspring[i]


def run(L: FrozenLandscape, config: EAConfig, engine: str = "auto") -> RunResult:
    """Execute one run; deterministic in (L.seed, config.rng_seed).

    engine: "jit" (compiled kernel), "python" (reference), or "auto" which
    uses the kernel when it imports.  Hitting the cutoff yields success=False,
    not an error.
    """
    if L.n != config.n:
        raise ValueError(f"landscape n={L.n} does not match config n={config.n}")
    if engine not in ("auto", "python", "jit"):
        raise ValueError(f"unknown engine {engine!r}")
    if engine in ("auto", "jit"):
        try:
            from . import _fast
        except ImportError:
            if engine == "jit":
                raise
        else:
            return _fast.run_jit(L, config)
    return _run_python(L, config)


def _run_python(L: FrozenLandscape, config: EAConfig) -> RunResult:
    rng = SplitMix64(config.rng_seed)
    parent = uniform_point(config.n, rng)
    parent_fit = L.evaluate(parent)
    target = config.target
    events = [TraceEvent(0, parent_fit.om, parent_fit.distortion, parent_fit.total, True)]
    max_flips = 0
    gen = 0
    while parent_fit.total < target and gen < config.cutoff_generations:
        offspring = _spawn(parent, L, config, rng)
        for y, _ in offspring:
            flips = int((y.bits != parent.bits).sum())
            if flips > max_flips:
                max_flips = flips
        i = select_best([f for _, f in offspring], rng)
        y, fy = offspring[i]
        if config.variant == COMMA or fy.total >= parent_fit.total:
            changed = y != parent
            parent, parent_fit = y, fy
        else:
            changed = False
        gen += 1
        if changed or config.dense_trace:
            events.append(
                TraceEvent(gen, parent_fit.om, parent_fit.distortion, parent_fit.total, changed)
            )
    if events[-1].generation != gen:
        events.append(
            TraceEvent(gen, parent_fit.om, parent_fit.distortion, parent_fit.total, False)
        )
    return RunResult(
        success=parent_fit.total >= target,
        generations=gen,
        evaluations=1 + config.lam * gen,
        final=parent_fit,
        trace=tuple(events),
        final_point=parent,
        om_reached_target=parent_fit.om >= target,
        max_mutation_flips=max_flips,
    )


TRACE_HEADER = ["generation", "evaluations", "om", "distortion", "total", "accepted"]


def write_trace_csv(result: RunResult, config: EAConfig, fileobj) -> None:
    """Trace rows as CSV; evaluations = 1 + lambda * generation, accepted as 1/0."""
    writer = csv.writer(fileobj, lineterminator="\n")
    writer.writerow(TRACE_HEADER)
    for ev in result.trace:
        writer.writerow(
            [
                ev.generation,
                1 + config.lam * ev.generation,
                ev.om,
                f"{ev.distortion:.17g}",
                f"{ev.total:.17g}",
                1 if ev.accepted else 0,
            ]
        )
