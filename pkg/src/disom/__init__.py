"""Distorted-OneMax benchmark suite.

Frozen OneMax-with-planted-local-optima landscapes, the (1+lambda) and
(1,lambda) evolutionary algorithms, exact combinatorial oracles, and the
experiment presets and assumption checkers used to study how elitist
selection gets trapped by distortions of random height.
"""

from .distributions import (
    DistortionSpec,
    DistributionError,
    Kind,
    TailVanishesError,
    exponential,
    format_spec,
    half_gaussian,
    pareto,
    parse_spec,
    sample,
    sigma_ratio,
    sigma_scan,
    tail,
    truncated_exponential,
    uniform,
)
from .ea import (
    COMMA,
    PLUS,
    EAConfig,
    RunResult,
    TraceEvent,
    mutate,
    run,
    select_best,
    step_comma,
    step_plus,
    write_trace_csv,
)
from .landscape import (
    DimensionError,
    FitnessValue,
    FrozenLandscape,
    SearchPoint,
    hamming_distance,
    onemax,
    uniform_point,
    zeromax,
)
from .oracle import (
    LayerQuery,
    brute_force_layer_census,
    fitness_gain_exact_prob,
    fitness_gain_prob,
    hamming_layer_size,
)
from .prf import PRF_VERSION, derive_seed
from .rng import SplitMix64

__version__ = "0.1.0"
