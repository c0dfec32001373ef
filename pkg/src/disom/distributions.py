"""Distortion distributions: closed-form tails, inverse-CDF sampling, tail-ratio diagnostics.

Every distribution lives on the nonnegative reals.  ``tail(spec, d)`` is the
closed upper tail Pr[D >= d]; for the continuous kinds Pr[D >= d] = Pr[D > d],
and the truncated exponential keeps an atom at its cutoff (see
``truncated_exponential``).  ``sigma_ratio`` reports the one-step tail ratio
Pr[D >= d] / Pr[D >= d + 1], the quantity that controls how hard it is for an
elitist EA to out-climb the planted distortions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class DistributionError(ValueError):
    """Invalid distribution parameters or out-of-domain arguments."""


class TailVanishesError(DistributionError):
    """The tail Pr[D >= d + 1] is zero, so the sigma ratio is undefined at d.

    Raised instead of dividing by zero: a vanishing tail means the
    bounded-support exception applies and the tail-ratio bound fails there.
    """

    def __init__(self, d: float):
        super().__init__(f"tail ratio undefined at d={d!r}: Pr[D >= d+1] = 0")
        self.d = d


class Kind(str, Enum):
    EXPONENTIAL = "exp"
    HALF_GAUSSIAN = "gauss"
    PARETO = "pareto"
    UNIFORM = "uniform"
    TRUNCATED_EXPONENTIAL = "truncexp"


# Scalar parameter slots used by the numeric kernels: (code, param0, param1).
_KIND_CODES = {
    Kind.EXPONENTIAL: 0,
    Kind.HALF_GAUSSIAN: 1,
    Kind.PARETO: 2,
    Kind.UNIFORM: 3,
    Kind.TRUNCATED_EXPONENTIAL: 4,
}

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class DistortionSpec:
    """Tagged description of a distortion distribution.

    Use the module-level constructors (``exponential``, ``pareto``, ...)
    rather than instantiating directly; they validate the parameter domain.
    """

    kind: Kind
    rate: float | None = None      # exponential / truncated exponential
    scale: float | None = None     # half-gaussian
    x0: float | None = None        # pareto support minimum
    tau: float | None = None       # pareto exponent
    a: float | None = None         # uniform lower
    b: float | None = None         # uniform upper
    cutoff: float | None = None    # truncation point

    def params(self) -> tuple[int, float, float]:
        """(kind code, param0, param1) for the scalar kernels."""
        code = _KIND_CODES[self.kind]
        if self.kind is Kind.EXPONENTIAL:
            return code, self.rate, 0.0
        if self.kind is Kind.HALF_GAUSSIAN:
            return code, self.scale, 0.0
        if self.kind is Kind.PARETO:
            return code, self.x0, self.tau
        if self.kind is Kind.UNIFORM:
            return code, self.a, self.b
        return code, self.rate, self.cutoff

    def __str__(self) -> str:
        return format_spec(self)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise DistributionError(message)


def _positive(name: str, value: float) -> float:
    value = float(value)
    _require(math.isfinite(value) and value > 0.0, f"{name} must be finite and > 0, got {value!r}")
    return value


def exponential(rate: float) -> DistortionSpec:
    """Exponential tail Pr[D >= d] = exp(-rate * d)."""
    return DistortionSpec(Kind.EXPONENTIAL, rate=_positive("rate", rate))


def half_gaussian(scale: float) -> DistortionSpec:
    """Absolute value of a centered Gaussian with standard deviation ``scale``."""
    return DistortionSpec(Kind.HALF_GAUSSIAN, scale=_positive("scale", scale))


def pareto(x0: float, tau: float) -> DistortionSpec:
    """Pareto tail Pr[D >= d] = (d / x0)^(1 - tau) on [x0, inf); requires tau > 2."""
    x0 = _positive("x0", x0)
    tau = float(tau)
    _require(math.isfinite(tau) and tau > 2.0, f"tau must be > 2, got {tau!r}")
    return DistortionSpec(Kind.PARETO, x0=x0, tau=tau)


def uniform(a: float, b: float) -> DistortionSpec:
    """Uniform on [a, b] with b > a >= 0.  Bounded support: violates the tail-ratio bound near b."""
    a, b = float(a), float(b)
    _require(math.isfinite(a) and math.isfinite(b), "uniform bounds must be finite")
    _require(a >= 0.0, f"uniform lower bound must be >= 0, got {a!r}")
    _require(b > a, f"uniform requires b > a, got a={a!r}, b={b!r}")
    return DistortionSpec(Kind.UNIFORM, a=a, b=b)


def truncated_exponential(rate: float, cutoff: float) -> DistortionSpec:
    """min(D, cutoff) for exponential D: tail exp(-rate*d) up to the cutoff, then 0.

    Min-truncation leaves an atom of mass exp(-rate*cutoff) at the cutoff, so
    the closed tail at the cutoff itself equals the untruncated tail there.
    """
    return DistortionSpec(
        Kind.TRUNCATED_EXPONENTIAL, rate=_positive("rate", rate), cutoff=_positive("cutoff", cutoff)
    )


def tail(spec: DistortionSpec, d: float) -> float:
    """Pr[D >= d].  Monotone non-increasing in d; equals 1 for d <= 0."""
    d = float(d)
    if not math.isfinite(d):
        raise DistributionError(f"d must be finite, got {d!r}")
    if d <= 0.0:
        return 1.0
    kind = spec.kind
    if kind is Kind.EXPONENTIAL:
        return math.exp(-spec.rate * d)
    if kind is Kind.HALF_GAUSSIAN:
        return math.erfc(d / (spec.scale * _SQRT2))
    if kind is Kind.PARETO:
        if d <= spec.x0:
            return 1.0
        return (d / spec.x0) ** (1.0 - spec.tau)
    if kind is Kind.UNIFORM:
        if d <= spec.a:
            return 1.0
        if d >= spec.b:
            return 0.0
        return (spec.b - d) / (spec.b - spec.a)
    if kind is Kind.TRUNCATED_EXPONENTIAL:
        if d > spec.cutoff:
            return 0.0
        return math.exp(-spec.rate * d)
    raise DistributionError(f"unknown kind {kind!r}")


def sample(spec: DistortionSpec, u: float) -> float:
    """Inverse-transform sample: the u-quantile of the distribution, u in (0, 1)."""
    u = float(u)
    if not (0.0 < u < 1.0):
        raise DistributionError(f"u must lie strictly inside (0, 1), got {u!r}")
    code, p0, p1 = spec.params()
    return _quantile(code, p0, p1, u)


def sigma_ratio(spec: DistortionSpec, d: float) -> float:
    """tail(spec, d) / tail(spec, d + 1); >= 1 wherever defined.

    Raises TailVanishesError when the denominator is zero (bounded support).
    """
    denom = tail(spec, d + 1.0)
    if denom <= 0.0:
        raise TailVanishesError(d)
    return tail(spec, d) / denom


def sigma_scan(spec: DistortionSpec, d_values) -> tuple[float, float | None]:
    """(max sigma_ratio over d_values, first d where the ratio is undefined).

    The scan stops at the first undefined point; the maximum covers the values
    before it.  Returns (nan, first d) if the very first ratio is undefined.
    """
    worst = math.nan
    for d in d_values:
        try:
            r = sigma_ratio(spec, d)
        except TailVanishesError:
            return worst, float(d)
        if math.isnan(worst) or r > worst:
            worst = r
    return worst, None


# --- scalar quantile kernels -------------------------------------------------
#
# Plain-math scalar functions (floats, ints, `math` module only) so the JIT
# engine can compile the identical source; both execution paths then produce
# bit-identical distortion values on one platform.

def _erfinv(u: float) -> float:
    """Inverse error function on (-1, 1), absolute error well below 1e-12.

    Winitzki's log-based approximation (relative error < 2e-3) seeds a Newton
    iteration: on erf(t) - u in the bulk, and on the complementary erfc form
    in the tail, where erf(t) itself rounds to 1 and would stall the update.
    """
    if u == 0.0:
        return 0.0
    sign = 1.0 if u > 0.0 else -1.0
    x = u if u > 0.0 else -u
    if x >= 1.0:
        return sign * math.inf
    a = 0.147
    ln1mx2 = math.log1p(-x * x)
    h = 2.0 / (math.pi * a) + 0.5 * ln1mx2
    t = math.sqrt(math.sqrt(h * h - ln1mx2 / a) - h)
    if x < 0.9:
        two_over_sqrt_pi = 1.1283791670955126
        for _ in range(4):
            t -= (math.erf(t) - x) / (two_over_sqrt_pi * math.exp(-t * t))
    else:
        v = 1.0 - x  # exact: x in [0.5, 1)
        half_sqrt_pi = 0.8862269254527580
        for _ in range(5):
            t += (math.erfc(t) - v) * half_sqrt_pi * math.exp(t * t)
    return sign * t


def _build_quantile(erfinv):
    """Quantile source shared by the interpreted and the compiled path.

    The caller supplies the erfinv implementation (plain or numba-compiled);
    everything else is branch-free float math, so both builds agree bitwise.
    """

    def _quantile(code: int, p0: float, p1: float, u: float) -> float:
        if code == 0:  # exponential(rate=p0)
            return -math.log1p(-u) / p0
        if code == 1:  # half-gaussian(scale=p0)
            return p0 * _SQRT2 * erfinv(u)
        if code == 2:  # pareto(x0=p0, tau=p1)
            return p0 * (1.0 - u) ** (-1.0 / (p1 - 1.0))
        if code == 3:  # uniform(a=p0, b=p1)
            return p0 + (p1 - p0) * u
        if code == 4:  # truncated exponential(rate=p0, cutoff=p1)
            x = -math.log1p(-u) / p0
            return x if x < p1 else p1
        return math.nan

    return _quantile


_quantile = _build_quantile(_erfinv)


# --- spec string grammar -----------------------------------------------------

_GRAMMAR = {
    Kind.EXPONENTIAL: ("rate",),
    Kind.HALF_GAUSSIAN: ("scale",),
    Kind.PARETO: ("x0", "tau"),
    Kind.UNIFORM: ("a", "b"),
    Kind.TRUNCATED_EXPONENTIAL: ("rate", "cutoff"),
}

_CONSTRUCTORS = {
    Kind.EXPONENTIAL: exponential,
    Kind.HALF_GAUSSIAN: half_gaussian,
    Kind.PARETO: pareto,
    Kind.UNIFORM: uniform,
    Kind.TRUNCATED_EXPONENTIAL: truncated_exponential,
}


def parse_spec(text: str) -> DistortionSpec:
    """Parse ``kind:key=value(,key=value)*``, e.g. ``exp:rate=0.4`` or ``pareto:x0=1,tau=3``."""
    head, sep, rest = text.partition(":")
    head = head.strip()
    try:
        kind = Kind(head)
    except ValueError:
        known = ", ".join(k.value for k in Kind)
        raise DistributionError(f"unknown distribution kind {head!r} (expected one of: {known})")
    if not sep or not rest.strip():
        raise DistributionError(f"missing parameters in distribution spec {text!r}")
    values: dict[str, float] = {}
    for token in rest.split(","):
        key, eq, val = token.partition("=")
        key = key.strip()
        if not eq:
            raise DistributionError(f"malformed parameter {token!r} in {text!r} (expected key=value)")
        if key not in _GRAMMAR[kind]:
            raise DistributionError(f"parameter {key!r} not valid for kind {kind.value!r}")
        if key in values:
            raise DistributionError(f"duplicate parameter {key!r} in {text!r}")
        try:
            values[key] = float(val)
        except ValueError:
            raise DistributionError(f"non-numeric value {val.strip()!r} for {key!r} in {text!r}")
    missing = [k for k in _GRAMMAR[kind] if k not in values]
    if missing:
        raise DistributionError(f"missing parameter(s) {missing} for kind {kind.value!r}")
    return _CONSTRUCTORS[kind](**values)


def format_spec(spec: DistortionSpec) -> str:
    """Inverse of parse_spec; floats carry 17 significant digits."""
    keys = _GRAMMAR[spec.kind]
    body = ",".join(f"{k}={getattr(spec, k):.17g}" for k in keys)
    return f"{spec.kind.value}:{body}"
