import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from disom.distributions import (
    DistributionError,
    Kind,
    TailVanishesError,
    _erfinv,
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
from disom.rng import SplitMix64

from conftest import survival_sup_distance

ALL_SPECS = [
    exponential(0.4),
    half_gaussian(2.0),
    pareto(1.0, 3.0),
    uniform(0.0, 4.0),
    truncated_exponential(0.4, 8.0),
]


class TestTail:
    def test_tail_at_zero_is_one(self):
        for spec in ALL_SPECS:
            assert tail(spec, 0.0) == 1.0

    def test_exponential_closed_form(self):
        spec = exponential(0.4)
        assert tail(spec, 5.0) == pytest.approx(math.exp(-2.0), rel=1e-15)
        assert tail(spec, 1.0) == pytest.approx(math.exp(-0.4), rel=1e-15)

    def test_pareto_at_support_minimum(self):
        assert tail(pareto(1.0, 3.0), 1.0) == 1.0
        assert tail(pareto(2.0, 3.0), 0.5) == 1.0  # below x0: still probability 1

    def test_pareto_closed_form(self):
        assert tail(pareto(1.0, 3.0), 2.0) == pytest.approx(0.25, rel=1e-15)

    def test_truncation_atom(self):
        spec = truncated_exponential(0.4, 10.0)
        assert tail(spec, 10.0) == pytest.approx(math.exp(-4.0), rel=1e-15)
        assert tail(spec, math.nextafter(10.0, math.inf)) == 0.0

    def test_truncation_atom_monte_carlo(self):
        # mass at the cutoff should match exp(-rate*cutoff) over 1e6 samples
        spec = truncated_exponential(0.4, 10.0)
        rng = SplitMix64(99)
        n = 10**6
        hits = sum(1 for _ in range(n) if sample(spec, _u(rng)) >= 10.0)
        q = math.exp(-4.0)
        sigma = math.sqrt(q * (1 - q) / n)
        assert abs(hits / n - q) < 3 * sigma

    def test_uniform_tail(self):
        spec = uniform(0.0, 4.0)
        assert tail(spec, 1.0) == pytest.approx(0.75)
        assert tail(spec, 4.0) == 0.0

    @given(
        st.sampled_from(range(len(ALL_SPECS))),
        st.floats(0.0, 20.0),
        st.floats(0.0, 20.0),
    )
    @settings(max_examples=300)
    def test_monotone_nonincreasing(self, spec_i, d1, d2):
        spec = ALL_SPECS[spec_i]
        lo, hi = min(d1, d2), max(d1, d2)
        assert tail(spec, lo) >= tail(spec, hi)


def _u(rng):
    u = rng.next_unit()
    return u if u > 0.0 else 2.0**-64


class TestSample:
    def test_open_interval_enforced(self):
        with pytest.raises(DistributionError):
            sample(exponential(0.4), 0.0)
        with pytest.raises(DistributionError):
            sample(exponential(0.4), 1.0)

    def test_exponential_inverse(self):
        spec = exponential(0.4)
        assert sample(spec, 1.0 - math.exp(-2.0)) == pytest.approx(5.0, abs=1e-12)
        assert sample(spec, 1e-12) == pytest.approx(0.0, abs=1e-11)

    def test_pareto_support_minimum(self):
        assert sample(pareto(2.0, 3.0), 1e-15) == pytest.approx(2.0, rel=1e-12)

    def test_half_gaussian_median(self):
        # median of |N(0, s^2)| is s * sqrt(2) * erfinv(1/2)
        s = 2.0
        expected = s * math.sqrt(2.0) * 0.4769362762044699
        assert sample(half_gaussian(s), 0.5) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.kind.value)
    def test_inverse_transform_conformance(self, spec):
        rng = SplitMix64(2024)
        xs = [sample(spec, _u(rng)) for _ in range(100_000)]
        assert survival_sup_distance(spec, xs) < 0.01

    @pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.kind.value)
    def test_sample_consistent_with_tail(self, spec):
        # quantile-survival inequality tail(x) >= q >= tail(x+) holds for any
        # distribution, atoms included; the two sides coincide at continuity
        # points.
        for q in (0.9, 0.5, 0.1, 0.01):
            x = sample(spec, 1.0 - q)
            assert tail(spec, x) >= q - 1e-9
            assert tail(spec, math.nextafter(x, math.inf)) <= q + 1e-9


class TestSigmaRatio:
    def test_exponential_constant(self):
        spec = exponential(0.4)
        expected = math.exp(0.4)
        ratios = [sigma_ratio(spec, d) for d in (0.0, 0.5, 1.0, 3.7, 10.0, 50.0)]
        for r in ratios:
            assert abs(r - expected) / expected < 1e-9

    def test_pareto_value_and_bound(self):
        spec = pareto(1.0, 3.0)
        assert sigma_ratio(spec, 1.0) == pytest.approx(4.0, rel=1e-12)
        bound = (1.0 + 1.0 / 1.0) ** (3.0 - 1.0)
        for d in [1.0 + 0.25 * i for i in range(40)]:
            assert sigma_ratio(spec, d) <= bound + 1e-12

    def test_half_gaussian_bound(self):
        # ratio at z is at most 1 + exp((4z + 4) / (2 s^2))
        s = 2.0
        spec = half_gaussian(s)
        for z in [0.0, 0.5, 1.0, 2.0, 3.0, 5.0]:
            bound = 1.0 + math.exp((4.0 * z + 4.0) / (2.0 * s * s))
            assert sigma_ratio(spec, z) <= bound

    def test_at_least_one_inside_support(self):
        for spec in ALL_SPECS:
            for d in (0.0, 0.5, 1.5, 2.9):
                assert sigma_ratio(spec, d) >= 1.0

    def test_bounded_support_violation(self):
        with pytest.raises(TailVanishesError):
            sigma_ratio(uniform(0.0, 4.0), 3.0)
        with pytest.raises(TailVanishesError):
            sigma_ratio(truncated_exponential(0.4, 2.0), 1.5)

    def test_sigma_scan(self):
        worst, violation = sigma_scan(exponential(0.4), [0.0, 1.0, 2.0])
        assert worst == pytest.approx(math.exp(0.4), rel=1e-9)
        assert violation is None
        worst, violation = sigma_scan(uniform(0.0, 4.0), [0.0, 1.0, 2.0, 3.0, 4.0])
        assert violation == 3.0


class TestErfinv:
    # frozen mpmath references
    REFERENCE = {
        0.03125: 0.02770167571958433,
        0.1: 0.08885599049425769,
        0.5: 0.4769362762044699,
        0.9: 1.163087153676674,
        0.99: 1.8213863677184496,
        0.999999: 3.4589107372795,
    }

    def test_reference_values(self):
        for u, expected in self.REFERENCE.items():
            assert _erfinv(u) == pytest.approx(expected, abs=1e-10)

    def test_odd(self):
        assert _erfinv(-0.5) == -_erfinv(0.5)
        assert _erfinv(0.0) == 0.0

    def test_round_trip_extremes(self):
        for u in (2.0**-64, 1e-10, 1.0 - 1e-10, 1.0 - 2.0**-53):
            assert math.erf(_erfinv(u)) == pytest.approx(u, rel=1e-12, abs=1e-15)


class TestValidation:
    def test_rate_must_be_positive(self):
        with pytest.raises(DistributionError):
            exponential(0.0)
        with pytest.raises(DistributionError):
            exponential(-1.0)

    def test_pareto_tau_domain(self):
        with pytest.raises(DistributionError):
            pareto(1.0, 2.0)  # tau > 2 strictly
        with pytest.raises(DistributionError):
            pareto(0.0, 3.0)

    def test_uniform_domain(self):
        with pytest.raises(DistributionError):
            uniform(4.0, 4.0)
        with pytest.raises(DistributionError):
            uniform(-1.0, 4.0)


class TestGrammar:
    @pytest.mark.parametrize(
        "text,kind",
        [
            ("exp:rate=0.4", Kind.EXPONENTIAL),
            ("gauss:scale=2", Kind.HALF_GAUSSIAN),
            ("pareto:x0=1,tau=3", Kind.PARETO),
            ("uniform:a=0,b=4", Kind.UNIFORM),
            ("truncexp:rate=0.4,cutoff=8", Kind.TRUNCATED_EXPONENTIAL),
        ],
    )
    def test_parse_and_round_trip(self, text, kind):
        spec = parse_spec(text)
        assert spec.kind is kind
        assert parse_spec(format_spec(spec)) == spec

    def test_parse_errors_name_the_token(self):
        with pytest.raises(DistributionError, match="weibull"):
            parse_spec("weibull:k=2")
        with pytest.raises(DistributionError, match="rate"):
            parse_spec("exp:rate=fast")
        with pytest.raises(DistributionError, match="cutoff"):
            parse_spec("exp:rate=0.4,cutoff=3")
        with pytest.raises(DistributionError):
            parse_spec("exp")
        with pytest.raises(DistributionError, match="missing"):
            parse_spec("pareto:x0=1")
