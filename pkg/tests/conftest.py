import math

import pytest

from disom.distributions import tail


@pytest.fixture(scope="session", autouse=True)
def jit_warmup():
    """Compile the kernels once so timed tests measure the work, not the JIT."""
    from disom import _fast

    _fast.warmup()


def survival_sup_distance(spec, samples) -> float:
    """sup_x |empirical Pr[X >= x] - tail(spec, x)|.

    Compares closed tails at each distinct sample value and open tails just
    above it, which handles the truncation atom correctly (both survival
    functions jump there together).
    """
    xs = sorted(samples)
    n = len(xs)
    sup = 0.0
    i = 0
    while i < n:
        j = i
        while j < n and xs[j] == xs[i]:
            j += 1
        v = xs[i]
        sup = max(sup, abs((n - i) / n - tail(spec, v)))
        sup = max(sup, abs((n - j) / n - tail(spec, math.nextafter(v, math.inf))))
        i = j
    return sup
