"""Independent oracles used by the tests.

These deliberately avoid the library's own evaluation paths: the dilogarithm
oracle is a raw partial sum, entropies come from exhaustive enumeration, and
composition sets are built recursively.
"""

import math
from math import lgamma

import numpy as np


def li2_partial_sum(z: float, max_terms: int = 10_000_000) -> float:
    """Direct series sum of z^t / t^2 with an explicit geometric tail bound."""
    total = 0.0
    term = z
    for t in range(1, max_terms + 1):
        contrib = term / (t * t)
        total += contrib
        term *= z
        if z != 1.0 and abs(term) / ((t + 1) * (t + 1)) < 1e-17 * (1.0 - abs(z)):
            break
    return total


def li2_inv_bisect(y: float, iters: int = 60) -> float:
    """Invert the partial-sum oracle by plain bisection on [0, 1]."""
    lo, hi = 0.0, 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if li2_partial_sum(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def compositions(n: int, k: int):
    """All ways to split n units into k ordered non-negative parts."""
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in compositions(n - first, k - 1):
            yield (first, *rest)


def multinomial_entropy_exact(n: int, k: int) -> float:
    """Entropy (nats) of Multinomial(n, uniform over k) by enumeration."""
    log_kn = n * math.log(k)
    entropy = 0.0
    for c in compositions(n, k):
        logp = lgamma(n + 1) - sum(lgamma(t + 1) for t in c) - log_kn
        entropy -= math.exp(logp) * logp
    return entropy


def binomial_pmf(n: int, p: float) -> np.ndarray:
    """Exact pmf of Binomial(n, p) over 0..n."""
    q = 1.0 - p
    return np.array([math.comb(n, i) * p**i * q ** (n - i) for i in range(n + 1)])
