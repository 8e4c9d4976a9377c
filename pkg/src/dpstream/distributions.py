"""Probability vectors over finite category domains.

The released object everywhere in this package is a normalized probability
vector. Normalizing raw counts caps the worst-case L1 change from one user's
data at 2, so every downstream mechanism can assume a fixed sensitivity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainMismatchError, ZeroTotalError

#: Maximum L1 distance between the normalized distributions of any two
#: neighboring inputs. Fixed for all queries answered through a PDF release.
SENSITIVITY_L1 = 2.0

_SUM_TOL = 1e-9


@dataclass(frozen=True)
class SensitivityBound:
    """The fixed L1 sensitivity of a PDF release."""

    delta_q: float = SENSITIVITY_L1

    def __post_init__(self):
        if self.delta_q != SENSITIVITY_L1:
            raise ValueError("the PDF-release sensitivity bound is fixed at 2")


@dataclass(frozen=True)
class ProbabilityVector:
    """A normalized distribution over ``domain_size`` categories."""

    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        object.__setattr__(self, "probs", probs)
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("probs must be a non-empty 1-D sequence")
        if np.any(probs < 0):
            raise ValueError("probabilities must be non-negative")
        if abs(float(probs.sum()) - 1.0) > _SUM_TOL:
            raise ValueError(f"probabilities sum to {probs.sum()!r}, not 1")

    @property
    def domain_size(self) -> int:
        return int(self.probs.size)

    def __getitem__(self, i: int) -> float:
        return float(self.probs[i])

    def __len__(self) -> int:
        return self.domain_size


@dataclass(frozen=True)
class CountVector:
    """Non-negative integer counts per category for one time slot."""

    counts: np.ndarray = field(repr=False)

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.ndim != 1 or counts.size == 0:
            raise ValueError("counts must be a non-empty 1-D sequence")
        if not np.issubdtype(counts.dtype, np.integer):
            if not np.all(counts == np.floor(counts)):
                raise ValueError("counts must be integers")
            counts = counts.astype(np.int64)
        else:
            counts = counts.astype(np.int64)
        if np.any(counts < 0):
            raise ValueError("counts must be non-negative")
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def domain_size(self) -> int:
        return int(self.counts.size)


def normalize(counts: CountVector | np.ndarray) -> ProbabilityVector:
    """Project raw counts onto the probability simplex.

    Raises ZeroTotalError for an empty slot; the caller decides the fallback
    (the pipeline substitutes the previous release).
    """
    if not isinstance(counts, CountVector):
        counts = CountVector(np.asarray(counts))
    total = counts.total
    if total == 0:
        raise ZeroTotalError("cannot normalize an empty time slot")
    return ProbabilityVector(counts.counts / total)


def _paired(p: ProbabilityVector, q: ProbabilityVector) -> tuple[np.ndarray, np.ndarray]:
    if p.domain_size != q.domain_size:
        raise DomainMismatchError(
            f"domain sizes differ: {p.domain_size} vs {q.domain_size}"
        )
    return p.probs, q.probs


def l1_distance(p: ProbabilityVector, q: ProbabilityVector) -> float:
    """Total variation style L1 distance; always in [0, 2] for PDFs."""
    a, b = _paired(p, q)
    return float(np.abs(a - b).sum())


def kl_divergence(p: ProbabilityVector, q: ProbabilityVector, smoothing: float = 1e-6) -> float:
    """KL(p || q) after adding ``smoothing`` to every bin and renormalizing.

    With smoothing 0, bins where p has mass but q does not yield +inf;
    0 * ln 0 is taken as 0.
    """
    if smoothing < 0:
        raise ValueError("smoothing must be >= 0")
    a, b = _paired(p, q)
    if smoothing > 0:
        k = a.size
        a = (a + smoothing) / (1.0 + k * smoothing)
        b = (b + smoothing) / (1.0 + k * smoothing)
    support = a > 0
    if np.any(support & (b == 0)):
        return math.inf
    a_s = a[support]
    b_s = b[support]
    return float(np.sum(a_s * np.log(a_s / b_s)))


def mse(p: ProbabilityVector, q: ProbabilityVector) -> float:
    """Per-bin mean squared difference between two distributions."""
    a, b = _paired(p, q)
    return float(np.mean((a - b) ** 2))


def quantize(x: float, p: float) -> float:
    """Snap ``x`` to the grid of step ``p``, rounding half up."""
    if not 0 < p < 1:
        raise ValueError("precision must lie in (0, 1)")
    if not 0 <= x <= 1:
        raise ValueError("x must lie in [0, 1]")
    return math.floor(x / p + 0.5) * p
