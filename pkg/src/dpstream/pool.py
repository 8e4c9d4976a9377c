"""Data-independent synopsis pools.

A synopsis is a quantized PDF built from a multinomial draw: ``n`` trials
spread uniformly over ``k`` categories, scaled by the precision ``p = 1/n``.
The generator reads configuration only (never stream data), so building the
pool consumes no privacy budget. Counts are kept as integers; exact
normalization is the integer identity sum(counts) == n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidDomainError, WeightRowError

_CHUNK = 16384
_ROW_TOL = 1e-9


@dataclass(frozen=True)
class Synopsis:
    """One quantized PDF from the pool, identified by its pool index."""

    counts: np.ndarray = field(repr=False)
    trials: int
    id: int

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        object.__setattr__(self, "counts", counts)
        if counts.sum() != self.trials:
            raise ValueError("synopsis counts must sum to the trial count")

    @property
    def precision(self) -> float:
        return 1.0 / self.trials

    @property
    def pdf(self) -> np.ndarray:
        return self.counts / self.trials


class SynopsisPool:
    """A fixed pool of ``pool_size`` synopses sharing one grid.

    ``counts`` is the (pool_size, domain_size) integer matrix; ``pdfs`` is
    the float view used in scoring. Immutable once built.
    """

    def __init__(self, counts: np.ndarray, trials: int, seed: int):
        counts = np.asarray(counts, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[0] == 0:
            raise ValueError("counts must be a non-empty 2-D matrix")
        if np.any(counts.sum(axis=1) != trials):
            raise ValueError("every synopsis must sum to the trial count")
        self.counts = counts
        self.counts.setflags(write=False)
        self.trials = int(trials)
        self.seed = int(seed)
        self.pdfs = counts / trials
        self.pdfs.setflags(write=False)

    @property
    def pool_size(self) -> int:
        return self.counts.shape[0]

    @property
    def domain_size(self) -> int:
        return self.counts.shape[1]

    @property
    def precision_p(self) -> float:
        return 1.0 / self.trials

    def __len__(self) -> int:
        return self.pool_size

    def synopsis(self, i: int) -> Synopsis:
        return Synopsis(self.counts[i], self.trials, i)


def default_pool_size(domain_size: int) -> int:
    """Default pool size: saturates coverage at desk scale well below 1e5."""
    return int(min(100_000, 50 * domain_size))


def generate_pool(n: int, k: int, pool_size: int, seed: int) -> SynopsisPool:
    """Draw ``pool_size`` synopses from Multinomial(n, uniform over k).

    Deterministic for a given seed. Generation is chunked with a fixed chunk
    size, each chunk seeded by a spawn key, so chunks can be produced
    independently (and in parallel) without changing the output.
    """
    if n < 1 or k < 1:
        raise InvalidDomainError(f"need n >= 1 and k >= 1, got n={n}, k={k}")
    if pool_size < 1:
        raise InvalidDomainError("pool_size must be >= 1")
    pvals = np.full(k, 1.0 / k)
    blocks = []
    for j in range(0, pool_size, _CHUNK):
        size = min(_CHUNK, pool_size - j)
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(j // _CHUNK,)))
        blocks.append(rng.multinomial(n, pvals, size=size))
    return SynopsisPool(np.vstack(blocks), trials=n, seed=seed)


def enumerate_full_pool(n: int, k: int) -> SynopsisPool:
    """Pool containing every composition of ``n`` trials into ``k`` bins."""
    if n < 1 or k < 1:
        raise InvalidDomainError(f"need n >= 1 and k >= 1, got n={n}, k={k}")
    rows = np.array(list(_compositions(n, k)), dtype=np.int64)
    return SynopsisPool(rows, trials=n, seed=0)


def _compositions(n: int, k: int):
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, k - 1):
            yield (first, *rest)


def entropy_approximation(pool_trials: int, k: int) -> float:
    """Closed-form entropy of a uniform multinomial with ``pool_trials`` trials.

    Gaussian (CLT) approximation; exact enumeration is used as the oracle in
    tests. Returns 0 for a single category.
    """
    if pool_trials < 1 or k < 1:
        raise InvalidDomainError("need pool_trials >= 1 and k >= 1")
    if k == 1:
        return 0.0
    return 0.5 * (k - 1) * math.log(2.0 * math.pi * math.e * pool_trials) - 0.5 * k * math.log(k)


def empirical_pool_entropy(pool: SynopsisPool) -> float:
    """Shannon entropy (nats) of the frequency profile of distinct synopses."""
    _, freq = np.unique(pool.counts, axis=0, return_counts=True)
    f = freq / pool.pool_size
    return float(-(f * np.log(f)).sum())


class PoolWeights:
    """Per-query synopsis-sampling distributions, one row per query.

    Mutated only by the boosting engine (single writer); everything else
    treats rows as read-only.
    """

    def __init__(self, weights: np.ndarray):
        weights = np.asarray(weights, dtype=np.float64)
        if weights.ndim != 2:
            raise ValueError("weights must be a (num_queries, pool_size) matrix")
        self.weights = weights

    @classmethod
    def uniform(cls, num_queries: int, pool_size: int) -> PoolWeights:
        return cls(np.full((num_queries, pool_size), 1.0 / pool_size))

    @property
    def num_queries(self) -> int:
        return self.weights.shape[0]

    @property
    def pool_size(self) -> int:
        return self.weights.shape[1]

    def row(self, q_index: int) -> np.ndarray:
        return self.weights[q_index]

    def check_row(self, q_index: int) -> np.ndarray:
        row = self.weights[q_index]
        if np.any(row < 0) or abs(float(row.sum()) - 1.0) > _ROW_TOL:
            raise WeightRowError(f"weight row {q_index} is not a distribution")
        return row


def sample_synopses(
    pool: SynopsisPool,
    weights: PoolWeights,
    q_index: int,
    count: int,
    rng_seed,
) -> np.ndarray:
    """Draw ``count`` synopsis indices from the query's weight row."""
    if count < 1:
        raise ValueError("count must be >= 1")
    row = weights.check_row(q_index)
    rng = as_generator(rng_seed)
    return rng.choice(pool.pool_size, size=count, p=row)


def as_generator(seed_or_rng) -> np.random.Generator:
    """Accept either a seed or an existing Generator."""
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


def save_pool(pool: SynopsisPool, path) -> None:
    """Flat text format: a header line, then one synopsis per line."""
    with open(path, "w") as fh:
        fh.write(f"# n={pool.trials} k={pool.domain_size} N={pool.pool_size} seed={pool.seed}\n")
        for row in pool.counts:
            fh.write(",".join(f"{c / pool.trials:.17g}" for c in row))
            fh.write("\n")


def load_pool(path) -> SynopsisPool:
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("#"):
            raise ValueError("pool file must start with a '# n=... k=... N=... seed=...' header")
        meta = dict(part.split("=") for part in header[1:].split())
        n = int(meta["n"])
        rows = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            probs = np.array([float(x) for x in line.split(",")])
            rows.append(np.rint(probs * n).astype(np.int64))
    counts = np.vstack(rows)
    if counts.shape[0] != int(meta["N"]) or counts.shape[1] != int(meta["k"]):
        raise ValueError("pool file body does not match its header")
    return SynopsisPool(counts, trials=n, seed=int(meta["seed"]))
