"""Bi-directional boosting over a query pool and a synopsis pool.

Each slot: draw a per-slot budget, convert it to a symmetric pair of
reweighting rates, sample queries by their weights and synopses by the
per-query rows, score every sampled (query, synopsis) pair against the
slot's true distribution, then apply one atomic exponential reweight:
accurate synopses gain weight, well-served queries lose weight. The release
for each sampled query comes from its sampled synopses using the
pre-update weights, so the current slot's data reaches the output only
through updates that the ledger has already priced.

Scores are +1 inside the accuracy bound, -1 past the overfit margin, and a
linear ramp in between. Raw scores feed a per-pair accumulator with
exponential forgetting, which keeps the update exponent bounded on an
unbounded stream while preserving recency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .budget import EtaPair, eta_from_slot_budget
from .distributions import CountVector, ProbabilityVector, normalize
from .exceptions import ConfigError, DomainMismatchError
from .ledger import PrivacyLedger
from .pool import PoolWeights, SynopsisPool, as_generator
from .queries import Query, eval_query


@dataclass(frozen=True)
class BoostConfig:
    """Scoring and sampling knobs for the boosting engine."""

    lam: float = 0.1
    mu: float = 0.05
    sample_count: int = 32
    queries_per_slot: int = 1
    forgetting: float = 0.9
    weight_floor: float = 1e-12
    release: str = "argmax"
    paper_sign_convention: bool = False

    def __post_init__(self):
        if self.lam <= 0:
            raise ConfigError("lam must be positive")
        if not 0 < self.mu <= self.lam / 2:
            raise ConfigError("mu must lie in (0, lam/2]")
        if self.sample_count < 1 or self.queries_per_slot < 1:
            raise ConfigError("sample_count and queries_per_slot must be >= 1")
        if not 0.0 <= self.forgetting < 1.0:
            raise ConfigError("forgetting must lie in [0, 1)")
        if self.weight_floor <= 0:
            raise ConfigError("weight_floor must be positive")
        if self.release not in ("argmax", "sample"):
            raise ConfigError("release must be 'argmax' or 'sample'")


class QueryPool:
    """Finite query set with its sampling distribution."""

    def __init__(self, queries: list[Query], weights: np.ndarray | None = None):
        if not queries:
            raise ConfigError("query pool must not be empty")
        self.queries = list(queries)
        if weights is None:
            weights = np.full(len(queries), 1.0 / len(queries))
        weights = np.asarray(weights, dtype=np.float64)
        if weights.size != len(queries):
            raise ConfigError("weights length must match the query count")
        if np.any(weights < 0) or abs(float(weights.sum()) - 1.0) > 1e-9:
            raise ConfigError("query weights must form a distribution")
        self.weights = weights

    def __len__(self) -> int:
        return len(self.queries)


def score(error: float, cfg: BoostConfig) -> float:
    """Synopsis-side score for one answer gap; the query side is its negation."""
    if error < 0:
        raise ValueError("error must be >= 0")
    if error < cfg.lam:
        return 1.0
    if error >= cfg.lam + cfg.mu:
        return -1.0
    return 1.0 - 2.0 * (error - cfg.lam) / cfg.mu


def _score_array(errors: np.ndarray, cfg: BoostConfig) -> np.ndarray:
    return np.clip(1.0 - 2.0 * (errors - cfg.lam) / cfg.mu, -1.0, 1.0)


def _answers(q: Query, pdfs: np.ndarray) -> np.ndarray:
    """Vectorized scalar answers of one query over rows of ``pdfs``."""
    k = pdfs.shape[1]
    if q.kind == "point":
        return pdfs[:, q.category]
    if q.kind == "range":
        return pdfs[:, q.lo : q.hi + 1].sum(axis=1)
    if q.kind == "sum":
        return q.released_total * pdfs[:, q.lo : q.hi + 1].sum(axis=1)
    if q.kind == "mean":
        return pdfs @ np.arange(k)
    if q.kind == "median":
        return np.argmax(np.cumsum(pdfs, axis=1) >= 0.5, axis=1).astype(np.float64)
    raise ValueError(f"no scalar answers for kind {q.kind!r}")


def _errors(q: Query, truth: ProbabilityVector, pdfs: np.ndarray) -> np.ndarray:
    """Normalized answer gaps of candidate rows against the true PDF."""
    if q.kind == "pdf":
        return np.abs(pdfs - truth.probs).sum(axis=1)
    gaps = np.abs(_answers(q, pdfs) - eval_query(q, truth))
    k = truth.domain_size
    if q.kind in ("mean", "median"):
        return gaps / max(k - 1, 1)
    if q.kind == "sum":
        return gaps / q.released_total
    return gaps


@dataclass
class StepResult:
    """Outcome of one slot: released synopsis per sampled query."""

    slot: int
    released: list[tuple[int, int]]
    etas: EtaPair
    cost: float


@dataclass
class DpiState:
    """Mutable engine state; owned by exactly one stream."""

    query_pool: QueryPool
    pool: SynopsisPool
    pool_weights: PoolWeights
    ledger: PrivacyLedger
    cfg: BoostConfig
    slot_index: int = 0
    acc_pair: np.ndarray = field(default=None, repr=False)
    acc_query: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        nq, npool = len(self.query_pool), self.pool.pool_size
        if self.pool_weights.num_queries != nq or self.pool_weights.pool_size != npool:
            raise ConfigError("pool_weights shape must be (num_queries, pool_size)")
        if self.acc_pair is None:
            self.acc_pair = np.zeros((nq, npool))
        if self.acc_query is None:
            self.acc_query = np.zeros(nq)

    @classmethod
    def initialize(
        cls,
        queries: list[Query],
        pool: SynopsisPool,
        ledger: PrivacyLedger,
        cfg: BoostConfig,
    ) -> DpiState:
        return cls(
            query_pool=QueryPool(queries),
            pool=pool,
            pool_weights=PoolWeights.uniform(len(queries), pool.pool_size),
            ledger=ledger,
            cfg=cfg,
        )


def _renormalize(w: np.ndarray, floor: float) -> np.ndarray:
    w = w / w.sum()
    w = np.maximum(w, floor)
    return w / w.sum()


def dpi_step(state: DpiState, slot, eps_slot: float, rng_seed) -> StepResult:
    """Consume one slot of data; returns the released synopses.

    Deterministic for a given seed. Raises BudgetOverflowError (state
    untouched) if the ledger rejects the slot's cost.
    """
    if eps_slot < 0:
        raise ValueError("eps_slot must be >= 0")
    counts = slot if isinstance(slot, CountVector) else CountVector(np.asarray(slot))
    if counts.domain_size != state.pool.domain_size:
        raise DomainMismatchError(
            f"slot domain {counts.domain_size} != pool domain {state.pool.domain_size}"
        )
    truth = normalize(counts)
    cfg = state.cfg
    rng = as_generator(rng_seed)

    nq = len(state.query_pool)
    qps = min(cfg.queries_per_slot, nq)
    pair = eta_from_slot_budget(eps_slot / qps, cfg.mu)
    cost = state.ledger.record(state.slot_index, pair, repeats=qps)
    alpha = math.atanh(2.0 * pair.eta_a)  # symmetric pair: one coefficient

    q_indices = rng.choice(nq, size=qps, replace=False, p=state.query_pool.weights)

    sampled: list[tuple[int, np.ndarray, np.ndarray]] = []
    released: list[tuple[int, int]] = []
    for q_idx in q_indices:
        row = state.pool_weights.row(q_idx)
        idx = rng.choice(state.pool.pool_size, size=cfg.sample_count, p=row)
        errors = _errors(state.query_pool.queries[q_idx], truth, state.pool.pdfs[idx])
        sampled.append((int(q_idx), idx, _score_array(errors, cfg)))
        if cfg.release == "argmax":
            rel = int(idx[np.argmax(row[idx])])
        else:
            local = row[idx] / row[idx].sum()
            rel = int(idx[rng.choice(idx.size, p=local)])
        released.append((int(q_idx), rel))

    # one atomic weight update at slot end
    state.acc_pair *= cfg.forgetting
    state.acc_query *= cfg.forgetting
    syn_sign = -1.0 if cfg.paper_sign_convention else 1.0
    for q_idx, idx, scores in sampled:
        np.add.at(state.acc_pair[q_idx], idx, scores)
        state.acc_query[q_idx] += float(scores.mean())
        if alpha > 0.0:
            tilted = state.pool_weights.weights[q_idx] * np.exp(
                syn_sign * alpha * state.acc_pair[q_idx]
            )
            state.pool_weights.weights[q_idx] = _renormalize(tilted, cfg.weight_floor)
    if alpha > 0.0:
        tilted_q = state.query_pool.weights * np.exp(-alpha * state.acc_query)
        state.query_pool.weights = _renormalize(tilted_q, cfg.weight_floor)

    result = StepResult(slot=state.slot_index, released=released, etas=pair, cost=cost)
    state.slot_index += 1
    return result
