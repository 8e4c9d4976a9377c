"""Scikit-learn style front end for the streaming release engine.

``PrivateStreamReleaser`` is a stateful transformer: each row of ``X`` is one
time slot's count vector, ``partial_fit``/``fit`` consume slots in order, and
``transform`` returns the released PDF per consumed slot. All randomness
derives from one seed, so identical inputs and parameters reproduce identical
releases byte for byte.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .boosting import BoostConfig, DpiState, dpi_step
from .budget import (
    DEFAULT_HORIZON,
    DEFAULT_RBA_RATE,
    BudgetState,
    DecaySeriesConfig,
    rba_sample,
)
from .exceptions import BudgetExhaustedError, ZeroTotalError
from .ledger import PrivacyLedger
from .pool import default_pool_size, generate_pool
from .queries import Query, parse_query


def check_count_matrix(X, domain_size: int | None = None) -> np.ndarray:
    """Validate a (n_slots, domain_size) matrix of non-negative integer counts."""
    X = np.asarray(X)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2 or X.shape[1] == 0:
        raise ValueError("X must be a 2-D (n_slots, domain_size) count matrix")
    if not np.issubdtype(X.dtype, np.integer):
        if not np.all(X == np.floor(X)):
            raise ValueError("counts must be integers")
        X = X.astype(np.int64)
    if np.any(X < 0):
        raise ValueError("counts must be non-negative")
    if domain_size is not None and X.shape[1] != domain_size:
        raise ValueError(f"expected domain size {domain_size}, got {X.shape[1]}")
    return X.astype(np.int64)


class PrivateStreamReleaser(BaseEstimator):
    """Release one private PDF per consumed time slot.

    Parameters mirror the run configuration: the total privacy budget and
    decay-series shape, the synopsis-pool geometry (``pool_trials`` is the
    expected slot population, fixed by configuration so pool construction
    never reads data), the scoring bounds, and the sampling sizes.

    ``lambda_rate='auto'`` scales the budget-selection rate so the mean draw
    matches the mean materialized series element.
    """

    def __init__(
        self,
        epsilon_total: float = 2.0,
        lam: float = 0.1,
        mu: float = 0.05,
        zeta: float = 0.1,
        pool_trials: int = 1000,
        pool_size: int | None = None,
        sample_count: int = 32,
        queries_per_slot: int = 1,
        queries: tuple[str, ...] = ("pdf",),
        forgetting: float = 0.9,
        weight_floor: float = 1e-12,
        release: str = "argmax",
        lambda_rate: float | str = DEFAULT_RBA_RATE,
        horizon: int = DEFAULT_HORIZON,
        restart_on_exhaustion: bool = False,
        seed: int = 0,
    ):
        self.epsilon_total = epsilon_total
        self.lam = lam
        self.mu = mu
        self.zeta = zeta
        self.pool_trials = pool_trials
        self.pool_size = pool_size
        self.sample_count = sample_count
        self.queries_per_slot = queries_per_slot
        self.queries = queries
        self.forgetting = forgetting
        self.weight_floor = weight_floor
        self.release = release
        self.lambda_rate = lambda_rate
        self.horizon = horizon
        self.restart_on_exhaustion = restart_on_exhaustion
        self.seed = seed

    # -- lifecycle -----------------------------------------------------

    def _initialize(self, domain_size: int) -> None:
        cfg = DecaySeriesConfig(epsilon_total=self.epsilon_total, zeta=self.zeta, mu=self.mu)
        rate = self.lambda_rate
        if rate == "auto":
            rate = self.horizon / self.epsilon_total
        pool_size = self.pool_size or default_pool_size(domain_size)
        pool_seed = _child_seed(self.seed, 0)
        self.pool_ = generate_pool(self.pool_trials, domain_size, pool_size, int(pool_seed.generate_state(1)[0]))
        self.budget_state_ = BudgetState.from_config(cfg, horizon=self.horizon, lambda_rate=rate)
        self.ledger_ = PrivacyLedger(self.epsilon_total, self.mu)
        boost_cfg = BoostConfig(
            lam=self.lam,
            mu=self.mu,
            sample_count=self.sample_count,
            queries_per_slot=self.queries_per_slot,
            forgetting=self.forgetting,
            weight_floor=self.weight_floor,
            release=self.release,
        )
        self.state_ = DpiState.initialize(self._query_objects(), self.pool_, self.ledger_, boost_cfg)
        self._rba_rng = np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(1,)))
        self._step_rng = np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(2,)))
        self.releases_: list[np.ndarray] = []
        self.released_pairs_: list[list[tuple[int, int]]] = []
        self.eps_drawn_: list[float] = []
        self.domain_size_ = domain_size

    def _query_objects(self) -> list[Query]:
        return [q if isinstance(q, Query) else parse_query(q) for q in self.queries]

    @property
    def is_initialized(self) -> bool:
        return hasattr(self, "state_")

    # -- streaming API ---------------------------------------------------

    def partial_fit(self, X, y=None):
        """Consume slots; one release per row is appended to ``releases_``."""
        X = check_count_matrix(X, getattr(self, "domain_size_", None))
        if not self.is_initialized:
            self._initialize(X.shape[1])
        for row in X:
            self._consume_slot(row)
        return self

    def fit(self, X, y=None):
        """Reset state and consume the whole stream."""
        X = check_count_matrix(X)
        self._initialize(X.shape[1])
        return self.partial_fit(X)

    def transform(self, X) -> np.ndarray:
        """Consume slots and return their released PDFs, one row each."""
        X = check_count_matrix(X, getattr(self, "domain_size_", None))
        if not self.is_initialized:
            self._initialize(X.shape[1])
        start = len(self.releases_)
        self.partial_fit(X)
        return np.vstack(self.releases_[start:])

    def fit_transform(self, X, y=None) -> np.ndarray:
        X = check_count_matrix(X)
        self._initialize(X.shape[1])
        return self.transform(X)

    def predict(self, X) -> np.ndarray:
        """Alias of transform (the prediction is the released distribution)."""
        return self.transform(X)

    # -- internals -------------------------------------------------------

    def _consume_slot(self, row: np.ndarray) -> None:
        if row.sum() == 0:
            # empty slot: repeat the previous release (uniform at the start),
            # consume no budget
            if self.releases_:
                release = self.releases_[-1]
            else:
                release = np.full(self.domain_size_, 1.0 / self.domain_size_)
            self.releases_.append(release)
            self.released_pairs_.append([])
            self.eps_drawn_.append(0.0)
            self.state_.slot_index += 1
            return
        try:
            eps_t = rba_sample(self.budget_state_, self._rba_rng)
        except BudgetExhaustedError:
            if not self.restart_on_exhaustion:
                raise
            self._restart()
            eps_t = rba_sample(self.budget_state_, self._rba_rng)
        result = dpi_step(self.state_, row, eps_t, self._step_rng)
        _, syn_idx = result.released[0]
        self.releases_.append(np.asarray(self.pool_.pdfs[syn_idx]))
        self.released_pairs_.append(result.released)
        self.eps_drawn_.append(eps_t)

    def _restart(self) -> None:
        cfg = DecaySeriesConfig(epsilon_total=self.epsilon_total, zeta=self.zeta, mu=self.mu)
        self.ledger_.reset()
        self.budget_state_ = BudgetState.from_config(
            cfg, horizon=self.horizon, lambda_rate=self.budget_state_.lambda_rate
        )


def _child_seed(seed: int, key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(key,))
