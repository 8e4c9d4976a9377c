"""Per-slot privacy budgets from a converging series, and their allocation.

The total budget ``eps`` is split across an infinite schedule

    eps_t = C * (1 - m^(2t)) / t^2,   C = delta_q / (mu * |zeta|),
    m^2 = li2_inv(pi^2/6 - eps / C)   (clamped to 0 when eps/C > pi^2/6),

whose sum telescopes through the dilogarithm to exactly ``eps``. Each slot
budget converts to a symmetric pair of reweighting rates via the logistic map
eta = (e^x - 1) / (2 (e^x + 1)) with x = mu * eps_t / 8, the inverse of the
slot cost (4/mu) * ln[(1+2*eta_a)/(1-2*eta_a) * (1+2*eta_q)/(1-2*eta_q)].

Random budget allocation (RBA) consumes the materialized series out of order:
a draw S ~ Exp(rate) selects the closest unconsumed element, without
replacement, so the schedule never depletes systematically from the front.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .distributions import SENSITIVITY_L1
from .exceptions import BudgetExhaustedError, ConfigError
from .pool import as_generator
from .special import PI2_OVER_6, li2_inv

#: Default exponential rate for RBA draws ("a large number": the mean draw
#: 1/rate is far below any materialized series element).
DEFAULT_RBA_RATE = 1e8

#: Default number of series elements materialized for allocation.
DEFAULT_HORIZON = 1_000_000


@dataclass(frozen=True)
class EtaPair:
    """Query-side and synopsis-side reweighting rates for one slot."""

    eta_q: float
    eta_a: float

    def __post_init__(self):
        for name, value in (("eta_q", self.eta_q), ("eta_a", self.eta_a)):
            if not 0.0 <= value < 0.5:
                raise ValueError(f"{name} must lie in [0, 0.5), got {value!r}")


@dataclass(frozen=True)
class DecaySeriesConfig:
    """Parameters of the converging budget series."""

    epsilon_total: float
    zeta: float = 0.1
    mu: float = 0.05
    delta_q: float = SENSITIVITY_L1

    def __post_init__(self):
        if self.epsilon_total <= 0:
            raise ConfigError("epsilon_total must be positive")
        if not 0.0 < self.zeta < 1.0:
            raise ConfigError("zeta must lie in (0, 1)")
        if self.mu <= 0:
            raise ConfigError("mu must be positive")
        if self.delta_q <= 0:
            raise ConfigError("delta_q must be positive")

    @property
    def series_constant(self) -> float:
        return self.delta_q / (self.mu * abs(self.zeta))

    @property
    def m_squared(self) -> float:
        target = PI2_OVER_6 - self.epsilon_total / self.series_constant
        if target <= 0.0:
            return 0.0
        return li2_inv(target)


def budget_series(cfg: DecaySeriesConfig, horizon: int) -> np.ndarray:
    """First ``horizon`` elements of the per-slot budget schedule."""
    if horizon < 1:
        raise ConfigError("horizon must be >= 1")
    t = np.arange(1, horizon + 1, dtype=np.float64)
    m2 = cfg.m_squared
    if m2 == 0.0:
        decay = np.zeros_like(t)
    else:
        decay = np.exp(t * math.log(m2))
    return cfg.series_constant * (1.0 - decay) / (t * t)


def slot_cost(etas: EtaPair, mu: float) -> float:
    """Privacy cost of one slot's pair of reweighting updates."""
    if mu <= 0:
        raise ValueError("mu must be positive")
    return (8.0 / mu) * (math.atanh(2.0 * etas.eta_a) + math.atanh(2.0 * etas.eta_q))


def eta_from_slot_budget(eps_slot: float, mu: float) -> EtaPair:
    """Symmetric pair spending exactly ``eps_slot`` (round-trips slot_cost)."""
    if eps_slot < 0:
        raise ValueError("eps_slot must be >= 0")
    if mu <= 0:
        raise ValueError("mu must be positive")
    x = mu * eps_slot / 8.0
    eta = 0.5 * math.tanh(x / 2.0)
    return EtaPair(eta_q=eta, eta_a=eta)


def optimal_eta(t: int, cfg: DecaySeriesConfig) -> float:
    """Slot-t rate of the utility-optimal schedule under ``cfg``.

    Non-increasing in t and -> 0; the induced per-slot costs sum to at most
    epsilon_total over any horizon.
    """
    if t < 1:
        raise ConfigError("t must be >= 1")
    m2 = cfg.m_squared
    eps_t = cfg.series_constant * (1.0 - m2**t) / (t * t)
    return 0.5 * math.tanh(cfg.mu * eps_t / 16.0)


def optimal_eta_schedule(cfg: DecaySeriesConfig, horizon: int) -> np.ndarray:
    """Vectorized optimal_eta for t = 1..horizon."""
    series = budget_series(cfg, horizon)
    return 0.5 * np.tanh(cfg.mu * series / 16.0)


class BudgetState:
    """Unconsumed per-slot budgets for random allocation.

    The infinite series is materialized to ``horizon`` elements; the analytic
    remainder is carried in ``tail_mass`` so that
    consumed_sum + remaining_sum + tail_mass == epsilon_total holds under
    every draw.
    """

    def __init__(self, values: np.ndarray, epsilon_total: float, lambda_rate: float = DEFAULT_RBA_RATE):
        values = np.asarray(values, dtype=np.float64)
        if np.any(values <= 0):
            raise ConfigError("budget candidates must be strictly positive")
        self.values = np.sort(values)  # ascending; nearest search is a bisect
        self.alive = np.ones(values.size, dtype=bool)
        self.epsilon_total = float(epsilon_total)
        self.lambda_rate = float(lambda_rate)
        self.consumed_sum = 0.0
        self._remaining_sum = float(values.sum())
        self.tail_mass = float(epsilon_total - values.sum())

    @classmethod
    def from_config(
        cls,
        cfg: DecaySeriesConfig,
        horizon: int = DEFAULT_HORIZON,
        lambda_rate: float = DEFAULT_RBA_RATE,
    ) -> BudgetState:
        return cls(budget_series(cfg, horizon), cfg.epsilon_total, lambda_rate)

    @property
    def remaining_count(self) -> int:
        return int(self.alive.sum())

    @property
    def remaining_sum(self) -> float:
        return self._remaining_sum

    def _nearest_alive(self, s: float) -> int:
        pos = int(np.searchsorted(self.values, s))
        left = pos - 1
        while left >= 0 and not self.alive[left]:
            left -= 1
        right = pos
        n = self.values.size
        while right < n and not self.alive[right]:
            right += 1
        if left < 0:
            return right
        if right >= n:
            return left
        if abs(self.values[left] - s) <= abs(self.values[right] - s):
            return left
        return right

    def consume(self, index: int) -> float:
        self.alive[index] = False
        value = float(self.values[index])
        self.consumed_sum += value
        self._remaining_sum -= value
        return value


def rba_sample(state: BudgetState, rng_seed) -> float:
    """Consume and return the unconsumed budget closest to an Exp(rate) draw."""
    if state.remaining_count == 0:
        raise BudgetExhaustedError("no per-slot budgets remain; restart required")
    rng = as_generator(rng_seed)
    u = rng.random()
    s = -math.log(1.0 - u) / state.lambda_rate
    return state.consume(state._nearest_alive(s))


class RangeBudgetQueues:
    """Alternative allocation: budgets partitioned into three FIFO ranges.

    Cut points (by value): bottom 50% small, next 30% medium, top 20% large.
    Each draw dequeues the head of a uniformly chosen non-empty queue.
    """

    def __init__(self, values: np.ndarray):
        values = np.asarray(values, dtype=np.float64)
        if values.size == 0:
            raise ConfigError("need at least one budget candidate")
        small_hi = np.quantile(values, 0.5)
        medium_hi = np.quantile(values, 0.8)
        self.small = deque(v for v in values if v <= small_hi)
        self.medium = deque(v for v in values if small_hi < v <= medium_hi)
        self.large = deque(v for v in values if v > medium_hi)

    @property
    def remaining_count(self) -> int:
        return len(self.small) + len(self.medium) + len(self.large)


def rba_range_sample(queues: RangeBudgetQueues, rng_seed) -> float:
    """Dequeue from a uniformly chosen non-empty range queue."""
    candidates = [q for q in (queues.small, queues.medium, queues.large) if q]
    if not candidates:
        raise BudgetExhaustedError("all range queues are empty; restart required")
    rng = as_generator(rng_seed)
    chosen = candidates[int(rng.integers(len(candidates)))]
    return float(chosen.popleft())
