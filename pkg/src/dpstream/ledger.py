"""Append-only accounting of per-slot privacy spend.

Every slot's pair of reweighting rates is priced through ``slot_cost`` and
appended; an append that would push the running total past the configured
budget is rejected outright (the remedy is an explicit ``reset``, mirroring a
system restart with a renewed budget).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .budget import EtaPair, slot_cost
from .exceptions import BudgetOverflowError
from .special import li2


class PrivacyLedger:
    """Running record of (slot, eta_q, eta_a, cost) with a hard cap."""

    def __init__(self, epsilon_total: float, mu: float):
        if epsilon_total <= 0 or mu <= 0:
            raise ValueError("epsilon_total and mu must be positive")
        self.epsilon_total = float(epsilon_total)
        self.mu = float(mu)
        self.slots: list[int] = []
        self.eta_q: list[float] = []
        self.eta_a: list[float] = []
        self.costs: list[float] = []
        self.cumulative = 0.0
        self.restarts = 0

    def __len__(self) -> int:
        return len(self.slots)

    @property
    def last_slot(self) -> int:
        return self.slots[-1] if self.slots else -1

    def record(self, t: int, etas: EtaPair, repeats: int = 1) -> float:
        """Append slot ``t``; returns the charged cost.

        ``repeats`` charges the same pair several times in one slot (one per
        released PDF when a slot answers multiple queries).
        """
        if t <= self.last_slot:
            raise ValueError(f"slot {t} is not after the last recorded slot {self.last_slot}")
        cost = slot_cost(etas, self.mu) * repeats
        if self.cumulative + cost > self.epsilon_total:
            raise BudgetOverflowError(
                f"slot {t} costs {cost:.6g}; cumulative {self.cumulative:.6g} "
                f"would exceed the total budget {self.epsilon_total:.6g}"
            )
        self.slots.append(t)
        self.eta_q.append(etas.eta_q)
        self.eta_a.append(etas.eta_a)
        self.costs.append(cost)
        self.cumulative += cost
        return cost

    def record_schedule(self, etas: Sequence[float] | np.ndarray, start_slot: int = 0) -> float:
        """Bulk-append symmetric pairs for slots start_slot, start_slot+1, ...

        Vectorized equivalent of repeated ``record``; used for long-horizon
        accounting runs.
        """
        etas = np.asarray(etas, dtype=np.float64)
        if np.any(etas < 0) or np.any(etas >= 0.5):
            raise ValueError("every eta must lie in [0, 0.5)")
        if start_slot <= self.last_slot:
            raise ValueError("schedule must start after the last recorded slot")
        costs = (16.0 / self.mu) * np.arctanh(2.0 * etas)
        running = self.cumulative + np.cumsum(costs)
        if running.size and running[-1] > self.epsilon_total:
            bad = int(np.argmax(running > self.epsilon_total))
            raise BudgetOverflowError(
                f"schedule overflows the budget at slot {start_slot + bad}"
            )
        self.slots.extend(range(start_slot, start_slot + etas.size))
        self.eta_q.extend(etas.tolist())
        self.eta_a.extend(etas.tolist())
        self.costs.extend(costs.tolist())
        if running.size:
            self.cumulative = float(running[-1])
        return self.cumulative

    def reset(self) -> None:
        """Zero all state and count a restart event."""
        self.slots.clear()
        self.eta_q.clear()
        self.eta_a.clear()
        self.costs.clear()
        self.cumulative = 0.0
        self.restarts += 1

    def export_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("slot,eta_q,eta_a,cost,cumulative\n")
            running = 0.0
            for t, eq, ea, c in zip(self.slots, self.eta_q, self.eta_a, self.costs):
                running += c
                fh.write(f"{t},{eq:.12g},{ea:.12g},{c:.12g},{running:.12g}\n")


def utility_loss_bound(etas_history: Iterable[EtaPair]) -> float:
    """Signed log-bound on the probability of an inaccurate release.

    Each slot contributes (1/4) ln[(1 - 4 eta_q^2)(1 - 4 eta_a^2)] <= 0;
    callers exponentiate to get the probability bound.
    """
    total = 0.0
    for pair in etas_history:
        total += 0.25 * math.log((1.0 - 4.0 * pair.eta_q**2) * (1.0 - 4.0 * pair.eta_a**2))
    return total


@dataclass(frozen=True)
class SeriesBounds:
    """Envelope [m, M] of the rate schedule plus its decay parameters."""

    m: float
    M: float
    zeta: float
    mu: float
    delta_q: float = 2.0

    def __post_init__(self):
        if not 0.0 <= self.m <= self.M <= 1.0:
            raise ValueError("need 0 <= m <= M <= 1")
        if self.zeta <= 0 or self.mu <= 0:
            raise ValueError("zeta and mu must be positive")


def theoretical_bounds(b: SeriesBounds) -> tuple[float, float]:
    """Closed-form (loss_lower_bound, privacy_lower_bound) for a schedule.

    loss  >= (1/(4 zeta)) [li2(M^2) - li2(m^2) + 4 li2(m) - 4 li2(M)]
    eps   >= (2 delta_q / (mu zeta)) [li2(M^2) - li2(m^2)]
    """
    spread = li2(b.M**2) - li2(b.m**2)
    loss = (spread + 4.0 * li2(b.m) - 4.0 * li2(b.M)) / (4.0 * b.zeta)
    privacy = 2.0 * b.delta_q / (b.mu * b.zeta) * spread
    return loss, privacy
