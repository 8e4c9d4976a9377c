"""Stream files, synthetic streams, and the end-to-end pipeline.

Stream files are CSV with header ``slot,category,count`` and dense slot
indexing from 0. The pipeline consumes slots in order (releases for slot t
depend only on slots 1..t), evaluates each release against the slot's true
distribution in both instantaneous and accumulative modes, and writes
plot-ready CSV exports.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from .distributions import CountVector, ProbabilityVector, kl_divergence, mse, normalize
from .estimator import PrivateStreamReleaser
from .exceptions import (
    BudgetExhaustedError,
    BudgetOverflowError,
    MalformedRowError,
    NonContiguousSlotsError,
)
from .pool import as_generator
from .queries import hbos_detect

DEFAULT_VARIANCES = (1.0, 4.0, 9.0, 16.0, 25.0, 36.0, 49.0, 64.0, 81.0, 100.0)

STREAM_HEADER = "slot,category,count"


@dataclass(frozen=True)
class StreamSlot:
    """Counts observed during one time slot."""

    t: int
    counts: CountVector


def parse_stream(path) -> list[StreamSlot]:
    """Read a ``slot,category,count`` file into dense slots."""
    rows: dict[int, dict[int, int]] = {}
    max_category = -1
    with open(path) as fh:
        header = fh.readline().strip()
        if header != STREAM_HEADER:
            raise MalformedRowError(1, f"expected header {STREAM_HEADER!r}, got {header!r}")
        for line_no, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise MalformedRowError(line_no, f"expected 3 fields, got {len(parts)}")
            try:
                slot, category, count = (int(p) for p in parts)
            except ValueError:
                raise MalformedRowError(line_no, f"non-integer field in {line!r}") from None
            if slot < 0 or category < 0:
                raise MalformedRowError(line_no, "slot and category must be non-negative")
            if count < 0:
                raise MalformedRowError(line_no, "count must be non-negative")
            rows.setdefault(slot, {})[category] = rows.get(slot, {}).get(category, 0) + count
            max_category = max(max_category, category)
    if not rows:
        return []
    indices = sorted(rows)
    if indices != list(range(len(indices))):
        raise NonContiguousSlotsError(f"slot indices {indices[:10]}... are not contiguous from 0")
    k = max_category + 1
    slots = []
    for t in indices:
        counts = np.zeros(k, dtype=np.int64)
        for category, count in rows[t].items():
            counts[category] = count
        slots.append(StreamSlot(t=t, counts=CountVector(counts)))
    return slots


def write_stream(slots: list[StreamSlot], path) -> None:
    with open(path, "w") as fh:
        fh.write(STREAM_HEADER + "\n")
        for slot in slots:
            for category, count in enumerate(slot.counts.counts):
                fh.write(f"{slot.t},{category},{int(count)}\n")


def gen_synthetic(
    slots: int,
    items: int = 100,
    mean: float = 100.0,
    variance_set=DEFAULT_VARIANCES,
    seed: int = 0,
) -> list[StreamSlot]:
    """Dynamic-distribution stream: per slot, every item's count is Gaussian
    with a slot-level variance drawn uniformly from ``variance_set``."""
    if slots < 1 or items < 1:
        raise ValueError("slots and items must be >= 1")
    if mean <= 0:
        raise ValueError("mean must be positive")
    variances = np.asarray(sorted(variance_set), dtype=np.float64)
    rng = as_generator(seed)
    out = []
    for t in range(slots):
        v = float(variances[rng.integers(variances.size)])
        counts = np.rint(rng.normal(mean, np.sqrt(v), size=items))
        counts = np.clip(counts, 0, None).astype(np.int64)
        out.append(StreamSlot(t=t, counts=CountVector(counts)))
    return out


@dataclass
class RunConfig:
    """Pipeline configuration; flags override file values."""

    epsilon_total: float = 2.0
    lam: float = 0.1
    mu: float = 0.05
    zeta: float = 0.1
    lambda_rate: float | str = 1e8
    pool_trials: int = 1000
    pool_size: int | None = None
    sample_count: int = 32
    queries_per_slot: int = 1
    queries: tuple[str, ...] = ("pdf",)
    forgetting: float = 0.9
    release: str = "argmax"
    horizon: int = 1_000_000
    hbos_quantile: float = 0.95
    kl_smoothing: float = 1e-6
    seed: int = 0
    restart_on_exhaustion: bool = False

    @classmethod
    def from_file(cls, path, **overrides) -> RunConfig:
        """Plain ``key = value`` file; unknown keys are rejected."""
        values = {}
        with open(path) as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"config line {line_no}: expected 'key = value'")
                key, raw = (part.strip() for part in line.split("=", 1))
                values[key] = raw
        cfg = {}
        for key, raw in values.items():
            if key not in cls.__dataclass_fields__:
                raise ValueError(f"unknown config key {key!r}")
            cfg[key] = _coerce(key, raw)
        cfg.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**cfg)


def _coerce(key: str, raw: str):
    if key == "queries":
        return tuple(part.strip() for part in raw.split(";") if part.strip())
    if key == "lambda_rate" and raw == "auto":
        return "auto"
    if key in ("pool_trials", "pool_size", "sample_count", "queries_per_slot", "horizon", "seed"):
        return int(raw)
    if key in ("release",):
        return raw
    if key == "restart_on_exhaustion":
        return raw.lower() in ("1", "true", "yes")
    return float(raw)


@dataclass
class RunReport:
    """Summary of one pipeline run."""

    slots: int = 0
    consumed_budget: float = 0.0
    remaining_budget: float = 0.0
    ledger_cumulative: float = 0.0
    restarts: int = 0
    mean_inst_kl: float = 0.0
    mean_inst_mse: float = 0.0
    mean_acc_kl: float = 0.0
    mean_acc_mse: float = 0.0
    p90_inst_kl: float = 0.0
    p90_inst_mse: float = 0.0
    inst_kl: list[float] = field(default_factory=list, repr=False)
    inst_mse: list[float] = field(default_factory=list, repr=False)
    acc_kl: list[float] = field(default_factory=list, repr=False)
    acc_mse: list[float] = field(default_factory=list, repr=False)

    def summary_dict(self) -> dict:
        d = asdict(self)
        for series in ("inst_kl", "inst_mse", "acc_kl", "acc_mse"):
            d.pop(series)
        return d


def run_pipeline(cfg: RunConfig, stream: list[StreamSlot], out_dir=None) -> RunReport:
    """Run the full release pipeline over ``stream``; write exports if asked.

    Budget exhaustion and overflow propagate annotated with the slot index.
    """
    report = RunReport()
    if not stream:
        if out_dir is not None:
            _write_exports(cfg, [], [], None, out_dir, report)
        return report

    releaser = PrivateStreamReleaser(
        epsilon_total=cfg.epsilon_total,
        lam=cfg.lam,
        mu=cfg.mu,
        zeta=cfg.zeta,
        pool_trials=cfg.pool_trials,
        pool_size=cfg.pool_size,
        sample_count=cfg.sample_count,
        queries_per_slot=cfg.queries_per_slot,
        queries=cfg.queries,
        forgetting=cfg.forgetting,
        release=cfg.release,
        lambda_rate=cfg.lambda_rate,
        horizon=cfg.horizon,
        restart_on_exhaustion=cfg.restart_on_exhaustion,
        seed=cfg.seed,
    )

    k = stream[0].counts.domain_size
    acc_counts = np.zeros(k, dtype=np.int64)
    acc_release = np.zeros(k, dtype=np.float64)
    rows = []
    for slot in stream:
        try:
            releaser.partial_fit(slot.counts.counts.reshape(1, -1))
        except (BudgetExhaustedError, BudgetOverflowError) as exc:
            raise type(exc)(f"slot {slot.t}: {exc}") from exc
        release = releaser.releases_[-1]
        acc_counts += slot.counts.counts
        n_seen = slot.t + 1
        acc_release = acc_release + (release - acc_release) / n_seen
        released_pv = ProbabilityVector(release)
        acc_released_pv = ProbabilityVector(acc_release / acc_release.sum())
        if slot.counts.total > 0:
            truth = normalize(slot.counts)
            acc_truth = normalize(acc_counts)
            inst_kl = kl_divergence(truth, released_pv, cfg.kl_smoothing)
            inst_mse = mse(truth, released_pv)
            acc_kl = kl_divergence(acc_truth, acc_released_pv, cfg.kl_smoothing)
            acc_mse = mse(acc_truth, acc_released_pv)
            report.inst_kl.append(inst_kl)
            report.inst_mse.append(inst_mse)
            report.acc_kl.append(acc_kl)
            report.acc_mse.append(acc_mse)
            rows.append((slot.t, inst_kl, inst_mse, acc_kl, acc_mse))
        else:
            rows.append((slot.t, None, None, None, None))

    report.slots = len(stream)
    report.consumed_budget = releaser.budget_state_.consumed_sum
    report.remaining_budget = releaser.budget_state_.remaining_sum
    report.ledger_cumulative = releaser.ledger_.cumulative
    report.restarts = releaser.ledger_.restarts
    if report.inst_kl:
        report.mean_inst_kl = float(np.mean(report.inst_kl))
        report.mean_inst_mse = float(np.mean(report.inst_mse))
        report.mean_acc_kl = float(np.mean(report.acc_kl))
        report.mean_acc_mse = float(np.mean(report.acc_mse))
        report.p90_inst_kl = float(np.quantile(report.inst_kl, 0.9))
        report.p90_inst_mse = float(np.quantile(report.inst_mse, 0.9))
    if out_dir is not None:
        _write_exports(cfg, stream, rows, releaser, out_dir, report)
    return report


def _write_exports(cfg, stream, metric_rows, releaser, out_dir, report: RunReport) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    with open(out / "releases.csv", "w") as fh:
        fh.write("slot,query_id,category,probability\n")
        if releaser is not None:
            for t, (pairs, release) in enumerate(zip(releaser.released_pairs_, releaser.releases_)):
                if pairs:
                    for q_idx, syn_idx in pairs:
                        for c, prob in enumerate(releaser.pool_.pdfs[syn_idx]):
                            fh.write(f"{t},{q_idx},{c},{prob:.12g}\n")
                else:  # empty slot carried the previous release forward
                    for c, prob in enumerate(release):
                        fh.write(f"{t},-1,{c},{prob:.12g}\n")

    with open(out / "metrics.csv", "w") as fh:
        fh.write("slot,inst_kl,inst_mse,acc_kl,acc_mse\n")
        for t, *values in metric_rows:
            text = ",".join("" if v is None else f"{v:.12g}" for v in values)
            fh.write(f"{t},{text}\n")

    if releaser is not None:
        releaser.ledger_.export_csv(out / "ledger.csv")
        with open(out / "budget.csv", "w") as fh:
            fh.write("slot,eps_slot,consumed,remaining\n")
            consumed = 0.0
            total = releaser.budget_state_.epsilon_total
            for t, eps in enumerate(releaser.eps_drawn_):
                consumed += eps
                fh.write(f"{t},{eps:.12g},{consumed:.12g},{total - consumed:.12g}\n")
        with open(out / "anomalies.csv", "w") as fh:
            fh.write("slot,category,score,flagged\n")
            for t, release in enumerate(releaser.releases_):
                rep = hbos_detect(ProbabilityVector(release), cfg.hbos_quantile)
                for c, s in enumerate(rep.scores):
                    fh.write(f"{t},{c},{s:.12g},{int(c in rep.flagged)}\n")

    with open(out / "report.json", "w") as fh:
        json.dump(report.summary_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
