"""Query semantics over released PDFs, plus the downstream applications.

Scalar query kinds (point/range/sum/mean/median) follow the released
distribution directly; the ``pdf`` kind stands for the whole-distribution
release and is answered by the PDF itself, so it has no scalar evaluation but
does have a natural error (L1 distance). ``query_error`` returns errors on a
common [0, 2] scale so one accuracy threshold applies to every kind.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .distributions import ProbabilityVector, l1_distance
from .exceptions import MissingTotalError

QUERY_KINDS = ("pdf", "point", "range", "sum", "mean", "median")


@dataclass(frozen=True)
class Query:
    """One entry of the query pool."""

    kind: str = "pdf"
    category: int | None = None
    lo: int | None = None
    hi: int | None = None
    released_total: int | None = None

    def __post_init__(self):
        if self.kind not in QUERY_KINDS:
            raise ValueError(f"unknown query kind {self.kind!r}")
        if self.kind == "point" and self.category is None:
            raise ValueError("point queries need a category")
        if self.kind in ("range", "sum") and (self.lo is None or self.hi is None):
            raise ValueError(f"{self.kind} queries need lo and hi")

    def label(self) -> str:
        if self.kind == "point":
            return f"point:{self.category}"
        if self.kind in ("range", "sum"):
            return f"{self.kind}:{self.lo}-{self.hi}"
        return self.kind


def eval_query(q: Query, pdf: ProbabilityVector) -> float:
    """Answer a scalar query on a released PDF."""
    probs = pdf.probs
    k = probs.size
    if q.kind == "point":
        return float(probs[q.category])
    if q.kind == "range":
        _check_range(q, k)
        return float(probs[q.lo : q.hi + 1].sum())
    if q.kind == "sum":
        _check_range(q, k)
        if q.released_total is None:
            raise MissingTotalError("sum queries need a public released_total")
        return float(q.released_total * probs[q.lo : q.hi + 1].sum())
    if q.kind == "mean":
        return float(np.arange(k) @ probs)
    if q.kind == "median":
        return float(int(np.argmax(np.cumsum(probs) >= 0.5)))
    raise ValueError(f"query kind {q.kind!r} has no scalar evaluation")


def _check_range(q: Query, k: int) -> None:
    if not (0 <= q.lo <= q.hi < k):
        raise ValueError(f"range [{q.lo}, {q.hi}] outside domain of size {k}")


def query_error(q: Query, truth: ProbabilityVector, candidate: ProbabilityVector) -> float:
    """Absolute answer gap, normalized so every kind lands in [0, 2]."""
    if q.kind == "pdf":
        return l1_distance(truth, candidate)
    gap = abs(eval_query(q, truth) - eval_query(q, candidate))
    k = truth.domain_size
    if q.kind in ("mean", "median"):
        return gap / max(k - 1, 1)
    if q.kind == "sum":
        return gap / q.released_total
    return gap


@dataclass(frozen=True)
class AnomalyReport:
    """Categories whose rarity score exceeds the chosen quantile."""

    flagged: frozenset[int]
    scores: np.ndarray = field(repr=False)
    threshold: float


def hbos_detect(
    pdf: ProbabilityVector,
    threshold_quantile: float = 0.95,
    smoothing: float = 1e-6,
) -> AnomalyReport:
    """Histogram-based outlier scores: rarity as negative log density."""
    if not 0.0 < threshold_quantile < 1.0:
        raise ValueError("threshold_quantile must lie in (0, 1)")
    scores = -np.log(pdf.probs + smoothing)
    threshold = float(np.quantile(scores, threshold_quantile))
    flagged = frozenset(int(i) for i in np.nonzero(scores > threshold)[0])
    return AnomalyReport(flagged=flagged, scores=scores, threshold=threshold)


def precision_recall(predicted: set, truth: set) -> tuple[float, float]:
    """Against a non-private oracle; empty sets count as perfect."""
    predicted = set(predicted)
    truth = set(truth)
    hits = len(predicted & truth)
    precision = hits / len(predicted) if predicted else 1.0
    recall = hits / len(truth) if truth else 1.0
    return precision, recall


def moving_average(series, window: int) -> np.ndarray:
    """Trailing mean with a shrinking head window."""
    if window < 1:
        raise ValueError("window must be >= 1")
    x = np.asarray(series, dtype=np.float64)
    if x.size == 0:
        return x
    csum = np.concatenate(([0.0], np.cumsum(x)))
    idx = np.arange(1, x.size + 1)
    start = np.maximum(idx - window, 0)
    return (csum[idx] - csum[start]) / (idx - start)


def parse_query(spec: str) -> Query:
    """Parse a CLI query spec: pdf | mean | median | point:C | range:LO-HI | sum:LO-HI:TOTAL."""
    parts = spec.strip().split(":")
    kind = parts[0]
    if kind in ("pdf", "mean", "median"):
        return Query(kind=kind)
    if kind == "point":
        return Query(kind="point", category=int(parts[1]))
    if kind == "range":
        lo, hi = parts[1].split("-")
        return Query(kind="range", lo=int(lo), hi=int(hi))
    if kind == "sum":
        lo, hi = parts[1].split("-")
        return Query(kind="sum", lo=int(lo), hi=int(hi), released_total=int(parts[2]))
    raise ValueError(f"cannot parse query spec {spec!r}")
