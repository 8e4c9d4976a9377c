"""Differentially private distribution release over unbounded data streams."""

from .boosting import BoostConfig, DpiState, QueryPool, StepResult, dpi_step, score
from .budget import (
    BudgetState,
    DecaySeriesConfig,
    EtaPair,
    RangeBudgetQueues,
    budget_series,
    eta_from_slot_budget,
    optimal_eta,
    optimal_eta_schedule,
    rba_range_sample,
    rba_sample,
    slot_cost,
)
from .distributions import (
    SENSITIVITY_L1,
    CountVector,
    ProbabilityVector,
    SensitivityBound,
    kl_divergence,
    l1_distance,
    mse,
    normalize,
    quantize,
)
from .estimator import PrivateStreamReleaser, check_count_matrix
from .ledger import PrivacyLedger, SeriesBounds, theoretical_bounds, utility_loss_bound
from .pool import (
    PoolWeights,
    Synopsis,
    SynopsisPool,
    empirical_pool_entropy,
    entropy_approximation,
    enumerate_full_pool,
    generate_pool,
    load_pool,
    sample_synopses,
    save_pool,
)
from .queries import (
    AnomalyReport,
    Query,
    eval_query,
    hbos_detect,
    moving_average,
    parse_query,
    precision_recall,
    query_error,
)
from .special import li2, li2_inv
from .stream import (
    RunConfig,
    RunReport,
    StreamSlot,
    gen_synthetic,
    parse_stream,
    run_pipeline,
    write_stream,
)

__version__ = "0.1.0"

__all__ = [
    "AnomalyReport",
    "BoostConfig",
    "BudgetState",
    "CountVector",
    "DecaySeriesConfig",
    "DpiState",
    "EtaPair",
    "PoolWeights",
    "PrivacyLedger",
    "PrivateStreamReleaser",
    "ProbabilityVector",
    "Query",
    "QueryPool",
    "RangeBudgetQueues",
    "RunConfig",
    "RunReport",
    "SENSITIVITY_L1",
    "SensitivityBound",
    "SeriesBounds",
    "StepResult",
    "StreamSlot",
    "Synopsis",
    "SynopsisPool",
    "budget_series",
    "check_count_matrix",
    "dpi_step",
    "empirical_pool_entropy",
    "entropy_approximation",
    "enumerate_full_pool",
    "eta_from_slot_budget",
    "eval_query",
    "gen_synthetic",
    "generate_pool",
    "hbos_detect",
    "kl_divergence",
    "l1_distance",
    "li2",
    "li2_inv",
    "load_pool",
    "moving_average",
    "mse",
    "normalize",
    "optimal_eta",
    "optimal_eta_schedule",
    "parse_query",
    "parse_stream",
    "precision_recall",
    "quantize",
    "query_error",
    "rba_range_sample",
    "rba_sample",
    "run_pipeline",
    "sample_synopses",
    "save_pool",
    "score",
    "slot_cost",
    "theoretical_bounds",
    "utility_loss_bound",
    "write_stream",
]
