"""Synergy analysis for games: when a set of elements is worth more together.

The core measure is the difference between a set's value and the combined
value of its elements evaluated alone.  Submodules: ``core`` (sets, scales,
baselines), ``search`` (counting, enumeration, sampling, top-k, outliers),
``empirical`` (win rates from match logs), ``tcg`` (card-combo evaluation),
``recommend`` (draft picks), plus the CLI/HTTP app layer.
"""

from .core import (
    AdditiveValueFunction,
    BaselineCombiner,
    CallableValueFunction,
    ElementId,
    ScaleKind,
    SynergyScore,
    SynergySet,
    Value,
    ValueFunction,
    ValueScale,
    batch_synergy,
    compute_synergy,
    ordinal_rank,
    rank_sets,
)
from .search import (
    CandidateSpace,
    Exhaustive,
    OutlierReport,
    TopKResult,
    UniformSample,
    count_sets,
    detect_outliers,
    enumerate_sets,
    rank_set,
    sample_sets,
    top_k_synergy,
    unrank_set,
)
from .empirical import (
    CounterMatrix,
    MatchLog,
    MatchRecord,
    PairSynergyMatrix,
    WinRateEstimate,
    counter_matrix,
    counter_score,
    extract_sequence_elements,
    ingest_match_log,
    joint_win_rate,
    pair_synergy_matrix,
    sequence_value_function,
    sequence_win_rates,
    solo_win_rate,
    winrate_value_function,
)
from .tcg import (
    BoardState,
    Card,
    CardPool,
    ComboEvaluation,
    FlatBuff,
    KeywordGrant,
    StateModifier,
    ThresholdBuff,
    card_set_to_dict,
    card_strength,
    combo_synergy,
    evaluate_combo,
    load_card_set,
    rebalance_iterate,
    scan_new_set,
    scan_pool,
)
from .recommend import (
    DraftState,
    Recommendation,
    Weights,
    WhatIfProjection,
    recommend,
    what_if,
)
from .service import SnapshotStore, create_app, serve_app
from .snapshot import (
    AnalysisSnapshot,
    RunConfig,
    build_snapshot,
    canonical_json,
    counters_to_csv,
    load_snapshot,
    matrix_to_csv,
    save_snapshot,
    snapshot_from_bytes,
    snapshot_to_bytes,
)

__version__ = "0.1.0"

__all__ = [
    "AdditiveValueFunction",
    "AnalysisSnapshot",
    "BaselineCombiner",
    "BoardState",
    "CallableValueFunction",
    "CandidateSpace",
    "Card",
    "CardPool",
    "ComboEvaluation",
    "CounterMatrix",
    "DraftState",
    "ElementId",
    "Exhaustive",
    "FlatBuff",
    "KeywordGrant",
    "MatchLog",
    "MatchRecord",
    "OutlierReport",
    "PairSynergyMatrix",
    "Recommendation",
    "RunConfig",
    "ScaleKind",
    "SnapshotStore",
    "StateModifier",
    "SynergyScore",
    "SynergySet",
    "ThresholdBuff",
    "TopKResult",
    "UniformSample",
    "Value",
    "ValueFunction",
    "ValueScale",
    "Weights",
    "WhatIfProjection",
    "WinRateEstimate",
    "batch_synergy",
    "build_snapshot",
    "canonical_json",
    "card_set_to_dict",
    "card_strength",
    "combo_synergy",
    "compute_synergy",
    "count_sets",
    "counter_matrix",
    "counter_score",
    "counters_to_csv",
    "create_app",
    "detect_outliers",
    "enumerate_sets",
    "evaluate_combo",
    "extract_sequence_elements",
    "ingest_match_log",
    "joint_win_rate",
    "load_card_set",
    "load_snapshot",
    "matrix_to_csv",
    "ordinal_rank",
    "pair_synergy_matrix",
    "rank_set",
    "rank_sets",
    "rebalance_iterate",
    "recommend",
    "sample_sets",
    "save_snapshot",
    "scan_new_set",
    "scan_pool",
    "sequence_value_function",
    "sequence_win_rates",
    "serve_app",
    "snapshot_from_bytes",
    "snapshot_to_bytes",
    "solo_win_rate",
    "top_k_synergy",
    "unrank_set",
    "what_if",
    "winrate_value_function",
]
