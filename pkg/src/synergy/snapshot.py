"""Versioned analysis snapshots and canonical report serialization.

A snapshot bundles everything the read-only service needs: the pair and
counter matrices, the pool, the source digest, and the RunConfig that
produced them.  Serialization is canonical JSON (sorted keys, fixed
separators) so identical inputs and configs yield byte-identical files —
the build timestamp is opt-in (``SYNERGY_BUILD_TIME`` or an explicit
argument) for exactly that reason.
"""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass
from typing import Union

from .core import BaselineCombiner, ElementId, SynergyScore, SynergySet, Value
from .empirical import (
    DEFAULT_MIN_GAMES,
    DEFAULT_Z,
    CounterMatrix,
    CounterScore,
    MatchLog,
    PairEntry,
    PairSynergyMatrix,
    WinRateEstimate,
    counter_matrix,
    pair_synergy_matrix,
)
from .errors import SnapshotLoadError
from .search import METHOD_MADZ
from .tcg import COPY_CAP

FORMAT = "synergy-snapshot"
FORMAT_VERSION = 1

BUILD_TIME_ENV = "SYNERGY_BUILD_TIME"


@dataclass(frozen=True)
class RunConfig:
    """Every knob that affects an analysis run, serialized with each report."""

    baseline: str = BaselineCombiner.MEAN.value
    min_games: int = DEFAULT_MIN_GAMES
    z: float = DEFAULT_Z
    outlier_method: str = METHOD_MADZ
    outlier_threshold: float | None = None
    seed: int = 0
    sample_n: int | None = None
    ally_weight: float = 1.0
    counter_weight: float = 0.5
    copy_cap: int = COPY_CAP

    def __post_init__(self) -> None:
        BaselineCombiner(self.baseline)  # raises on unknown kind
        if self.min_games < 1:
            raise ValueError("min_games must be >= 1")
        if self.z <= 0:
            raise ValueError("z must be > 0")
        if self.outlier_method not in ("madz", "iqr"):
            raise ValueError(f"unknown outlier method {self.outlier_method!r}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        return cls(**data)

    @property
    def baseline_kind(self) -> BaselineCombiner:
        return BaselineCombiner(self.baseline)


@dataclass(frozen=True)
class AnalysisSnapshot:
    version: int
    built_at: str
    source_digest: str
    config: RunConfig
    records: int
    matrix: PairSynergyMatrix
    counters: CounterMatrix

    def __post_init__(self) -> None:
        if self.version < 1:
            raise ValueError("snapshot version must be >= 1")

    @property
    def pool(self) -> tuple[ElementId, ...]:
        return self.matrix.pool


def default_built_at() -> str:
    """Timestamp for new snapshots; empty (and deterministic) unless pinned."""
    return os.environ.get(BUILD_TIME_ENV, "")


def build_snapshot(
    log: MatchLog,
    config: RunConfig = RunConfig(),
    version: int = 1,
    built_at: str | None = None,
) -> AnalysisSnapshot:
    return AnalysisSnapshot(
        version=version,
        built_at=default_built_at() if built_at is None else built_at,
        source_digest=log.digest,
        config=config,
        records=len(log),
        matrix=pair_synergy_matrix(
            log, config.baseline_kind, config.min_games, config.z
        ),
        counters=counter_matrix(log, config.min_games, config.z),
    )


def canonical_json(obj: object) -> bytes:
    """Stable JSON bytes: sorted keys, no whitespace drift, one newline."""
    return (json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n").encode()


def estimate_to_dict(est: WinRateEstimate) -> dict:
    return {
        "wins": est.wins,
        "games": est.games,
        "rate": est.rate,
        "ci_low": est.ci_low,
        "ci_high": est.ci_high,
    }


def _estimate_from_dict(data: dict) -> WinRateEstimate:
    return WinRateEstimate(
        wins=data["wins"],
        games=data["games"],
        rate=data["rate"],
        ci_low=data["ci_low"],
        ci_high=data["ci_high"],
    )


def pair_entry_to_dict(entry: PairEntry) -> dict:
    return {
        "pair": list(entry.pair),
        "synergy": entry.score.synergy,
        "set_value": entry.score.set_value.as_real(),
        "baseline_value": entry.score.baseline_value.as_real(),
        "joint": estimate_to_dict(entry.joint),
        "sufficient_games": entry.sufficient_games,
    }


def _pair_entry_from_dict(data: dict, baseline: BaselineCombiner) -> PairEntry:
    a, b = data["pair"]
    score = SynergyScore(
        set=SynergySet.of(a, b),
        set_value=Value.of_numeric(data["set_value"]),
        baseline_value=Value.of_numeric(data["baseline_value"]),
        synergy=data["synergy"],
        baseline_kind=baseline,
    )
    return PairEntry(
        pair=(a, b),
        score=score,
        joint=_estimate_from_dict(data["joint"]),
        sufficient_games=data["sufficient_games"],
    )


def counter_to_dict(entry: CounterScore) -> dict:
    return {
        "a": entry.a,
        "b": entry.b,
        "score": entry.score,
        "overall": estimate_to_dict(entry.overall),
        "versus": estimate_to_dict(entry.versus),
        "sufficient_games": entry.sufficient_games,
    }


def _counter_from_dict(data: dict) -> CounterScore:
    return CounterScore(
        a=data["a"],
        b=data["b"],
        score=data["score"],
        overall=_estimate_from_dict(data["overall"]),
        versus=_estimate_from_dict(data["versus"]),
        sufficient_games=data["sufficient_games"],
    )


def matrix_to_dict(matrix: PairSynergyMatrix) -> dict:
    return {
        "baseline": matrix.baseline.value,
        "min_games": matrix.min_games,
        "pool": list(matrix.pool),
        "source_digest": matrix.source_digest,
        "entries": [pair_entry_to_dict(e) for e in matrix.entries],
    }


def counters_to_dict(counters: CounterMatrix) -> dict:
    return {
        "min_games": counters.min_games,
        "pool": list(counters.pool),
        "source_digest": counters.source_digest,
        "entries": [counter_to_dict(e) for e in counters.entries],
    }


def snapshot_to_bytes(snap: AnalysisSnapshot) -> bytes:
    return canonical_json(
        {
            "format": FORMAT,
            "format_version": FORMAT_VERSION,
            "version": snap.version,
            "built_at": snap.built_at,
            "source_digest": snap.source_digest,
            "config": snap.config.to_dict(),
            "records": snap.records,
            "matrix": matrix_to_dict(snap.matrix),
            "counters": counters_to_dict(snap.counters),
        }
    )


def snapshot_from_bytes(data: Union[bytes, str]) -> AnalysisSnapshot:
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SnapshotLoadError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise SnapshotLoadError("not a synergy snapshot")
    if doc.get("format_version") != FORMAT_VERSION:
        raise SnapshotLoadError(
            f"unsupported snapshot format version {doc.get('format_version')!r}"
        )
    try:
        config = RunConfig.from_dict(doc["config"])
        m = doc["matrix"]
        matrix = PairSynergyMatrix(
            baseline=BaselineCombiner(m["baseline"]),
            min_games=m["min_games"],
            entries=tuple(
                _pair_entry_from_dict(e, BaselineCombiner(m["baseline"]))
                for e in m["entries"]
            ),
            pool=tuple(m["pool"]),
            source_digest=m["source_digest"],
        )
        c = doc["counters"]
        counters = CounterMatrix(
            min_games=c["min_games"],
            entries=tuple(_counter_from_dict(e) for e in c["entries"]),
            pool=tuple(c["pool"]),
            source_digest=c["source_digest"],
        )
        return AnalysisSnapshot(
            version=doc["version"],
            built_at=doc["built_at"],
            source_digest=doc["source_digest"],
            config=config,
            records=doc["records"],
            matrix=matrix,
            counters=counters,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SnapshotLoadError(f"snapshot is malformed: {exc}") from exc


def load_snapshot(path: str) -> AnalysisSnapshot:
    try:
        with open(path, "rb") as fh:
            return snapshot_from_bytes(fh.read())
    except OSError as exc:
        raise SnapshotLoadError(f"cannot read snapshot {path!r}: {exc}") from exc


def save_snapshot(snap: AnalysisSnapshot, path: str) -> None:
    with open(path, "wb") as fh:
        fh.write(snapshot_to_bytes(snap))


def matrix_to_csv(matrix: PairSynergyMatrix) -> str:
    lines = ["a,b,synergy,joint_rate,joint_games,sufficient_games"]
    for e in matrix.entries:
        lines.append(
            f"{e.pair[0]},{e.pair[1]},{e.score.synergy!r},{e.joint.rate!r},"
            f"{e.joint.games},{str(e.sufficient_games).lower()}"
        )
    return "\n".join(lines) + "\n"


def counters_to_csv(counters: CounterMatrix) -> str:
    lines = ["a,b,score,versus_rate,versus_games,sufficient_games"]
    for e in counters.entries:
        lines.append(
            f"{e.a},{e.b},{e.score!r},{e.versus.rate!r},"
            f"{e.versus.games},{str(e.sufficient_games).lower()}"
        )
    return "\n".join(lines) + "\n"
