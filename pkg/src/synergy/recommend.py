"""Draft-pick recommendations from pair-synergy and counter matrices.

For each available candidate the score is a weighted blend of how well it
pairs with the allies already chosen and how well it does against the
enemy picks.  Pairs with no data contribute zero and mark the candidate
low-confidence — a draft tool has to return something for every pick.
"""
from __future__ import annotations

from dataclasses import dataclass

from .core import ElementId
from .empirical import CounterMatrix, PairSynergyMatrix
from .errors import (
    EmptyPool,
    InvalidDraftState,
    InvalidValue,
    MatrixLogMismatch,
    UnavailableCandidate,
)

MAX_ALLIES = 4
MAX_ENEMIES = 5


@dataclass(frozen=True)
class DraftState:
    """One player's view of a draft in progress.

    ``unavailable`` always includes every pick from both teams; the
    constructor normalizes that so the invariant cannot be violated.
    """

    allies: tuple[ElementId, ...]
    enemies: tuple[ElementId, ...]
    pool: tuple[ElementId, ...]
    unavailable: frozenset[ElementId] = frozenset()

    def __post_init__(self) -> None:
        if len(self.allies) > MAX_ALLIES:
            raise InvalidDraftState(f"at most {MAX_ALLIES} allies, got {len(self.allies)}")
        if len(self.enemies) > MAX_ENEMIES:
            raise InvalidDraftState(f"at most {MAX_ENEMIES} enemies, got {len(self.enemies)}")
        if len(set(self.allies)) != len(self.allies):
            raise InvalidDraftState("duplicate ally")
        if len(set(self.enemies)) != len(self.enemies):
            raise InvalidDraftState("duplicate enemy")
        if set(self.allies) & set(self.enemies):
            raise InvalidDraftState("allies and enemies must be disjoint")
        object.__setattr__(
            self,
            "unavailable",
            frozenset(self.unavailable) | set(self.allies) | set(self.enemies),
        )

    def available(self) -> list[ElementId]:
        return sorted(set(self.pool) - self.unavailable)


@dataclass(frozen=True)
class Weights:
    ally_weight: float = 1.0
    counter_weight: float = 0.5

    def __post_init__(self) -> None:
        if self.ally_weight < 0 or self.counter_weight < 0:
            raise InvalidValue("weights must be non-negative")
        if self.ally_weight == 0 and self.counter_weight == 0:
            raise InvalidValue("weights must not both be zero")


@dataclass(frozen=True)
class Recommendation:
    candidate: ElementId
    total_score: float
    ally_component: float
    counter_component: float
    low_confidence: bool


@dataclass(frozen=True)
class Contribution:
    """One ally or enemy's share of a candidate's score.

    ``known`` is False when the pair never co-occurred (or never opposed),
    in which case the value is 0 by convention.
    """

    other: ElementId
    value: float
    known: bool
    sufficient_games: bool


@dataclass(frozen=True)
class WhatIfProjection:
    recommendation: Recommendation
    ally_contributions: tuple[Contribution, ...]
    enemy_contributions: tuple[Contribution, ...]
    projected_allies: tuple[ElementId, ...]


def _check_same_log(matrix: PairSynergyMatrix, counters: CounterMatrix) -> None:
    if matrix.source_digest != counters.source_digest:
        raise MatrixLogMismatch(
            "pair matrix and counter matrix were built from different logs"
        )


def _contributions(
    matrix: PairSynergyMatrix,
    counters: CounterMatrix,
    candidate: ElementId,
    state: DraftState,
) -> tuple[tuple[Contribution, ...], tuple[Contribution, ...]]:
    allies = []
    for a in state.allies:
        entry = matrix.get(candidate, a)
        if entry is None:
            allies.append(Contribution(a, 0.0, known=False, sufficient_games=False))
        else:
            allies.append(
                Contribution(a, entry.score.synergy, True, entry.sufficient_games)
            )
    enemies = []
    for e in state.enemies:
        entry = counters.get(candidate, e)
        if entry is None:
            enemies.append(Contribution(e, 0.0, known=False, sufficient_games=False))
        else:
            enemies.append(Contribution(e, entry.score, True, entry.sufficient_games))
    return tuple(allies), tuple(enemies)


def _score(
    candidate: ElementId,
    ally_parts: tuple[Contribution, ...],
    enemy_parts: tuple[Contribution, ...],
    weights: Weights,
) -> Recommendation:
    # mean, not sum, so drafts of different lengths stay comparable
    ally = sum(c.value for c in ally_parts) / len(ally_parts) if ally_parts else 0.0
    counter = sum(c.value for c in enemy_parts) / len(enemy_parts) if enemy_parts else 0.0
    low = any(not c.known or not c.sufficient_games for c in ally_parts + enemy_parts)
    return Recommendation(
        candidate=candidate,
        total_score=weights.ally_weight * ally + weights.counter_weight * counter,
        ally_component=ally,
        counter_component=counter,
        low_confidence=low,
    )


def recommend(
    matrix: PairSynergyMatrix,
    counters: CounterMatrix,
    state: DraftState,
    k: int | None = None,
    weights: Weights = Weights(),
) -> list[Recommendation]:
    """Rank the available candidates for the next pick.

    Candidates are scored against the current allies and enemies, sorted by
    total score descending with ties broken by id, and truncated to ``k``
    when given.
    """
    _check_same_log(matrix, counters)
    if k is not None and k < 1:
        raise ValueError("k must be >= 1")
    available = state.available()
    if not available:
        raise EmptyPool("no available candidates to recommend")
    out = []
    for c in available:
        ally_parts, enemy_parts = _contributions(matrix, counters, c, state)
        out.append(_score(c, ally_parts, enemy_parts, weights))
    out.sort(key=lambda r: (-r.total_score, r.candidate))
    return out[:k] if k is not None else out


def what_if(
    matrix: PairSynergyMatrix,
    counters: CounterMatrix,
    state: DraftState,
    candidate: ElementId,
    weights: Weights = Weights(),
) -> WhatIfProjection:
    """Score one hypothetical pick, with per-ally/per-enemy breakdown.

    The embedded recommendation is exactly what :func:`recommend` would
    produce for the same candidate.
    """
    _check_same_log(matrix, counters)
    if candidate not in state.pool or candidate in state.unavailable:
        raise UnavailableCandidate(f"{candidate!r} is not an available pick")
    ally_parts, enemy_parts = _contributions(matrix, counters, candidate, state)
    return WhatIfProjection(
        recommendation=_score(candidate, ally_parts, enemy_parts, weights),
        ally_contributions=ally_parts,
        enemy_contributions=enemy_parts,
        projected_allies=tuple(state.allies) + (candidate,),
    )
