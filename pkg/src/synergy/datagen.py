"""Synthetic match generators for calibration and recovery tests."""
from __future__ import annotations

import random
from typing import Sequence

from .core import ElementId
from .empirical import MatchLog, MatchRecord


def planted_pair_log(
    pool: Sequence[ElementId],
    boosted: tuple[ElementId, ElementId],
    boost: float = 0.2,
    matches: int = 5000,
    team_size: int = 3,
    base_rate: float = 0.5,
    seed: int = 0,
) -> MatchLog:
    """Random team-vs-team matches where one pair is secretly better.

    Teams are drawn uniformly without replacement from the pool; a side
    containing both boosted elements gains ``boost`` win probability.  A
    matrix built from the result should recover the planted pair as its
    argmax — that is the whole point of the generator.
    """
    ids = list(pool)
    if len(ids) < 2 * team_size:
        raise ValueError("pool too small for two disjoint teams")
    a, b = boosted
    if a not in ids or b not in ids:
        raise ValueError("boosted pair must come from the pool")
    rng = random.Random(seed)
    records = []
    for i in range(matches):
        drawn = rng.sample(ids, 2 * team_size)
        side0, side1 = drawn[:team_size], drawn[team_size:]
        p = base_rate
        if a in side0 and b in side0:
            p += boost
        if a in side1 and b in side1:
            p -= boost
        p = min(1.0, max(0.0, p))
        winner = 0 if rng.random() < p else 1
        records.append(
            MatchRecord(
                match_id=f"m{i:05d}",
                sides=(tuple(side0), tuple(side1)),
                winner=winner,
            )
        )
    return MatchLog(tuple(records))
