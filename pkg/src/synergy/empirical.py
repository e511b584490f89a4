"""Value functions estimated from observed match data.

Everything here reduces to counting: solo and joint win rates with Wilson
score intervals, pair-synergy matrices (win rate together vs. mean of solo
rates), counter scores (win rate against a specific opponent vs. overall),
and piece-usage-sequence win rates where the "elements" are move bigrams.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import IO, Mapping, Union

from .core import (
    BaselineCombiner,
    ElementId,
    SynergyScore,
    SynergySet,
    Value,
    ValueFunction,
    ValueScale,
    compute_synergy,
)
from .errors import (
    CardinalityError,
    EmptyLog,
    EvaluationGap,
    MalformedStream,
    NeverCoOccurred,
    NeverOpposed,
    NoMoveLog,
    NoSequencedRecords,
    TooManyRejects,
    UnknownElement,
)

DEFAULT_Z = 1.96  # 95% confidence
DEFAULT_MIN_GAMES = 30
REJECT_FRACTION = 0.10


@dataclass(frozen=True)
class MatchRecord:
    """One match: two rosters, a winner, and optionally a move log.

    ``move_log`` entries are (side, piece_class) in play order.
    """

    match_id: str
    sides: tuple[tuple[ElementId, ...], tuple[ElementId, ...]]
    winner: int
    move_log: tuple[tuple[int, str], ...] | None = None

    def __post_init__(self) -> None:
        if not self.match_id:
            raise ValueError("match_id must be non-empty")
        if len(self.sides) != 2:
            raise ValueError("a match has exactly two sides")
        if any(not roster for roster in self.sides):
            raise ValueError("rosters must be non-empty")
        if self.winner not in (0, 1):
            raise ValueError("winner out of range")
        if set(self.sides[0]) & set(self.sides[1]):
            raise ValueError("element on both sides")
        if self.move_log is not None:
            for side, piece in self.move_log:
                if side not in (0, 1) or not piece:
                    raise ValueError("malformed move entry")

    def roster(self, side: int) -> frozenset[ElementId]:
        return frozenset(self.sides[side])


@dataclass(frozen=True)
class MatchLog:
    """An immutable collection of matches with a derived element pool."""

    records: tuple[MatchRecord, ...]

    def __post_init__(self) -> None:
        ids = [r.match_id for r in self.records]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate match_id")

    def __len__(self) -> int:
        return len(self.records)

    @cached_property
    def pool(self) -> frozenset[ElementId]:
        seen: set[ElementId] = set()
        for r in self.records:
            seen.update(r.sides[0])
            seen.update(r.sides[1])
        return frozenset(seen)

    @cached_property
    def appearances(self) -> Mapping[ElementId, tuple[tuple[int, int], ...]]:
        """element -> ((record index, side), ...) everywhere it played."""
        index: dict[ElementId, list[tuple[int, int]]] = {}
        for i, r in enumerate(self.records):
            for side in (0, 1):
                for e in r.roster(side):
                    index.setdefault(e, []).append((i, side))
        return {e: tuple(v) for e, v in index.items()}

    @cached_property
    def digest(self) -> str:
        """Content hash used to tie derived matrices back to their source."""
        h = hashlib.sha256()
        for r in self.records:
            h.update(
                json.dumps(
                    [r.match_id, [list(r.sides[0]), list(r.sides[1])], r.winner,
                     [list(m) for m in r.move_log] if r.move_log is not None else None],
                    separators=(",", ":"),
                ).encode()
            )
        return h.hexdigest()


@dataclass(frozen=True)
class RejectedLine:
    line_no: int
    reason: str


@dataclass(frozen=True)
class IngestResult:
    log: MatchLog
    rejects: tuple[RejectedLine, ...]
    total_lines: int


def _parse_record(obj: object) -> MatchRecord:
    if not isinstance(obj, dict):
        raise ValueError("record must be an object")
    for key in ("match_id", "sides", "winner"):
        if key not in obj:
            raise ValueError(f"missing field: {key}")
    match_id = obj["match_id"]
    if not isinstance(match_id, str):
        raise ValueError("match_id must be a string")
    sides = obj["sides"]
    if (
        not isinstance(sides, list)
        or len(sides) != 2
        or any(not isinstance(s, list) for s in sides)
        or any(not isinstance(e, str) for s in sides for e in s)
    ):
        raise ValueError("sides must be a pair of rosters")
    winner = obj["winner"]
    if not isinstance(winner, int) or isinstance(winner, bool) or winner not in (0, 1):
        raise ValueError("winner out of range")
    move_log = None
    if obj.get("moves") is not None:
        moves = obj["moves"]
        if not isinstance(moves, list) or any(
            not isinstance(m, list) or len(m) != 2 or not isinstance(m[1], str)
            for m in moves
        ):
            raise ValueError("malformed move entry")
        move_log = tuple((m[0], m[1]) for m in moves)
    return MatchRecord(
        match_id=match_id,
        sides=(tuple(sides[0]), tuple(sides[1])),
        winner=winner,
        move_log=move_log,
    )


def ingest_match_log(source: Union[bytes, str, IO[bytes], IO[str]]) -> IngestResult:
    """Load a JSONL match log, collecting per-line rejects.

    Invalid lines are reported with 1-based line numbers; if more than 10%
    of non-blank lines are invalid the whole log is rejected with
    TooManyRejects (the rejects ride on the exception).  Unknown JSON
    fields are ignored.
    """
    if isinstance(source, bytes):
        try:
            text = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedStream(f"not valid UTF-8: {exc}") from exc
    elif isinstance(source, str):
        text = source
    else:
        raw = source.read()
        if isinstance(raw, bytes):
            try:
                text = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise MalformedStream(f"not valid UTF-8: {exc}") from exc
        else:
            text = raw

    records: list[MatchRecord] = []
    rejects: list[RejectedLine] = []
    seen_ids: set[str] = set()
    total = 0
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        total += 1
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            rejects.append(RejectedLine(line_no, "invalid json"))
            continue
        try:
            record = _parse_record(obj)
        except ValueError as exc:
            rejects.append(RejectedLine(line_no, str(exc)))
            continue
        if record.match_id in seen_ids:
            rejects.append(RejectedLine(line_no, "duplicate match_id"))
            continue
        seen_ids.add(record.match_id)
        records.append(record)

    if total and len(rejects) > REJECT_FRACTION * total:
        exc = TooManyRejects(
            f"{len(rejects)} of {total} lines invalid (> {REJECT_FRACTION:.0%})"
        )
        exc.rejects = tuple(rejects)
        raise exc
    return IngestResult(log=MatchLog(tuple(records)), rejects=tuple(rejects), total_lines=total)


@dataclass(frozen=True)
class WinRateEstimate:
    """A win count with its Wilson score interval."""

    wins: int
    games: int
    rate: float
    ci_low: float
    ci_high: float

    @classmethod
    def from_counts(cls, wins: int, games: int, z: float = DEFAULT_Z) -> "WinRateEstimate":
        if games < 1:
            raise ValueError("games must be >= 1")
        if not 0 <= wins <= games:
            raise ValueError("wins must be within [0, games]")
        p = wins / games
        zz = z * z
        denom = 1.0 + zz / games
        center = (p + zz / (2 * games)) / denom
        half = (z / denom) * math.sqrt(p * (1 - p) / games + zz / (4 * games * games))
        # at the extremes the bound touching the estimate is exactly 0 or 1
        # algebraically; spelling that out keeps rounding from leaving the
        # point estimate outside its own interval
        low = 0.0 if wins == 0 else max(0.0, center - half)
        high = 1.0 if wins == games else min(1.0, center + half)
        return cls(wins=wins, games=games, rate=p, ci_low=low, ci_high=high)


def solo_win_rate(log: MatchLog, e: ElementId, z: float = DEFAULT_Z) -> WinRateEstimate:
    """Win rate of every side the element played on."""
    played = log.appearances.get(e)
    if not played:
        raise UnknownElement(f"{e!r} never appears in the log")
    wins = sum(1 for i, side in played if log.records[i].winner == side)
    return WinRateEstimate.from_counts(wins, len(played), z)


def joint_win_rate(log: MatchLog, s: SynergySet, z: float = DEFAULT_Z) -> WinRateEstimate:
    """Win rate of sides containing every element of the set.

    Multiplicity is ignored; rosters are sets.  Side disjointness means at
    most one side per match can qualify.
    """
    if s.cardinality < 2:
        raise CardinalityError("joint win rate needs a set of size >= 2")
    ids = set(s.ids)
    first = min(ids)
    wins = games = 0
    for i, side in log.appearances.get(first, ()):
        if ids <= log.records[i].roster(side):
            games += 1
            wins += log.records[i].winner == side
    if games == 0:
        raise NeverCoOccurred(f"{sorted(ids)} never shared a side")
    return WinRateEstimate.from_counts(wins, games, z)


class WinRateValueFunction(ValueFunction):
    """Numeric value function backed by a match log.

    Singletons evaluate to the solo win rate, larger sets to the joint win
    rate.  Sets that never co-occurred raise EvaluationGap; ``estimate``
    exposes the counts so callers can flag thin samples.
    """

    def __init__(self, log: MatchLog, min_games: int = DEFAULT_MIN_GAMES, z: float = DEFAULT_Z):
        if not log.records:
            raise EmptyLog("cannot build a value function from an empty log")
        super().__init__(ValueScale.numeric(), log.pool)
        self.log = log
        self.min_games = min_games
        self.z = z

    def estimate(self, s: SynergySet) -> WinRateEstimate:
        try:
            if s.cardinality == 1:
                return solo_win_rate(self.log, s.ids[0], self.z)
            return joint_win_rate(self.log, s, self.z)
        except (NeverCoOccurred, UnknownElement) as exc:
            raise EvaluationGap(str(exc)) from exc

    def sufficient(self, s: SynergySet) -> bool:
        return self.estimate(s).games >= self.min_games

    def evaluate(self, s: SynergySet) -> Value:
        return Value.of_numeric(self.estimate(s).rate)


def winrate_value_function(
    log: MatchLog, min_games: int = DEFAULT_MIN_GAMES, z: float = DEFAULT_Z
) -> WinRateValueFunction:
    return WinRateValueFunction(log, min_games, z)


@dataclass(frozen=True)
class PairEntry:
    """Matrix cell: the pair's synergy score plus the evidence behind it."""

    pair: tuple[ElementId, ElementId]
    score: SynergyScore
    joint: WinRateEstimate
    sufficient_games: bool


@dataclass(frozen=True)
class PairSynergyMatrix:
    """Synergy for every pair that ever shared a side, stored once per
    canonical (sorted) pair."""

    baseline: BaselineCombiner
    min_games: int
    entries: tuple[PairEntry, ...]
    pool: tuple[ElementId, ...]
    source_digest: str

    @cached_property
    def _by_pair(self) -> Mapping[tuple[ElementId, ElementId], PairEntry]:
        return {e.pair: e for e in self.entries}

    def get(self, a: ElementId, b: ElementId) -> PairEntry | None:
        return self._by_pair.get((min(a, b), max(a, b)))


def pair_synergy_matrix(
    log: MatchLog,
    baseline: BaselineCombiner = BaselineCombiner.MEAN,
    min_games: int = DEFAULT_MIN_GAMES,
    z: float = DEFAULT_Z,
) -> PairSynergyMatrix:
    """Build the pair matrix in one pass over the log."""
    if not log.records:
        raise EmptyLog("empty match log")
    vf = WinRateValueFunction(log, min_games, z)
    tallies: dict[tuple[ElementId, ElementId], list[int]] = {}
    for r in log.records:
        for side in (0, 1):
            roster = sorted(r.roster(side))
            won = r.winner == side
            for i, a in enumerate(roster):
                for b in roster[i + 1:]:
                    t = tallies.setdefault((a, b), [0, 0])
                    t[0] += won
                    t[1] += 1
    entries = []
    for (a, b), (wins, games) in sorted(tallies.items()):
        joint = WinRateEstimate.from_counts(wins, games, z)
        score = compute_synergy(SynergySet.of(a, b), vf, baseline)
        entries.append(
            PairEntry(
                pair=(a, b),
                score=score,
                joint=joint,
                sufficient_games=games >= min_games,
            )
        )
    return PairSynergyMatrix(
        baseline=baseline,
        min_games=min_games,
        entries=tuple(entries),
        pool=tuple(sorted(log.pool)),
        source_digest=log.digest,
    )


@dataclass(frozen=True)
class CounterScore:
    """How much worse (negative) or better ``a`` does when ``b`` opposes."""

    a: ElementId
    b: ElementId
    score: float
    overall: WinRateEstimate
    versus: WinRateEstimate
    sufficient_games: bool


def counter_score(
    log: MatchLog,
    a: ElementId,
    b: ElementId,
    min_games: int = DEFAULT_MIN_GAMES,
    z: float = DEFAULT_Z,
) -> CounterScore:
    """winrate(a with b opposing) minus winrate(a overall)."""
    overall = solo_win_rate(log, a, z)
    if b not in log.pool:
        raise UnknownElement(f"{b!r} never appears in the log")
    wins = games = 0
    for i, side in log.appearances[a]:
        r = log.records[i]
        if b in r.roster(1 - side):
            games += 1
            wins += r.winner == side
    if games == 0:
        raise NeverOpposed(f"{a!r} and {b!r} never met as opponents")
    versus = WinRateEstimate.from_counts(wins, games, z)
    return CounterScore(
        a=a,
        b=b,
        score=versus.rate - overall.rate,
        overall=overall,
        versus=versus,
        sufficient_games=games >= min_games,
    )


@dataclass(frozen=True)
class CounterMatrix:
    """Counter scores per ordered pair; (a,b) and (b,a) are independent."""

    min_games: int
    entries: tuple[CounterScore, ...]
    pool: tuple[ElementId, ...]
    source_digest: str

    @cached_property
    def _by_pair(self) -> Mapping[tuple[ElementId, ElementId], CounterScore]:
        return {(e.a, e.b): e for e in self.entries}

    def get(self, a: ElementId, b: ElementId) -> CounterScore | None:
        return self._by_pair.get((a, b))


def counter_matrix(
    log: MatchLog, min_games: int = DEFAULT_MIN_GAMES, z: float = DEFAULT_Z
) -> CounterMatrix:
    if not log.records:
        raise EmptyLog("empty match log")
    tallies: dict[tuple[ElementId, ElementId], list[int]] = {}
    for r in log.records:
        r0, r1 = r.roster(0), r.roster(1)
        for a in r0:
            for b in r1:
                ta = tallies.setdefault((a, b), [0, 0])
                ta[0] += r.winner == 0
                ta[1] += 1
                tb = tallies.setdefault((b, a), [0, 0])
                tb[0] += r.winner == 1
                tb[1] += 1
    overall = {e: solo_win_rate(log, e, z) for e in sorted(log.pool)}
    entries = []
    for (a, b), (wins, games) in sorted(tallies.items()):
        versus = WinRateEstimate.from_counts(wins, games, z)
        entries.append(
            CounterScore(
                a=a,
                b=b,
                score=versus.rate - overall[a].rate,
                overall=overall[a],
                versus=versus,
                sufficient_games=games >= min_games,
            )
        )
    return CounterMatrix(
        min_games=min_games,
        entries=tuple(entries),
        pool=tuple(sorted(log.pool)),
        source_digest=log.digest,
    )


SEQ_PREFIX = "seq:"


def _side_sequence(record: MatchRecord, side: int, skip_moves: int = 0) -> list[str]:
    if record.move_log is None:
        raise NoMoveLog(f"match {record.match_id} has no move log")
    moves = [piece for s, piece in record.move_log if s == side]
    return moves[skip_moves:]


def extract_sequence_elements(
    record: MatchRecord, side: int, skip_moves: int = 0
) -> list[ElementId]:
    """Bigram elements for one side, e.g. moves [N,B,N] -> seq:N->B, seq:B->N.

    ``skip_moves`` drops that side's first moves before forming bigrams, for
    callers who want opening moves excluded.
    """
    moves = _side_sequence(record, side, skip_moves)
    return [f"{SEQ_PREFIX}{x}->{y}" for x, y in zip(moves, moves[1:])]


def sequence_win_rates(
    log: MatchLog, skip_moves: int = 0, z: float = DEFAULT_Z
) -> dict[ElementId, WinRateEstimate]:
    """Win rate per bigram element over all sides whose log contains it.

    Each side of each match is one observation, so a bigram played by both
    players counts twice (once per side).
    """
    tallies: dict[ElementId, list[int]] = {}
    saw_moves = False
    for r in log.records:
        if r.move_log is None:
            continue
        saw_moves = True
        for side in (0, 1):
            won = r.winner == side
            for bigram in set(extract_sequence_elements(r, side, skip_moves)):
                t = tallies.setdefault(bigram, [0, 0])
                t[0] += won
                t[1] += 1
    if not saw_moves:
        raise NoSequencedRecords("no record carries a move log")
    return {
        bigram: WinRateEstimate.from_counts(wins, games, z)
        for bigram, (wins, games) in sorted(tallies.items())
    }


class SequenceValueFunction(ValueFunction):
    """Value function over bigram elements; sides are the observations.

    Unlike match rosters, both sides of one match can contain the same
    bigram, so evaluation counts (match, side) pairs rather than matches.
    """

    def __init__(self, log: MatchLog, skip_moves: int = 0,
                 min_games: int = DEFAULT_MIN_GAMES, z: float = DEFAULT_Z):
        rates = sequence_win_rates(log, skip_moves, z)
        super().__init__(ValueScale.numeric(), frozenset(rates))
        self.log = log
        self.skip_moves = skip_moves
        self.min_games = min_games
        self.z = z
        self._solo = rates
        # per (record, side): the distinct bigrams played
        self._sides: list[tuple[bool, frozenset[ElementId]]] = []
        for r in log.records:
            if r.move_log is None:
                continue
            for side in (0, 1):
                self._sides.append(
                    (r.winner == side,
                     frozenset(extract_sequence_elements(r, side, skip_moves)))
                )

    def estimate(self, s: SynergySet) -> WinRateEstimate:
        if s.cardinality == 1:
            return self._solo[s.ids[0]]
        ids = set(s.ids)
        wins = games = 0
        for won, played in self._sides:
            if ids <= played:
                games += 1
                wins += won
        if games == 0:
            raise EvaluationGap(f"bigrams {sorted(ids)} never played by one side")
        return WinRateEstimate.from_counts(wins, games, self.z)

    def sufficient(self, s: SynergySet) -> bool:
        return self.estimate(s).games >= self.min_games

    def evaluate(self, s: SynergySet) -> Value:
        return Value.of_numeric(self.estimate(s).rate)


def sequence_value_function(
    log: MatchLog, skip_moves: int = 0, min_games: int = DEFAULT_MIN_GAMES,
    z: float = DEFAULT_Z,
) -> SequenceValueFunction:
    return SequenceValueFunction(log, skip_moves, min_games, z)
