"""Candidate-set generation and search over large element pools.

A :class:`CandidateSpace` denotes every multiset drawn from a pool with sizes
in ``[size_min, size_max]`` and at most ``copy_cap`` copies per element.
Counting never enumerates: a bounded-multiset recurrence gives exact
arbitrary-precision counts, and the same recurrence drives a rank/unrank
bijection used for exact uniform sampling.

Canonical order everywhere is shortlex: ascending cardinality, then
lexicographic on the sorted, multiplicity-expanded id tuple.
"""
from __future__ import annotations

import heapq
import math
import random
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import islice
from typing import Iterable, Iterator, Sequence, Union

from .core import (
    BaselineCombiner,
    ElementId,
    SynergyScore,
    SynergySet,
    ValueFunction,
    compute_synergy,
)
from .errors import (
    EmptySpace,
    InvalidSpace,
    MixedScales,
    ScaleMismatch,
    TooFewScores,
    UnknownElement,
)

MUST_CONTAIN = "must-contain:"
MUST_CONTAIN_ANY = "must-contain-any:"


@dataclass(frozen=True)
class CandidateSpace:
    """The multisets to analyze: pool, size range, per-element copy cap.

    ``set_filter`` is an optional named predicate:

    - ``"must-contain:<id>"`` keeps sets containing the id;
    - ``"must-contain-any:<id1>,<id2>,..."`` keeps sets containing at least
      one of the listed ids.
    """

    pool: tuple[ElementId, ...]
    size_min: int
    size_max: int
    copy_cap: int = 1
    set_filter: str | None = None

    def __post_init__(self) -> None:
        if not self.pool:
            raise InvalidSpace("pool must be non-empty")
        if any(not isinstance(e, str) or not e for e in self.pool):
            raise InvalidSpace("pool ids must be non-empty strings")
        if len(set(self.pool)) != len(self.pool):
            raise InvalidSpace("pool ids must be unique")
        if not 2 <= self.size_min <= self.size_max:
            raise InvalidSpace(
                f"need 2 <= size_min <= size_max, got [{self.size_min}, {self.size_max}]"
            )
        if self.copy_cap < 1:
            raise InvalidSpace("copy_cap must be >= 1")
        self.required_elements()  # validate the filter eagerly

    @classmethod
    def over(
        cls,
        pool: Sequence[ElementId],
        size_min: int,
        size_max: int,
        copy_cap: int = 1,
        set_filter: str | None = None,
    ) -> "CandidateSpace":
        return cls(tuple(pool), size_min, size_max, copy_cap, set_filter)

    def required_elements(self) -> frozenset[ElementId] | None:
        """Ids of which at least one must appear, or None when unfiltered."""
        if self.set_filter is None:
            return None
        if self.set_filter.startswith(MUST_CONTAIN_ANY):
            ids = [p for p in self.set_filter[len(MUST_CONTAIN_ANY):].split(",") if p]
        elif self.set_filter.startswith(MUST_CONTAIN):
            ids = [self.set_filter[len(MUST_CONTAIN):]]
        else:
            raise InvalidSpace(f"unknown filter predicate: {self.set_filter!r}")
        if not ids or not all(ids):
            raise InvalidSpace("filter lists no element ids")
        missing = sorted(set(ids) - set(self.pool))
        if missing:
            raise InvalidSpace(f"filter ids not in pool: {missing}")
        return frozenset(ids)

    def admits(self, s: SynergySet, ignore_filter: bool = False) -> bool:
        """Whether the set lies in this space."""
        if not self.size_min <= s.cardinality <= self.size_max:
            return False
        pool = set(self.pool)
        if any(e not in pool or c > self.copy_cap for e, c in s.items):
            return False
        if ignore_filter:
            return True
        req = self.required_elements()
        return req is None or any(e in req for e in s.ids)


@dataclass(frozen=True)
class Exhaustive:
    """Visit every set in the space."""


@dataclass(frozen=True)
class UniformSample:
    """Draw ``n`` sets uniformly (with replacement) using ``seed``."""

    n: int
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InvalidSpace("sample count must be >= 1")


SearchStrategy = Union[Exhaustive, UniformSample]


class _SpaceIndex:
    """Counting and rank/unrank tables for one candidate space.

    ``M[m][r]`` counts multisets of size exactly ``r`` over ``m`` cap-bounded
    elements: the coefficient of x^r in ``(1 + x + ... + x^cap)^m``, built
    iteratively with prefix sums.  ``P[i][r]`` is the filtered variant:
    completions from element ``i`` onward that still owe a required element.
    """

    def __init__(self, space: CandidateSpace):
        self.space = space
        self.ids = tuple(sorted(space.pool))
        self.cap = space.copy_cap
        self.required = space.required_elements() or frozenset()
        n, smax, cap = len(self.ids), space.size_max, space.copy_cap

        rows = [[1] + [0] * smax]
        for _ in range(n):
            prev = rows[-1]
            pref = [0]
            for v in prev:
                pref.append(pref[-1] + v)
            rows.append(
                [pref[r + 1] - pref[max(0, r - cap)] for r in range(smax + 1)]
            )
        self._M = rows

        if self.required:
            pend = [[0] * (smax + 1) for _ in range(n + 1)]
            for i in range(n - 1, -1, -1):
                nxt = pend[i + 1]
                if self.ids[i] in self.required:
                    unlocked = self._M[n - i - 1]
                    for r in range(smax + 1):
                        pend[i][r] = nxt[r] + sum(
                            unlocked[r - t] for t in range(1, min(cap, r) + 1)
                        )
                else:
                    pref = [0]
                    for v in nxt:
                        pref.append(pref[-1] + v)
                    pend[i] = [
                        pref[r + 1] - pref[max(0, r - cap)] for r in range(smax + 1)
                    ]
            self._P = pend
        else:
            self._P = None

    def completions(self, i: int, r: int, has_required: bool, filtered: bool) -> int:
        """Admissible completions of size r from element i on.

        ``P`` already counts only completions that pick up a required
        element, so the pending case reads it directly.
        """
        if not filtered or has_required or self._P is None:
            return self._M[len(self.ids) - i][r]
        return self._P[i][r]

    def size_count(self, size: int, filtered: bool) -> int:
        return self.completions(0, size, False, filtered)

    def total(self, filtered: bool) -> int:
        return sum(
            self.size_count(s, filtered)
            for s in range(self.space.size_min, self.space.size_max + 1)
        )

    def unrank(self, index: int, filtered: bool) -> SynergySet:
        if index < 0:
            raise ValueError("rank must be >= 0")
        size = None
        for s in range(self.space.size_min, self.space.size_max + 1):
            c = self.size_count(s, filtered)
            if index < c:
                size = s
                break
            index -= c
        if size is None:
            raise ValueError("rank out of range for this space")
        counts: dict[ElementId, int] = {}
        rem, has = size, False
        for i, eid in enumerate(self.ids):
            if rem == 0:
                break
            for t in range(min(self.cap, rem), -1, -1):
                nhas = has or (t > 0 and eid in self.required)
                c = self.completions(i + 1, rem - t, nhas, filtered)
                if index < c:
                    if t:
                        counts[eid] = t
                    rem -= t
                    has = nhas
                    break
                index -= c
        if rem != 0:
            raise AssertionError("unrank walked past the space")
        return SynergySet.from_counts(counts)

    def rank(self, s: SynergySet, filtered: bool) -> int:
        if not self.space.admits(s, ignore_filter=not filtered):
            raise ValueError(f"set {s} is not in the space")
        size = s.cardinality
        index = sum(
            self.size_count(k, filtered) for k in range(self.space.size_min, size)
        )
        rem, has = size, False
        for i, eid in enumerate(self.ids):
            if rem == 0:
                break
            have = s.count(eid)
            for t in range(min(self.cap, rem), have, -1):
                nhas = has or (t > 0 and eid in self.required)
                index += self.completions(i + 1, rem - t, nhas, filtered)
            has = has or (have > 0 and eid in self.required)
            rem -= have
        return index

    def iter_sets(self, filtered: bool) -> Iterator[SynergySet]:
        req = self.required if filtered else frozenset()
        ids, cap, n = self.ids, self.cap, len(self.ids)

        def gen(j0: int, rem: int, has: bool, acc: list[tuple[ElementId, int]]):
            # pick the next element taking a nonzero count; depth <= set size
            for j in range(j0, n):
                eid = ids[j]
                hasj = has or eid in req
                tail_cap = (n - j - 1) * cap
                for t in range(min(cap, rem), 0, -1):
                    acc.append((eid, t))
                    if t == rem:
                        if hasj or not req:
                            yield SynergySet(tuple(acc))
                    elif rem - t <= tail_cap:
                        yield from gen(j + 1, rem - t, hasj, acc)
                    acc.pop()

        for size in range(self.space.size_min, self.space.size_max + 1):
            yield from gen(0, size, False, [])


def count_sets(space: CandidateSpace) -> int:
    """Exact number of multisets in the space, filter ignored.

    Computed by coefficient extraction from the bounded-multiset recurrence;
    arbitrary precision, never by enumeration.
    """
    return _SpaceIndex(space).total(filtered=False)


def enumerate_sets(space: CandidateSpace) -> Iterator[SynergySet]:
    """Yield every set in the space exactly once, in shortlex order.

    The filter is applied; the unfiltered stream has length
    ``count_sets(space)``.
    """
    return _SpaceIndex(space).iter_sets(filtered=True)


def unrank_set(space: CandidateSpace, index: int) -> SynergySet:
    """The ``index``-th set of the unfiltered space in shortlex order."""
    return _SpaceIndex(space).unrank(index, filtered=False)


def rank_set(space: CandidateSpace, s: SynergySet) -> int:
    """Inverse of :func:`unrank_set`."""
    return _SpaceIndex(space).rank(s, filtered=False)


def sample_sets(space: CandidateSpace, n: int, seed: int) -> list[SynergySet]:
    """Draw ``n`` sets uniformly over the space (filter respected).

    Sampling unranks uniform indices, so it is exactly uniform no matter how
    restrictive the copy caps are, deterministic for a fixed seed, and may
    repeat sets.
    """
    if n < 0:
        raise ValueError("sample count must be >= 0")
    index = _SpaceIndex(space)
    total = index.total(filtered=True)
    if total == 0:
        raise EmptySpace("space admits no sets")
    rng = random.Random(seed)
    return [index.unrank(rng.randrange(total), filtered=True) for _ in range(n)]


@dataclass(frozen=True)
class TopKResult:
    """The best sets found, ranked like :func:`synergy.core.rank_sets`."""

    k: int
    entries: tuple[SynergyScore, ...]
    sets_examined: int
    strategy: SearchStrategy
    exhaustive: bool


def _rank_key(sc: SynergyScore):
    return (-sc.synergy, sc.set.sort_key)


_BLOCK = 4096


def _merge_top(k: int, *groups: Iterable[SynergyScore]) -> list[SynergyScore]:
    pool: list[SynergyScore] = []
    for g in groups:
        pool.extend(g)
    return heapq.nsmallest(k, pool, key=_rank_key)


def top_k_synergy(
    space: CandidateSpace,
    vf: ValueFunction,
    baseline: BaselineCombiner,
    k: int,
    strategy: SearchStrategy = Exhaustive(),
    workers: int = 1,
) -> TopKResult:
    """Find the k highest-synergy sets in the space.

    Exhaustive search scores every admitted set; sampling scores ``n`` draws
    and reports the best among them (``exhaustive`` False).  Work may be
    split across ``workers`` threads; per-block winners are merged with the
    same total order either way, so the result is identical for any worker
    count.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    missing = sorted(set(space.pool) - vf.pool)
    if missing:
        raise UnknownElement(f"value function does not cover: {missing}")
    if not baseline.compatible_with(vf.scale):
        raise ScaleMismatch(
            f"baseline {baseline.value} incompatible with {vf.scale.kind.value} scale"
        )

    if isinstance(strategy, UniformSample):
        drawn = sample_sets(space, strategy.n, strategy.seed)
        candidates: Iterator[SynergySet] = iter(dict.fromkeys(drawn))
        examined = len(drawn)
        exhaustive = False
    else:
        if _SpaceIndex(space).total(filtered=True) == 0:
            raise EmptySpace("space admits no sets")
        candidates = enumerate_sets(space)
        examined = None
        exhaustive = True

    def blocks() -> Iterator[list[SynergySet]]:
        while True:
            block = list(islice(candidates, _BLOCK))
            if not block:
                return
            yield block

    def score_block(block: list[SynergySet]) -> tuple[list[SynergyScore], int]:
        top = _merge_top(k, (compute_synergy(s, vf, baseline) for s in block))
        return top, len(block)

    streamed = 0
    best: list[SynergyScore] = []
    if workers <= 1:
        for block in blocks():
            top, n = score_block(block)
            streamed += n
            best = _merge_top(k, best, top)
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            for top, n in executor.map(score_block, blocks()):
                streamed += n
                best = _merge_top(k, best, top)

    return TopKResult(
        k=k,
        entries=tuple(best),
        sets_examined=examined if examined is not None else streamed,
        strategy=strategy,
        exhaustive=exhaustive,
    )


MAD_CONSISTENCY = 1.4826  # scales MAD to the stdev of a normal
DEFAULT_MADZ_THRESHOLD = 3.5
DEFAULT_IQR_THRESHOLD = 1.5

METHOD_MADZ = "madz"
METHOD_IQR = "iqr"


@dataclass(frozen=True)
class PopulationStats:
    count: int
    median: float
    mad: float | None = None
    q1: float | None = None
    q3: float | None = None


@dataclass(frozen=True)
class OutlierReport:
    """Scores whose synergy deviates far from the population."""

    method: str
    threshold: float
    flagged: tuple[tuple[SynergyScore, float], ...]
    population: PopulationStats


def _quantile(sorted_xs: Sequence[float], q: float) -> float:
    # linear interpolation between order statistics (the common "R-7" rule)
    pos = (len(sorted_xs) - 1) * q
    lo = math.floor(pos)
    hi = math.ceil(pos)
    if lo == hi:
        return sorted_xs[lo]
    return sorted_xs[lo] + (pos - lo) * (sorted_xs[hi] - sorted_xs[lo])


def detect_outliers(
    scores: Sequence[SynergyScore],
    method: str = METHOD_MADZ,
    threshold: float | None = None,
) -> OutlierReport:
    """Flag scores far from the population by a robust dispersion measure.

    ``madz`` flags |x - median| / (1.4826 * MAD) > threshold (default 3.5);
    ``iqr`` flags points beyond [Q1 - t*IQR, Q3 + t*IQR] (default t = 1.5),
    with deviation reported as distance beyond the quartile in IQR units.
    When the dispersion collapses to zero, every score not equal to the
    median is flagged with infinite deviation.
    """
    if method not in (METHOD_MADZ, METHOD_IQR):
        raise ValueError(f"unknown outlier method {method!r}")
    minimum = 2 if method == METHOD_MADZ else 4
    if len(scores) < minimum:
        raise TooFewScores(f"{method} needs at least {minimum} scores, got {len(scores)}")
    scale = scores[0].set_value.scale
    if any(sc.set_value.scale != scale for sc in scores):
        raise MixedScales("outlier detection requires a shared scale")
    if threshold is None:
        threshold = DEFAULT_MADZ_THRESHOLD if method == METHOD_MADZ else DEFAULT_IQR_THRESHOLD

    xs = [sc.synergy for sc in scores]
    med = statistics.median(xs)
    flagged: list[tuple[SynergyScore, float]] = []

    if method == METHOD_MADZ:
        mad = statistics.median(abs(x - med) for x in xs)
        stats = PopulationStats(count=len(xs), median=med, mad=mad)
        for sc in scores:
            if mad == 0.0:
                if sc.synergy != med:
                    flagged.append((sc, math.inf))
            else:
                z = abs(sc.synergy - med) / (MAD_CONSISTENCY * mad)
                if z > threshold:
                    flagged.append((sc, z))
    else:
        ordered = sorted(xs)
        q1 = _quantile(ordered, 0.25)
        q3 = _quantile(ordered, 0.75)
        iqr = q3 - q1
        stats = PopulationStats(count=len(xs), median=med, q1=q1, q3=q3)
        for sc in scores:
            if iqr == 0.0:
                if sc.synergy != med:
                    flagged.append((sc, math.inf))
            else:
                dev = max(q1 - sc.synergy, sc.synergy - q3) / iqr
                if dev > threshold:
                    flagged.append((sc, dev))

    flagged.sort(key=lambda pair: (-pair[1], -abs(pair[0].synergy - med), pair[0].set.sort_key))
    return OutlierReport(
        method=method, threshold=threshold, flagged=tuple(flagged), population=stats
    )
