"""Synergy primitives: element multisets, value scales, baselines and scores.

The synergy of a set is the difference between the value of the set measured
as a whole and a baseline combined from the values of its elements measured
alone.  A positive synergy means the whole is worth more than its parts.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .errors import (
    CardinalityError,
    InvalidValue,
    MixedScales,
    ScaleMismatch,
    UnknownElement,
    UnknownLabel,
)

ElementId = str


@dataclass(frozen=True)
class SynergySet:
    """An immutable multiset of element ids.

    Entries are stored canonically: sorted by id, each with a count >= 1.
    Two sets with the same elements and counts compare and hash equal
    regardless of construction order.
    """

    items: tuple[tuple[ElementId, int], ...]

    def __post_init__(self) -> None:
        if not self.items:
            raise ValueError("SynergySet must contain at least one element")
        prev = None
        for eid, count in self.items:
            if not isinstance(eid, str) or not eid:
                raise ValueError("element ids must be non-empty strings")
            if count < 1:
                raise ValueError(f"count for {eid!r} must be >= 1")
            if prev is not None and eid <= prev:
                raise ValueError("items must be sorted by id without duplicates")
            prev = eid

    @classmethod
    def of(cls, *ids: ElementId) -> "SynergySet":
        """Build from ids, repeats meaning multiplicity: of("a", "a", "b")."""
        counts: dict[ElementId, int] = {}
        for eid in ids:
            counts[eid] = counts.get(eid, 0) + 1
        return cls.from_counts(counts)

    @classmethod
    def from_counts(cls, counts: Mapping[ElementId, int]) -> "SynergySet":
        return cls(tuple(sorted((e, int(c)) for e, c in counts.items())))

    @classmethod
    def single(cls, eid: ElementId) -> "SynergySet":
        return cls(((eid, 1),))

    @property
    def cardinality(self) -> int:
        """Total count, multiplicity included."""
        return sum(c for _, c in self.items)

    @property
    def ids(self) -> tuple[ElementId, ...]:
        """Distinct element ids, sorted."""
        return tuple(e for e, _ in self.items)

    def count(self, eid: ElementId) -> int:
        for e, c in self.items:
            if e == eid:
                return c
        return 0

    def expanded(self) -> tuple[ElementId, ...]:
        """Sorted ids with multiplicity, e.g. ("a", "a", "b")."""
        out: list[ElementId] = []
        for e, c in self.items:
            out.extend([e] * c)
        return tuple(out)

    @property
    def sort_key(self) -> tuple[int, tuple[ElementId, ...]]:
        """Canonical (shortlex) ordering key: cardinality, then expanded ids."""
        return (self.cardinality, self.expanded())

    def __contains__(self, eid: object) -> bool:
        return any(e == eid for e, _ in self.items)

    def __str__(self) -> str:
        return "{" + ", ".join(self.expanded()) + "}"


class ScaleKind(enum.Enum):
    NUMERIC = "numeric"
    RATIO = "ratio"
    ORDINAL = "ordinal"


@dataclass(frozen=True)
class ValueScale:
    """Declares how values are measured.

    Numeric scales carry plain reals, ratio scales a numerator/denominator
    pair (e.g. damage per mana), ordinal scales an ordered list of labels
    with rank 0 the lowest.
    """

    kind: ScaleKind
    labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.kind is ScaleKind.ORDINAL:
            if not self.labels:
                raise ValueError("ordinal scale requires at least one label")
            if len(set(self.labels)) != len(self.labels):
                raise ValueError("ordinal labels must be unique")
        elif self.labels:
            raise ValueError("labels are only valid on ordinal scales")

    @classmethod
    def numeric(cls) -> "ValueScale":
        return cls(ScaleKind.NUMERIC)

    @classmethod
    def ratio(cls) -> "ValueScale":
        return cls(ScaleKind.RATIO)

    @classmethod
    def ordinal(cls, labels: Sequence[str]) -> "ValueScale":
        return cls(ScaleKind.ORDINAL, tuple(labels))


def ordinal_rank(scale: ValueScale, label: str) -> int:
    """0-based index of a label in an ordinal scale."""
    if scale.kind is not ScaleKind.ORDINAL:
        raise ScaleMismatch("ordinal_rank requires an ordinal scale")
    try:
        return scale.labels.index(label)
    except ValueError:
        raise UnknownLabel(f"label {label!r} not in scale {list(scale.labels)}") from None


@dataclass(frozen=True)
class Value:
    """A measured value on a declared scale.

    Exactly one payload is populated: ``number`` for numeric scales,
    ``numerator``/``denominator`` for ratio scales, ``rank`` for ordinal
    scales.  ``as_real()`` gives the canonical real embedding used for all
    synergy arithmetic (numeric: itself; ratio: numerator/denominator;
    ordinal: the rank).
    """

    scale: ValueScale
    number: float | None = None
    numerator: float | None = None
    denominator: float | None = None
    rank: int | None = None

    def __post_init__(self) -> None:
        kind = self.scale.kind
        if kind is ScaleKind.NUMERIC:
            if self.number is None or self.numerator is not None or self.rank is not None:
                raise InvalidValue("numeric value requires exactly the 'number' payload")
        elif kind is ScaleKind.RATIO:
            if self.numerator is None or self.denominator is None:
                raise InvalidValue("ratio value requires numerator and denominator")
            if self.number is not None or self.rank is not None:
                raise InvalidValue("ratio value must not carry other payloads")
            if self.numerator < 0 or self.denominator < 0:
                raise InvalidValue("ratio numerator and denominator must be >= 0")
        else:
            if self.rank is None or self.number is not None or self.numerator is not None:
                raise InvalidValue("ordinal value requires exactly the 'rank' payload")
            if not 0 <= self.rank < len(self.scale.labels):
                raise InvalidValue(
                    f"rank {self.rank} outside ordinal range 0..{len(self.scale.labels) - 1}"
                )

    @classmethod
    def of_numeric(cls, number: float) -> "Value":
        return cls(ValueScale.numeric(), number=float(number))

    @classmethod
    def of_ratio(cls, numerator: float, denominator: float) -> "Value":
        return cls(ValueScale.ratio(), numerator=float(numerator), denominator=float(denominator))

    @classmethod
    def of_ordinal(cls, scale: ValueScale, label_or_rank: str | int) -> "Value":
        rank = (
            ordinal_rank(scale, label_or_rank)
            if isinstance(label_or_rank, str)
            else int(label_or_rank)
        )
        return cls(scale, rank=rank)

    @property
    def label(self) -> str:
        if self.scale.kind is not ScaleKind.ORDINAL:
            raise ScaleMismatch("only ordinal values have labels")
        return self.scale.labels[self.rank]  # type: ignore[index]

    def as_real(self) -> float:
        if self.scale.kind is ScaleKind.NUMERIC:
            return float(self.number)  # type: ignore[arg-type]
        if self.scale.kind is ScaleKind.RATIO:
            if self.denominator == 0:
                raise InvalidValue("cannot embed a ratio with zero denominator")
            return self.numerator / self.denominator  # type: ignore[operator]
        return float(self.rank)  # type: ignore[arg-type]


class BaselineCombiner(enum.Enum):
    """How singleton values combine into the no-interaction expectation.

    SUM is the literal additive reading.  MEAN keeps probability-like values
    in range.  INDEPENDENT_UNION is 1 - prod(1 - p_i) for win probabilities.
    POOLED_RATIO sums numerators and denominators separately, the natural
    no-interaction expectation for ratio scales.
    """

    SUM = "sum"
    MEAN = "mean"
    INDEPENDENT_UNION = "independent"
    POOLED_RATIO = "pooled"

    def compatible_with(self, scale: ValueScale) -> bool:
        if self in (BaselineCombiner.SUM, BaselineCombiner.MEAN):
            return scale.kind in (ScaleKind.NUMERIC, ScaleKind.ORDINAL)
        if self is BaselineCombiner.INDEPENDENT_UNION:
            return scale.kind is ScaleKind.NUMERIC
        return scale.kind is ScaleKind.RATIO


class ValueFunction:
    """Contract for evaluating sets: deterministic, pure, total over a pool.

    Subclasses implement ``evaluate``.  Singletons must be accepted even
    though synergy itself is only defined for two or more elements, because
    baselines are built from singleton evaluations.
    """

    def __init__(self, scale: ValueScale, pool: Iterable[ElementId]):
        self.scale = scale
        self.pool = frozenset(pool)
        if not self.pool:
            raise ValueError("value function pool must be non-empty")

    def evaluate(self, s: SynergySet) -> Value:
        raise NotImplementedError

    def __call__(self, s: SynergySet) -> Value:
        return self.evaluate(s)

    def check_elements(self, s: SynergySet) -> None:
        missing = [e for e in s.ids if e not in self.pool]
        if missing:
            raise UnknownElement(f"elements not in pool: {missing}")


class CallableValueFunction(ValueFunction):
    """Wraps a plain function set -> Value."""

    def __init__(
        self,
        scale: ValueScale,
        pool: Iterable[ElementId],
        fn: Callable[[SynergySet], Value],
    ):
        super().__init__(scale, pool)
        self._fn = fn

    def evaluate(self, s: SynergySet) -> Value:
        self.check_elements(s)
        return self._fn(s)


class AdditiveValueFunction(ValueFunction):
    """v(S) = sum of per-element weights, multiplicity included.

    By construction every set has zero synergy under a SUM baseline; useful
    as a null model and in tests.
    """

    def __init__(self, weights: Mapping[ElementId, float]):
        super().__init__(ValueScale.numeric(), weights.keys())
        self._weights = dict(weights)

    def evaluate(self, s: SynergySet) -> Value:
        self.check_elements(s)
        return Value.of_numeric(sum(self._weights[e] * c for e, c in s.items))


@dataclass(frozen=True)
class SynergyScore:
    """Result of one synergy computation.

    ``synergy`` is always ``set_value.as_real() - baseline_value.as_real()``,
    in the units of the scale's real embedding (ordinal scales: rank units).
    """

    set: SynergySet
    set_value: Value
    baseline_value: Value
    synergy: float
    baseline_kind: BaselineCombiner


def _combine_baseline(
    singles: Sequence[tuple[Value, int]],
    combiner: BaselineCombiner,
    cardinality: int,
) -> Value:
    """Combined no-interaction value of singleton evaluations with counts.

    SUM and MEAN of ordinal values are reported on a numeric scale in rank
    units: the combined rank may exceed the top label (two "cold" elements
    sum to a rank no single label may hold), and clamping it would silently
    hide synergy.
    """
    if combiner is BaselineCombiner.POOLED_RATIO:
        num = sum(v.numerator * c for v, c in singles)  # type: ignore[operator]
        den = sum(v.denominator * c for v, c in singles)  # type: ignore[operator]
        return Value.of_ratio(num, den)
    if combiner is BaselineCombiner.INDEPENDENT_UNION:
        miss = 1.0
        for v, c in singles:
            p = v.as_real()
            if not 0.0 <= p <= 1.0:
                raise ScaleMismatch(
                    f"independent-union baseline needs probabilities in [0, 1], got {p}"
                )
            miss *= (1.0 - p) ** c
        return Value.of_numeric(1.0 - miss)
    total = sum(v.as_real() * c for v, c in singles)
    if combiner is BaselineCombiner.MEAN:
        total /= cardinality
    return Value.of_numeric(total)


def compute_synergy(
    s: SynergySet, vf: ValueFunction, baseline: BaselineCombiner
) -> SynergyScore:
    """Score one set: set value minus the combined singleton baseline.

    Every element's singleton value enters the baseline once per copy, so a
    duplicated element counts twice under SUM.
    """
    if s.cardinality < 2:
        raise CardinalityError(f"synergy needs at least two elements, got {s}")
    vf.check_elements(s)
    if not baseline.compatible_with(vf.scale):
        raise ScaleMismatch(
            f"baseline {baseline.value} incompatible with {vf.scale.kind.value} scale"
        )
    set_value = vf.evaluate(s)
    singles = [(vf.evaluate(SynergySet.single(e)), c) for e, c in s.items]
    baseline_value = _combine_baseline(singles, baseline, s.cardinality)
    return SynergyScore(
        set=s,
        set_value=set_value,
        baseline_value=baseline_value,
        synergy=set_value.as_real() - baseline_value.as_real(),
        baseline_kind=baseline,
    )


def batch_synergy(
    sets: Iterable[SynergySet], vf: ValueFunction, baseline: BaselineCombiner
) -> list[SynergyScore]:
    """compute_synergy over a sequence; preserves order, tags errors with the index."""
    out: list[SynergyScore] = []
    for i, s in enumerate(sets):
        try:
            out.append(compute_synergy(s, vf, baseline))
        except Exception as exc:
            raise type(exc)(f"set {i} ({s}): {exc}") from exc
    return out


def rank_sets(scores: Sequence[SynergyScore]) -> list[SynergyScore]:
    """Sort descending by synergy; ties broken by canonical set order.

    All scores must share the same value scale and baseline kind, since
    synergy numbers on different scales are not comparable.
    """
    if not scores:
        return []
    scale = scores[0].set_value.scale
    kind = scores[0].baseline_kind
    for sc in scores:
        if sc.set_value.scale != scale or sc.baseline_kind != kind:
            raise MixedScales("cannot rank scores with mixed scales or baselines")
    return sorted(scores, key=lambda sc: (-sc.synergy, sc.set.sort_key))
