"""A deliberately small trading-card evaluator.

Cards deal damage for mana; effects are additive buffs, keyword grants,
board-state modifiers, and printed-stat threshold buffs.  The strength
measure is damage per mana (a Ratio value), so combo synergy under the
pooled-ratio baseline is exactly "does the whole deal more per mana than
the parts would pooled together".

Design rules that keep evaluation order-independent:

- buffs are additive and single-pass — buffed damage never re-triggers
  thresholds (thresholds test printed base damage);
- effects are id-scoped: an effect with ``excludes_self`` never applies to
  any copy of its own card id, and effect magnitude scales with the number
  of source copies;
- state-modifier conflicts resolve True-wins;
- innate keywords (e.g. a card that is itself unblockable) are type tags.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Mapping, Sequence, Union

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
    CopyCapExceeded,
    InvalidCardSet,
    InvalidEdit,
    UnknownCard,
)
from .search import (
    CandidateSpace,
    Exhaustive,
    OutlierReport,
    SearchStrategy,
    UniformSample,
    detect_outliers,
    enumerate_sets,
    sample_sets,
    METHOD_MADZ,
    MUST_CONTAIN_ANY,
)

COPY_CAP = 4

# keyword -> (board flag that activates it, damage bonus)
KEYWORD_BONUSES: Mapping[str, tuple[str, int]] = {
    "islandwalk": ("opponent_has_island", 2),
}


@dataclass(frozen=True)
class FlatBuff:
    """Adds ``amount`` damage to cards matching the type filter."""

    amount: int
    filter: str | None = None
    excludes_self: bool = True


@dataclass(frozen=True)
class KeywordGrant:
    """Grants a keyword (e.g. islandwalk) to cards matching the filter."""

    keyword: str
    filter: str | None = None
    excludes_self: bool = True


@dataclass(frozen=True)
class StateModifier:
    """Sets a board flag, e.g. turning an opponent's land into an island."""

    flag: str
    value: bool = True


@dataclass(frozen=True)
class ThresholdBuff:
    """Adds ``amount`` to cards whose PRINTED damage is <= stat_cap."""

    amount: int
    stat_cap: int
    filter: str | None = None


Effect = Union[FlatBuff, KeywordGrant, StateModifier, ThresholdBuff]


@dataclass(frozen=True)
class Card:
    id: ElementId
    name: str
    mana_cost: int
    types: frozenset[str] = frozenset()
    base_damage: int = 0
    effects: tuple[Effect, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "types", frozenset(self.types))
        object.__setattr__(self, "effects", tuple(self.effects))
        if not self.id:
            raise InvalidCardSet("card id must be non-empty")
        if self.mana_cost < 0:
            raise InvalidCardSet(f"{self.id}: mana_cost must be >= 0")
        if self.base_damage < 0:
            raise InvalidCardSet(f"{self.id}: base_damage must be >= 0")


@dataclass(frozen=True)
class BoardState:
    """Opponent-side flags; anything absent is false."""

    opponent_flags: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "opponent_flags", frozenset(self.opponent_flags))

    def has(self, flag: str) -> bool:
        return flag in self.opponent_flags


@dataclass(frozen=True)
class CardPool:
    """An immutable, versioned card collection."""

    cards: tuple[Card, ...]
    version: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "cards", tuple(self.cards))
        ids = [c.id for c in self.cards]
        if len(set(ids)) != len(ids):
            raise InvalidCardSet("card ids must be unique")

    @cached_property
    def by_id(self) -> Mapping[ElementId, Card]:
        return {c.id: c for c in self.cards}

    @property
    def ids(self) -> tuple[ElementId, ...]:
        return tuple(sorted(self.by_id))

    def resolve(self, card_id: ElementId) -> Card:
        card = self.by_id.get(card_id)
        if card is None:
            raise UnknownCard(f"no card with id {card_id!r}")
        return card

    def with_edits(
        self, edits: Sequence[tuple[ElementId, str, object]]
    ) -> "CardPool":
        """Apply (card id, field, new value) edits; returns a new version.

        Editable fields: ``mana``, ``damage``, ``effects[<i>].amount``.
        An empty edit list is a no-op and keeps the current version.
        """
        if not edits:
            return self
        updated = dict(self.by_id)
        for card_id, field_name, value in edits:
            card = updated.get(card_id)
            if card is None:
                raise UnknownCard(f"no card with id {card_id!r}")
            updated[card_id] = _apply_edit(card, field_name, value)
        return CardPool(
            cards=tuple(updated[c.id] for c in self.cards),
            version=self.version + 1,
        )


_EFFECT_AMOUNT = re.compile(r"^effects\[(\d+)\]\.amount$")


def _apply_edit(card: Card, field_name: str, value: object) -> Card:
    if field_name == "mana":
        if not isinstance(value, int) or value < 0:
            raise InvalidEdit(f"{card.id}: mana must be a non-negative integer")
        return replace(card, mana_cost=value)
    if field_name == "damage":
        if not isinstance(value, int) or value < 0:
            raise InvalidEdit(f"{card.id}: damage must be a non-negative integer")
        return replace(card, base_damage=value)
    m = _EFFECT_AMOUNT.match(field_name)
    if m:
        i = int(m.group(1))
        if i >= len(card.effects):
            raise InvalidEdit(f"{card.id}: no effects[{i}]")
        eff = card.effects[i]
        if not isinstance(eff, (FlatBuff, ThresholdBuff)):
            raise InvalidEdit(f"{card.id}: effects[{i}] has no amount")
        if not isinstance(value, int):
            raise InvalidEdit(f"{card.id}: amount must be an integer")
        effects = list(card.effects)
        effects[i] = replace(eff, amount=value)
        return replace(card, effects=tuple(effects))
    raise InvalidEdit(f"unknown field {field_name!r}")


@dataclass(frozen=True)
class ComboEvaluation:
    cards: SynergySet
    total_damage: int
    total_mana: int
    dpm: Value
    free_combo_flag: bool


def _filter_matches(filt: str | None, target: Card) -> bool:
    return filt is None or filt in target.types


def evaluate_combo(
    pool: CardPool, combo: SynergySet, state: BoardState = BoardState()
) -> ComboEvaluation:
    """Deterministic combo evaluation.

    Order of resolution is fixed: state modifiers first, then additive
    flat/threshold buffs against printed damage, then keyword bonuses from
    the resolved board.  Per-card damage is clamped at zero after buffs.
    """
    resolved = [(pool.resolve(e), count) for e, count in combo.items]
    for card, count in resolved:
        if count > COPY_CAP:
            raise CopyCapExceeded(f"{card.id}: {count} copies > cap {COPY_CAP}")

    set_true: set[str] = set()
    set_false: set[str] = set()
    for card, _count in resolved:
        for eff in card.effects:
            if isinstance(eff, StateModifier):
                (set_true if eff.value else set_false).add(eff.flag)
    flags = (set(state.opponent_flags) - set_false) | set_true
    board = BoardState(frozenset(flags))

    total_damage = 0
    total_mana = 0
    for target, t_count in resolved:
        damage = target.base_damage
        keywords = {t for t in target.types if t in KEYWORD_BONUSES}
        for source, s_count in resolved:
            for eff in source.effects:
                if isinstance(eff, FlatBuff):
                    if eff.excludes_self and source.id == target.id:
                        continue
                    if _filter_matches(eff.filter, target):
                        damage += eff.amount * s_count
                elif isinstance(eff, ThresholdBuff):
                    if source.id == target.id:
                        continue
                    if (
                        target.base_damage <= eff.stat_cap
                        and _filter_matches(eff.filter, target)
                    ):
                        damage += eff.amount * s_count
                elif isinstance(eff, KeywordGrant):
                    if eff.excludes_self and source.id == target.id:
                        continue
                    if _filter_matches(eff.filter, target):
                        keywords.add(eff.keyword)
        for kw in keywords:
            flag, bonus = KEYWORD_BONUSES.get(kw, (None, 0))
            if flag is not None and board.has(flag):
                damage += bonus
        total_damage += max(0, damage) * t_count
        total_mana += target.mana_cost * t_count

    return ComboEvaluation(
        cards=combo,
        total_damage=total_damage,
        total_mana=total_mana,
        dpm=Value.of_ratio(total_damage, max(total_mana, 1)),
        free_combo_flag=total_mana == 0,
    )


def card_strength(pool: CardPool, card_id: ElementId) -> Value:
    """Damage per mana of the card alone on an empty board."""
    return evaluate_combo(pool, SynergySet.single(card_id)).dpm


class DamagePerManaValueFunction(ValueFunction):
    """Ratio-scale value function: v(combo) = damage/mana on a fixed board."""

    def __init__(self, pool: CardPool, state: BoardState = BoardState()):
        super().__init__(ValueScale.ratio(), frozenset(pool.by_id))
        self.card_pool = pool
        self.state = state

    def evaluate(self, s: SynergySet) -> Value:
        return evaluate_combo(self.card_pool, s, self.state).dpm


def combo_synergy(
    pool: CardPool,
    combo: SynergySet,
    state: BoardState = BoardState(),
    baseline: BaselineCombiner = BaselineCombiner.POOLED_RATIO,
) -> SynergyScore:
    """Definition-1 synergy of a combo under damage-per-mana.

    The default pooled-ratio baseline sums solo damages over solo manas, so
    interaction-free combos score exactly zero.
    """
    vf = DamagePerManaValueFunction(pool, state)
    return compute_synergy(combo, vf, baseline)


def _scan_space(pool: CardPool, new_ids: Sequence[ElementId],
                size_min: int, size_max: int) -> CandidateSpace:
    missing = sorted(set(new_ids) - set(pool.by_id))
    if missing:
        raise UnknownCard(f"new ids not in pool: {missing}")
    if not new_ids:
        raise InvalidCardSet("scan needs at least one new card")
    return CandidateSpace.over(
        pool.ids,
        size_min=size_min,
        size_max=size_max,
        copy_cap=COPY_CAP,
        set_filter=MUST_CONTAIN_ANY + ",".join(sorted(set(new_ids))),
    )


def scan_pool(
    pool: CardPool,
    new_ids: Sequence[ElementId],
    size_min: int = 2,
    size_max: int = 3,
    strategy: SearchStrategy = Exhaustive(),
    outlier_method: str = METHOD_MADZ,
    threshold: float | None = None,
    state: BoardState = BoardState(),
    baseline: BaselineCombiner = BaselineCombiner.POOLED_RATIO,
) -> OutlierReport:
    """Score every combo containing a new card and flag the extremes.

    Most combos don't interact and land exactly on the baseline, so the
    robust dispersion usually collapses and anything with nonzero synergy
    is surfaced — which is the point of a pre-release scan.
    """
    space = _scan_space(pool, new_ids, size_min, size_max)
    if isinstance(strategy, UniformSample):
        candidates = dict.fromkeys(sample_sets(space, strategy.n, strategy.seed))
    else:
        candidates = dict.fromkeys(enumerate_sets(space))
    vf = DamagePerManaValueFunction(pool, state)
    scores = [compute_synergy(s, vf, baseline) for s in candidates]
    return detect_outliers(scores, method=outlier_method, threshold=threshold)


def scan_new_set(
    new_cards: Sequence[Card],
    existing_pool: Union[CardPool, Sequence[Card]],
    **kwargs,
) -> OutlierReport:
    """Combine new cards with the existing pool and scan (see scan_pool)."""
    existing = existing_pool.cards if isinstance(existing_pool, CardPool) else tuple(existing_pool)
    pool = CardPool(cards=tuple(existing) + tuple(new_cards))
    return scan_pool(pool, [c.id for c in new_cards], **kwargs)


def rebalance_iterate(
    pool: CardPool,
    edits: Sequence[tuple[ElementId, str, object]],
    new_ids: Sequence[ElementId],
    **scan_kwargs,
) -> tuple[CardPool, OutlierReport]:
    """Apply card edits, bump the pool version, and re-run the scan."""
    new_pool = pool.with_edits(edits)
    report = scan_pool(new_pool, new_ids, **scan_kwargs)
    return new_pool, report


_EFFECT_KINDS = {"flat_buff", "keyword", "state", "threshold_buff"}


def _effect_from_dict(obj: dict, card_id: str) -> Effect:
    kind = obj.get("kind")
    if kind not in _EFFECT_KINDS:
        raise InvalidCardSet(f"{card_id}: unknown effect kind {kind!r}")
    try:
        if kind == "flat_buff":
            return FlatBuff(
                amount=int(obj["amount"]),
                filter=obj.get("filter"),
                excludes_self=bool(obj.get("excludes_self", True)),
            )
        if kind == "keyword":
            return KeywordGrant(
                keyword=obj["keyword"],
                filter=obj.get("filter"),
                excludes_self=bool(obj.get("excludes_self", True)),
            )
        if kind == "state":
            return StateModifier(flag=obj["flag"], value=bool(obj.get("value", True)))
        return ThresholdBuff(
            amount=int(obj["amount"]),
            stat_cap=int(obj["cap"]),
            filter=obj.get("filter"),
        )
    except KeyError as exc:
        raise InvalidCardSet(f"{card_id}: effect missing field {exc}") from exc


def _effect_to_dict(eff: Effect) -> dict:
    if isinstance(eff, FlatBuff):
        return {"kind": "flat_buff", "amount": eff.amount, "filter": eff.filter,
                "excludes_self": eff.excludes_self}
    if isinstance(eff, KeywordGrant):
        return {"kind": "keyword", "keyword": eff.keyword, "filter": eff.filter,
                "excludes_self": eff.excludes_self}
    if isinstance(eff, StateModifier):
        return {"kind": "state", "flag": eff.flag, "value": eff.value}
    return {"kind": "threshold_buff", "amount": eff.amount, "cap": eff.stat_cap,
            "filter": eff.filter}


def load_card_set(source: Union[bytes, str, dict], version: int = 1) -> CardPool:
    """Parse the card-set JSON schema; unknown effect kinds are rejected."""
    if isinstance(source, (bytes, str)):
        try:
            data = json.loads(source)
        except json.JSONDecodeError as exc:
            raise InvalidCardSet(f"not valid JSON: {exc}") from exc
    else:
        data = source
    if not isinstance(data, dict) or not isinstance(data.get("cards"), list):
        raise InvalidCardSet('card set must be {"cards": [...]}')
    cards = []
    for obj in data["cards"]:
        if not isinstance(obj, dict):
            raise InvalidCardSet("each card must be an object")
        try:
            card_id = obj["id"]
            cards.append(
                Card(
                    id=card_id,
                    name=obj.get("name", card_id),
                    mana_cost=int(obj["mana"]),
                    types=frozenset(obj.get("types", [])),
                    base_damage=int(obj["damage"]),
                    effects=tuple(
                        _effect_from_dict(e, card_id) for e in obj.get("effects", [])
                    ),
                )
            )
        except KeyError as exc:
            raise InvalidCardSet(f"card missing field {exc}") from exc
        except (TypeError, ValueError) as exc:
            raise InvalidCardSet(f"bad card field: {exc}") from exc
    return CardPool(cards=tuple(cards), version=version)


def card_set_to_dict(pool: CardPool) -> dict:
    return {
        "cards": [
            {
                "id": c.id,
                "name": c.name,
                "mana": c.mana_cost,
                "types": sorted(c.types),
                "damage": c.base_damage,
                "effects": [_effect_to_dict(e) for e in c.effects],
            }
            for c in pool.cards
        ]
    }
