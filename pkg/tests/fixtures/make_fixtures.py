"""Generate the committed fixtures and their oracle tables.

Everything here is stdlib-only and deliberately naive: tallies are recounted
with plain loops, card combos evaluated by a second, straightforward
implementation of the stated rules.  Derived scores are plain IEEE doubles
in documented formula order (each ratio is a single rounded division), so
"matches the table exactly" is well-defined.  The outputs are frozen
(committed); tests compare the package against these files and never
regenerate them.

Run from the repo root:  python3 tests/fixtures/make_fixtures.py
"""
from __future__ import annotations

import json
import random
from fractions import Fraction
from itertools import combinations_with_replacement
from pathlib import Path

HERE = Path(__file__).resolve().parent


# ---------------------------------------------------------------- synthetic-A
# 200 hand-designed 2v2 matches over elements a..f plus unrelated filler
# g,h,i,j.  The quotas pin the values the tests assert:
#   solo(a) = 20/40 = 0.5   solo(b) = 16/32 = 0.5   joint(a,b) = 12/16 = 0.75
#   -> matrix synergy(a,b) = 0.75 - mean(0.5, 0.5) = +0.25 (the argmax)
#   counter(a,e) = 2/10 - 20/40 = -0.30
#   (g,h) co-occur 110 times -> a pair above the min_games=30 bar

GROUPS = [
    # (side0, side1, matches, side0 wins)
    (("a", "b"), ("c", "d"), 16, 12),
    (("a", "c"), ("e", "f"), 10, 2),
    (("a", "d"), ("c", "f"), 14, 6),
    (("b", "c"), ("d", "f"), 16, 4),
    (("c", "d"), ("e", "f"), 34, 17),
    (("g", "h"), ("i", "j"), 110, 55),
]


def synthetic_a_records() -> list[dict]:
    records = []
    n = 0
    for side0, side1, matches, wins0 in GROUPS:
        for i in range(matches):
            records.append(
                {
                    "match_id": f"m{n:04d}",
                    "sides": [list(side0), list(side1)],
                    "winner": 0 if i < wins0 else 1,
                }
            )
            n += 1
    assert n == 200
    return records


def tally_tables(records: list[dict]) -> dict:
    solo: dict[str, list[int]] = {}
    joint: dict[str, list[int]] = {}
    counter: dict[str, list[int]] = {}
    for r in records:
        sides = [sorted(set(s)) for s in r["sides"]]
        for si, roster in enumerate(sides):
            won = r["winner"] == si
            for e in roster:
                t = solo.setdefault(e, [0, 0])
                t[0] += won
                t[1] += 1
            for i, x in enumerate(roster):
                for y in roster[i + 1:]:
                    t = joint.setdefault(f"{x}|{y}", [0, 0])
                    t[0] += won
                    t[1] += 1
            for x in roster:
                for y in sides[1 - si]:
                    t = counter.setdefault(f"{x}|{y}", [0, 0])
                    t[0] += won
                    t[1] += 1

    def rate(t: list[int]) -> float:
        # single rounded division, same formula order the library documents
        return t[0] / t[1]

    matrix = {}
    for key, t in joint.items():
        x, y = key.split("|")
        matrix[key] = rate(t) - (rate(solo[x]) + rate(solo[y])) / 2
    counters = {
        key: {
            "tally": t,
            "score": rate(t) - rate(solo[key.split("|")[0]]),
        }
        for key, t in counter.items()
    }
    argmax = max(matrix, key=lambda k: (matrix[k], k))
    return {
        "solo": {k: v for k, v in sorted(solo.items())},
        "joint": {k: v for k, v in sorted(joint.items())},
        "matrix": {k: matrix[k] for k in sorted(matrix)},
        "counter": {k: counters[k] for k in sorted(counters)},
        "argmax": argmax,
    }


# ------------------------------------------------------------------- chess-50
# 50 synthetic games with interleaved move logs; rosters are just the two
# colors.  The oracle tallies, per move bigram and per side, how many sides
# played it and how many of those sides won.

PIECES = ["P", "N", "B", "R", "Q", "K"]


def chess_records(seed: int = 20260825) -> list[dict]:
    rng = random.Random(seed)
    records = []
    for g in range(50):
        seqs = [
            [rng.choice(PIECES) for _ in range(rng.randint(2, 12))] for _ in (0, 1)
        ]
        moves = []
        for i in range(max(len(seqs[0]), len(seqs[1]))):
            for side in (0, 1):
                if i < len(seqs[side]):
                    moves.append([side, seqs[side][i]])
        records.append(
            {
                "match_id": f"g{g:03d}",
                "sides": [["white"], ["black"]],
                "winner": rng.randint(0, 1),
                "moves": moves,
            }
        )
    return records


def chess_table(records: list[dict]) -> dict:
    tallies: dict[str, list[int]] = {}
    for r in records:
        for side in (0, 1):
            seq = [p for s, p in r["moves"] if s == side]
            bigrams = {f"seq:{x}->{y}" for x, y in zip(seq, seq[1:])}
            won = r["winner"] == side
            for b in bigrams:
                t = tallies.setdefault(b, [0, 0])
                t[0] += won
                t[1] += 1
    return {k: tallies[k] for k in sorted(tallies)}


# ------------------------------------------------------------------- cards-10
# Ten cards exercising every effect kind.  The oracle evaluates every combo
# of size <= 3 with a second implementation of the same rules.

CARDS = [
    {
        "id": "pearl_lord",
        "name": "Pearl Lord",
        "mana": 2,
        "types": ["merfolk"],
        "damage": 2,
        "effects": [
            {"kind": "flat_buff", "amount": 1, "filter": "merfolk", "excludes_self": True},
            {"kind": "keyword", "keyword": "islandwalk", "filter": "merfolk", "excludes_self": True},
        ],
    },
    {"id": "merfolk_scout", "name": "Merfolk Scout", "mana": 1, "types": ["merfolk"], "damage": 1, "effects": []},
    {
        "id": "spreading_seas",
        "name": "Spreading Seas",
        "mana": 1,
        "types": ["enchantment"],
        "damage": 0,
        "effects": [{"kind": "state", "flag": "opponent_has_island", "value": True}],
    },
    {"id": "bolt", "name": "Bolt", "mana": 1, "types": ["spell"], "damage": 3, "effects": []},
    {"id": "grizzly_bear", "name": "Grizzly Bear", "mana": 2, "types": ["beast"], "damage": 2, "effects": []},
    {"id": "hill_ogre", "name": "Hill Ogre", "mana": 3, "types": ["giant"], "damage": 4, "effects": []},
    {"id": "tide_caller", "name": "Tide Caller", "mana": 2, "types": ["merfolk"], "damage": 1, "effects": []},
    {
        "id": "warsong_adept",
        "name": "Warsong Adept",
        "mana": 3,
        "types": ["soldier"],
        "damage": 3,
        "effects": [{"kind": "threshold_buff", "amount": 1, "cap": 2, "filter": None}],
    },
    {"id": "fireball", "name": "Fireball", "mana": 5, "types": ["spell"], "damage": 6, "effects": []},
    {"id": "sprite", "name": "Sprite", "mana": 1, "types": ["flying"], "damage": 1, "effects": []},
]

KEYWORD_BONUSES = {"islandwalk": ("opponent_has_island", 2)}


def eval_combo_naive(counts: dict[str, int], cards: dict[str, dict]) -> tuple[int, int]:
    flags = set()
    for cid in counts:
        for eff in cards[cid]["effects"]:
            if eff["kind"] == "state" and eff.get("value", True):
                flags.add(eff["flag"])
    total_d = total_m = 0
    for tid, tcount in counts.items():
        t = cards[tid]
        dmg = t["damage"]
        kws = {ty for ty in t["types"] if ty in KEYWORD_BONUSES}
        for sid, scount in counts.items():
            for eff in cards[sid]["effects"]:
                kind = eff["kind"]
                matches = eff.get("filter") is None or eff["filter"] in t["types"]
                if kind == "flat_buff":
                    if eff.get("excludes_self", True) and sid == tid:
                        continue
                    if matches:
                        dmg += eff["amount"] * scount
                elif kind == "threshold_buff":
                    if sid == tid:
                        continue
                    if matches and t["damage"] <= eff["cap"]:
                        dmg += eff["amount"] * scount
                elif kind == "keyword":
                    if eff.get("excludes_self", True) and sid == tid:
                        continue
                    if matches:
                        kws.add(eff["keyword"])
        for kw in kws:
            flag, bonus = KEYWORD_BONUSES[kw]
            if flag in flags:
                dmg += bonus
        total_d += max(0, dmg) * tcount
        total_m += t["mana"] * tcount
    return total_d, total_m


def cards_table() -> dict:
    cards = {c["id"]: c for c in CARDS}
    ids = sorted(cards)

    def key(combo: tuple[str, ...]) -> str:
        return "|".join(combo)

    solo_dpm = {}
    for cid in ids:
        d, m = eval_combo_naive({cid: 1}, cards)
        solo_dpm[cid] = Fraction(d, max(m, 1))

    combos = {}
    best_key, best_syn = None, None
    for size in (2, 3):
        for combo in combinations_with_replacement(ids, size):
            counts: dict[str, int] = {}
            for cid in combo:
                counts[cid] = counts.get(cid, 0) + 1
            d, m = eval_combo_naive(counts, cards)
            dpm = d / max(m, 1)
            # pooled baseline: solo numerators and denominators summed
            pooled_num = sum(eval_combo_naive({cid: 1}, cards)[0] * n for cid, n in counts.items())
            pooled_den = sum(max(eval_combo_naive({cid: 1}, cards)[1], 1) * n for cid, n in counts.items())
            syn = dpm - pooled_num / pooled_den
            combos[key(combo)] = {
                "damage": d,
                "mana": m,
                "synergy": syn,
            }
            if best_syn is None or (syn, key(combo)) > (best_syn, best_key):
                best_key, best_syn = key(combo), syn
    return {
        "singles": {cid: [solo_dpm[cid].numerator, solo_dpm[cid].denominator] for cid in ids},
        "combos": combos,
        "top_synergy": best_key,
    }


def main() -> None:
    records = synthetic_a_records()
    with open(HERE / "synthetic_a.jsonl", "w") as fh:
        for r in records:
            fh.write(json.dumps(r, separators=(",", ":")) + "\n")
    with open(HERE / "synthetic_a_table.json", "w") as fh:
        json.dump(tally_tables(records), fh, indent=1, sort_keys=True)
        fh.write("\n")

    chess = chess_records()
    with open(HERE / "chess50.jsonl", "w") as fh:
        for r in chess:
            fh.write(json.dumps(r, separators=(",", ":")) + "\n")
    with open(HERE / "chess50_table.json", "w") as fh:
        json.dump(chess_table(chess), fh, indent=1, sort_keys=True)
        fh.write("\n")

    with open(HERE / "cards10.json", "w") as fh:
        json.dump({"cards": CARDS}, fh, indent=1)
        fh.write("\n")
    with open(HERE / "cards10_dpm_table.json", "w") as fh:
        json.dump(cards_table(), fh, indent=1, sort_keys=True)
        fh.write("\n")

    print("fixtures written to", HERE)


if __name__ == "__main__":
    main()
