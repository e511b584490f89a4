"""Command-line pipeline: ingest logs, build snapshots, scan, recommend, serve.

All reports are canonical JSON (sorted keys) so reruns with the same inputs
and config are byte-identical.  Exit codes: 0 success, 1 input error, 2
internal error.
"""
from __future__ import annotations

import math
import os
import sys
from typing import Optional, Sequence

import click

from .core import BaselineCombiner, SynergyScore, compute_synergy, rank_sets
from .empirical import (
    WinRateEstimate,
    ingest_match_log,
    sequence_win_rates,
    winrate_value_function,
)
from .errors import EvaluationGap, SynergyError
from .recommend import DraftState, Weights, recommend as recommend_fn, what_if
from .search import (
    CandidateSpace,
    Exhaustive,
    OutlierReport,
    SearchStrategy,
    UniformSample,
    count_sets,
    enumerate_sets,
    sample_sets,
    top_k_synergy,
)
from .service import SnapshotStore, create_app, serve_app
from .snapshot import (
    RunConfig,
    build_snapshot,
    canonical_json,
    counters_to_csv,
    counters_to_dict,
    load_snapshot,
    matrix_to_csv,
    matrix_to_dict,
    save_snapshot,
)
from .tcg import (
    COPY_CAP,
    CardPool,
    DamagePerManaValueFunction,
    card_set_to_dict,
    load_card_set,
    rebalance_iterate,
    scan_pool,
)

BASELINES = [b.value for b in BaselineCombiner]


def _parse_ids(raw: str | None) -> tuple[str, ...]:
    if not raw:
        return ()
    return tuple(p for p in (s.strip() for s in raw.split(",")) if p)


def _parse_strategy(raw: str, seed: int) -> SearchStrategy:
    if raw == "exhaustive":
        return Exhaustive()
    if raw.startswith("sample:"):
        try:
            n = int(raw[len("sample:"):])
        except ValueError:
            raise click.BadParameter(f"bad sample size in {raw!r}")
        return UniformSample(n=n, seed=seed)
    raise click.BadParameter(f"strategy must be 'exhaustive' or 'sample:<n>', got {raw!r}")


def _strategy_name(strategy: SearchStrategy) -> str:
    if isinstance(strategy, UniformSample):
        return f"sample:{strategy.n}"
    return "exhaustive"


def _write_report(out: str | None, doc: dict) -> None:
    data = canonical_json(doc)
    if out is None or out == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        with open(out, "wb") as fh:
            fh.write(data)
        click.echo(f"wrote {out}", err=True)


def _write_text(out: str, text: str) -> None:
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(text)
    click.echo(f"wrote {out}", err=True)


def _read_bytes(path: str) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


def _estimate_doc(est: WinRateEstimate) -> dict:
    return {
        "wins": est.wins,
        "games": est.games,
        "rate": est.rate,
        "ci_low": est.ci_low,
        "ci_high": est.ci_high,
    }


def _score_doc(sc: SynergyScore) -> dict:
    return {
        "set": list(sc.set.expanded()),
        "synergy": sc.synergy,
        "set_value": sc.set_value.as_real(),
        "baseline_value": sc.baseline_value.as_real(),
    }


def _outlier_doc(report: OutlierReport) -> dict:
    pop = {"count": report.population.count, "median": report.population.median}
    if report.population.mad is not None:
        pop["mad"] = report.population.mad
    if report.population.q1 is not None:
        pop["q1"] = report.population.q1
        pop["q3"] = report.population.q3
    return {
        "method": report.method,
        "threshold": report.threshold,
        "population": pop,
        # deviation null = infinite (dispersion collapsed to zero)
        "flagged": [
            dict(_score_doc(sc), deviation=None if math.isinf(dev) else dev)
            for sc, dev in report.flagged
        ],
    }


@click.group()
def cli() -> None:
    """Synergy analysis for game elements: sets, win rates, combos, drafts."""


@cli.command()
@click.option("--log", "log_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--baseline", type=click.Choice(BASELINES), default="mean", show_default=True)
@click.option("--min-games", type=int, default=30, show_default=True)
@click.option("--z", type=float, default=1.96, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--snapshot-version", type=int, default=1, show_default=True)
@click.option("--built-at", default=None, help="Timestamp to record; default env SYNERGY_BUILD_TIME or empty.")
def ingest(log_path: str, out_path: str, baseline: str, min_games: int, z: float,
           seed: int, snapshot_version: int, built_at: Optional[str]) -> None:
    """Ingest a JSONL match log and write an analysis snapshot."""
    result = ingest_match_log(_read_bytes(log_path))
    for reject in result.rejects:
        click.echo(f"line {reject.line_no}: {reject.reason}", err=True)
    config = RunConfig(baseline=baseline, min_games=min_games, z=z, seed=seed)
    snap = build_snapshot(result.log, config, version=snapshot_version, built_at=built_at)
    save_snapshot(snap, out_path)
    click.echo(
        f"ingested {len(result.log)} records ({len(result.rejects)} rejected) "
        f"-> {out_path} (snapshot version {snap.version})"
    )


def _config_mismatch(name: str, requested, built) -> click.ClickException:
    return click.ClickException(
        f"snapshot was built with {name}={built}; "
        f"re-run ingest to change it (requested {requested})"
    )


@cli.command("matrix")
@click.option("--snap", "snap_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", default=None)
@click.option("--csv", "csv_path", default=None, type=click.Path(dir_okay=False))
@click.option("--baseline", type=click.Choice(BASELINES), default=None)
@click.option("--min-games", type=int, default=None)
def matrix_cmd(snap_path: str, out_path: Optional[str], csv_path: Optional[str],
               baseline: Optional[str], min_games: Optional[int]) -> None:
    """Emit the pair-synergy matrix from a snapshot (JSON, optionally CSV)."""
    snap = load_snapshot(snap_path)
    if baseline is not None and baseline != snap.config.baseline:
        raise _config_mismatch("baseline", baseline, snap.config.baseline)
    if min_games is not None and min_games != snap.config.min_games:
        raise _config_mismatch("min_games", min_games, snap.config.min_games)
    doc = {
        "report": "matrix",
        "snapshot_version": snap.version,
        "config": snap.config.to_dict(),
        "matrix": matrix_to_dict(snap.matrix),
    }
    _write_report(out_path, doc)
    if csv_path:
        _write_text(csv_path, matrix_to_csv(snap.matrix))


@cli.command("counters")
@click.option("--snap", "snap_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", default=None)
@click.option("--csv", "csv_path", default=None, type=click.Path(dir_okay=False))
@click.option("--min-games", type=int, default=None)
def counters_cmd(snap_path: str, out_path: Optional[str], csv_path: Optional[str],
                 min_games: Optional[int]) -> None:
    """Emit the counter matrix from a snapshot (JSON, optionally CSV)."""
    snap = load_snapshot(snap_path)
    if min_games is not None and min_games != snap.config.min_games:
        raise _config_mismatch("min_games", min_games, snap.config.min_games)
    doc = {
        "report": "counters",
        "snapshot_version": snap.version,
        "config": snap.config.to_dict(),
        "counters": counters_to_dict(snap.counters),
    }
    _write_report(out_path, doc)
    if csv_path:
        _write_text(csv_path, counters_to_csv(snap.counters))


@cli.command()
@click.option("--log", "log_path", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--cards", "cards_path", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--k", type=int, default=10, show_default=True)
@click.option("--baseline", type=click.Choice(BASELINES), default=None,
              help="Default: mean for logs, pooled for card pools.")
@click.option("--strategy", default="exhaustive", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--min-size", type=int, default=2, show_default=True)
@click.option("--max-size", type=int, default=3, show_default=True)
@click.option("--copy-cap", type=int, default=None,
              help="Default: 1 for logs, 4 for card pools.")
@click.option("--set-filter", default=None,
              help="must-contain:<id> or must-contain-any:<id,...>")
@click.option("--min-games", type=int, default=30, show_default=True)
@click.option("--out", "out_path", default=None)
def topk(log_path: Optional[str], cards_path: Optional[str], k: int,
         baseline: Optional[str], strategy: str, seed: int, workers: int,
         min_size: int, max_size: int, copy_cap: Optional[int],
         set_filter: Optional[str], min_games: int, out_path: Optional[str]) -> None:
    """Find the k highest-synergy sets over a match log or a card pool."""
    if (log_path is None) == (cards_path is None):
        raise click.UsageError("provide exactly one of --log or --cards")
    strat = _parse_strategy(strategy, seed)
    config = RunConfig(
        baseline=baseline or ("pooled" if cards_path else "mean"),
        min_games=min_games,
        seed=seed,
        sample_n=strat.n if isinstance(strat, UniformSample) else None,
    )
    combiner = config.baseline_kind

    if cards_path is not None:
        pool = load_card_set(_read_bytes(cards_path))
        space = CandidateSpace.over(
            pool.ids, min_size, max_size,
            copy_cap=COPY_CAP if copy_cap is None else copy_cap,
            set_filter=set_filter,
        )
        result = top_k_synergy(
            space, DamagePerManaValueFunction(pool), combiner, k,
            strategy=strat, workers=workers,
        )
        entries, examined, exhaustive = result.entries, result.sets_examined, result.exhaustive
        source = {"kind": "cards", "pool_version": pool.version}
    else:
        log = ingest_match_log(_read_bytes(log_path)).log
        vf = winrate_value_function(log, min_games)
        space = CandidateSpace.over(
            sorted(log.pool), min_size, max_size,
            copy_cap=1 if copy_cap is None else copy_cap,
            set_filter=set_filter,
        )
        if isinstance(strat, UniformSample):
            candidates = dict.fromkeys(sample_sets(space, strat.n, strat.seed))
            exhaustive = False
        else:
            candidates = dict.fromkeys(enumerate_sets(space))
            exhaustive = True
        examined = 0
        scores = []
        for s in candidates:
            examined += 1
            try:
                scores.append(compute_synergy(s, vf, combiner))
            except EvaluationGap:
                continue  # sets with no joint data are skipped, not zeroed
        entries = tuple(rank_sets(scores)[:k])
        source = {"kind": "log", "digest": log.digest}

    doc = {
        "report": "topk",
        "config": config.to_dict(),
        "source": source,
        "k": k,
        "strategy": _strategy_name(strat),
        "exhaustive": exhaustive,
        "sets_examined": examined,
        "entries": [_score_doc(sc) for sc in entries],
    }
    _write_report(out_path, doc)


def _draft_state_from_flags(snap, allies: str | None, enemies: str | None,
                            unavailable: str | None) -> DraftState:
    return DraftState(
        allies=_parse_ids(allies),
        enemies=_parse_ids(enemies),
        pool=snap.pool,
        unavailable=frozenset(_parse_ids(unavailable)),
    )


def _weights_from_flags(snap, ally_weight: Optional[float],
                        counter_weight: Optional[float]) -> Weights:
    return Weights(
        snap.config.ally_weight if ally_weight is None else ally_weight,
        snap.config.counter_weight if counter_weight is None else counter_weight,
    )


@cli.command("recommend")
@click.option("--snap", "snap_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--allies", default=None, help="Comma-separated ally ids.")
@click.option("--enemies", default=None, help="Comma-separated enemy ids.")
@click.option("--unavailable", default=None, help="Comma-separated banned/picked ids.")
@click.option("--k", type=int, default=None)
@click.option("--ally-weight", type=float, default=None)
@click.option("--counter-weight", type=float, default=None)
@click.option("--out", "out_path", default=None)
def recommend_cmd(snap_path: str, allies: Optional[str], enemies: Optional[str],
                  unavailable: Optional[str], k: Optional[int],
                  ally_weight: Optional[float], counter_weight: Optional[float],
                  out_path: Optional[str]) -> None:
    """Rank the available candidates for the next draft pick."""
    snap = load_snapshot(snap_path)
    state = _draft_state_from_flags(snap, allies, enemies, unavailable)
    ranked = recommend_fn(
        snap.matrix, snap.counters, state, k=k,
        weights=_weights_from_flags(snap, ally_weight, counter_weight),
    )
    doc = {
        "report": "recommend",
        "snapshot_version": snap.version,
        "config": snap.config.to_dict(),
        "state": {
            "allies": sorted(state.allies),
            "enemies": sorted(state.enemies),
            "unavailable": sorted(state.unavailable),
        },
        "recommendations": [vars(r) for r in ranked],
    }
    _write_report(out_path, doc)


@cli.command("whatif")
@click.option("--snap", "snap_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--candidate", required=True)
@click.option("--allies", default=None)
@click.option("--enemies", default=None)
@click.option("--unavailable", default=None)
@click.option("--ally-weight", type=float, default=None)
@click.option("--counter-weight", type=float, default=None)
@click.option("--out", "out_path", default=None)
def whatif_cmd(snap_path: str, candidate: str, allies: Optional[str],
               enemies: Optional[str], unavailable: Optional[str],
               ally_weight: Optional[float], counter_weight: Optional[float],
               out_path: Optional[str]) -> None:
    """Project the score a hypothetical pick would get, with its breakdown."""
    snap = load_snapshot(snap_path)
    state = _draft_state_from_flags(snap, allies, enemies, unavailable)
    projection = what_if(
        snap.matrix, snap.counters, state, candidate,
        weights=_weights_from_flags(snap, ally_weight, counter_weight),
    )
    doc = {
        "report": "whatif",
        "snapshot_version": snap.version,
        "config": snap.config.to_dict(),
        "recommendation": vars(projection.recommendation),
        "ally_contributions": [vars(c) for c in projection.ally_contributions],
        "enemy_contributions": [vars(c) for c in projection.enemy_contributions],
        "projected_allies": list(projection.projected_allies),
    }
    _write_report(out_path, doc)


def _load_scan_pool(pool_path: str, new_path: Optional[str],
                    new_ids: Optional[str]) -> tuple[CardPool, tuple[str, ...]]:
    base = load_card_set(_read_bytes(pool_path))
    ids = _parse_ids(new_ids)
    if new_path is not None:
        extra = load_card_set(_read_bytes(new_path))
        base = CardPool(cards=base.cards + extra.cards, version=base.version)
        ids = ids + tuple(c.id for c in extra.cards)
    if not ids:
        raise click.UsageError("provide --new and/or --new-ids to mark the cards under scan")
    return base, ids


def _scan_doc(report: OutlierReport, pool: CardPool, new_ids: Sequence[str],
              config: RunConfig, strategy: SearchStrategy,
              min_size: int, max_size: int) -> dict:
    return {
        "report": "tcg-scan",
        "config": config.to_dict(),
        "pool_version": pool.version,
        "new_ids": sorted(set(new_ids)),
        "space": {"min_size": min_size, "max_size": max_size, "copy_cap": COPY_CAP},
        "strategy": _strategy_name(strategy),
        "scan": _outlier_doc(report),
    }


_SCAN_OPTIONS = [
    click.option("--min-size", type=int, default=2, show_default=True),
    click.option("--max-size", type=int, default=3, show_default=True),
    click.option("--strategy", default="exhaustive", show_default=True),
    click.option("--seed", type=int, default=0, show_default=True),
    click.option("--outlier", type=click.Choice(["madz", "iqr"]), default="madz", show_default=True),
    click.option("--threshold", type=float, default=None),
    click.option("--baseline", type=click.Choice(BASELINES), default="pooled", show_default=True),
    click.option("--out", "out_path", default=None),
]


def _with_scan_options(fn):
    for opt in reversed(_SCAN_OPTIONS):
        fn = opt(fn)
    return fn


@cli.command("tcg-scan")
@click.option("--pool", "pool_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--new", "new_path", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--new-ids", default=None, help="Ids already in --pool to treat as the new set.")
@_with_scan_options
def tcg_scan(pool_path: str, new_path: Optional[str], new_ids: Optional[str],
             min_size: int, max_size: int, strategy: str, seed: int,
             outlier: str, threshold: Optional[float], baseline: str,
             out_path: Optional[str]) -> None:
    """Scan every combo containing a new card and flag outlier synergies."""
    pool, ids = _load_scan_pool(pool_path, new_path, new_ids)
    strat = _parse_strategy(strategy, seed)
    config = RunConfig(
        baseline=baseline, outlier_method=outlier,
        outlier_threshold=threshold, seed=seed,
        sample_n=strat.n if isinstance(strat, UniformSample) else None,
    )
    report = scan_pool(
        pool, ids, size_min=min_size, size_max=max_size, strategy=strat,
        outlier_method=outlier, threshold=threshold,
        baseline=config.baseline_kind,
    )
    _write_report(out_path, _scan_doc(report, pool, ids, config, strat, min_size, max_size))


def _parse_edit(raw: str) -> tuple[str, str, object]:
    # "card_id:field=value", value is a JSON literal (e.g. 0, -1)
    import json as _json

    head, sep, value = raw.partition("=")
    card_id, sep2, field_name = head.partition(":")
    if not sep or not sep2 or not card_id or not field_name:
        raise click.BadParameter(f"edit must look like id:field=value, got {raw!r}")
    try:
        parsed = _json.loads(value)
    except ValueError:
        raise click.BadParameter(f"bad edit value in {raw!r}")
    return card_id, field_name, parsed


@cli.command("tcg-rebalance")
@click.option("--pool", "pool_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--new", "new_path", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--new-ids", default=None)
@click.option("--edit", "edits", multiple=True,
              help="id:field=value; fields: mana, damage, effects[<i>].amount")
@click.option("--out-pool", "out_pool_path", default=None, type=click.Path(dir_okay=False))
@_with_scan_options
def tcg_rebalance(pool_path: str, new_path: Optional[str], new_ids: Optional[str],
                  edits: tuple[str, ...], out_pool_path: Optional[str],
                  min_size: int, max_size: int, strategy: str, seed: int,
                  outlier: str, threshold: Optional[float], baseline: str,
                  out_path: Optional[str]) -> None:
    """Apply card edits and re-run the outlier scan on the new pool version."""
    pool, ids = _load_scan_pool(pool_path, new_path, new_ids)
    strat = _parse_strategy(strategy, seed)
    config = RunConfig(
        baseline=baseline, outlier_method=outlier,
        outlier_threshold=threshold, seed=seed,
        sample_n=strat.n if isinstance(strat, UniformSample) else None,
    )
    new_pool, report = rebalance_iterate(
        pool, [_parse_edit(e) for e in edits], ids,
        size_min=min_size, size_max=max_size, strategy=strat,
        outlier_method=outlier, threshold=threshold,
        baseline=config.baseline_kind,
    )
    _write_report(out_path, _scan_doc(report, new_pool, ids, config, strat, min_size, max_size))
    if out_pool_path:
        with open(out_pool_path, "wb") as fh:
            fh.write(canonical_json(card_set_to_dict(new_pool)))
        click.echo(f"wrote {out_pool_path}", err=True)


@cli.command("chess-seq")
@click.option("--log", "log_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--skip-moves", type=int, default=0, show_default=True,
              help="Drop each side's first moves (e.g. openings) before forming bigrams.")
@click.option("--min-games", type=int, default=30, show_default=True)
@click.option("--out", "out_path", default=None)
def chess_seq(log_path: str, skip_moves: int, min_games: int,
              out_path: Optional[str]) -> None:
    """Win rates of move bigrams ("seq:X->Y") from logged games."""
    log = ingest_match_log(_read_bytes(log_path)).log
    rates = sequence_win_rates(log, skip_moves)
    config = RunConfig(min_games=min_games)
    doc = {
        "report": "chess-seq",
        "config": config.to_dict(),
        "skip_moves": skip_moves,
        "elements": [
            dict(_estimate_doc(est), element=e, sufficient_games=est.games >= min_games)
            for e, est in sorted(rates.items())
        ],
    }
    _write_report(out_path, doc)


@cli.command("count")
@click.option("--ids", default=None, help="Comma-separated pool ids.")
@click.option("--cards", "cards_path", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--log", "log_path", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--min-size", type=int, default=2, show_default=True)
@click.option("--max-size", type=int, required=True)
@click.option("--copy-cap", type=int, default=1, show_default=True)
def count(ids: Optional[str], cards_path: Optional[str], log_path: Optional[str],
          min_size: int, max_size: int, copy_cap: int) -> None:
    """Exact number of candidate sets in a space (never enumerates)."""
    sources = [s for s in (ids, cards_path, log_path) if s is not None]
    if len(sources) != 1:
        raise click.UsageError("provide exactly one of --ids, --cards, --log")
    if ids is not None:
        pool: Sequence[str] = _parse_ids(ids)
    elif cards_path is not None:
        pool = load_card_set(_read_bytes(cards_path)).ids
    else:
        pool = sorted(ingest_match_log(_read_bytes(log_path)).log.pool)
    space = CandidateSpace.over(pool, min_size, max_size, copy_cap=copy_cap)
    click.echo(str(count_sets(space)))


@cli.command()
@click.option("--snap", "snap_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--port", type=int, default=8000, show_default=True,
              help="Env var SYNERGY_PORT overrides this flag.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--ui", "ui_dir", default=None, type=click.Path(exists=True, file_okay=False),
              help="Serve a static UI build from this directory.")
def serve(snap_path: str, port: int, host: str, ui_dir: Optional[str]) -> None:
    """Serve the snapshot over HTTP (read-only)."""
    port = int(os.environ.get("SYNERGY_PORT", port))
    store = SnapshotStore(load_snapshot(snap_path))
    click.echo(f"serving snapshot version {store.get().version} on {host}:{port}", err=True)
    serve_app(create_app(store, ui_dir=ui_dir), host, port)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except (SynergyError, OSError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except Exception as exc:  # noqa: BLE001 - the contract is exit code 2
        click.echo(f"internal error: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
