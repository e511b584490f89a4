import json
import os
import signal
import socket
import subprocess
import sys
import time
from pathlib import Path

import httpx
import pytest

from synergy import (
    BaselineCombiner,
    DraftState,
    SynergySet,
    compute_synergy,
    load_snapshot,
    rank_sets,
    recommend,
    winrate_value_function,
)
from synergy.cli import main

FIXTURES = Path(__file__).parent / "fixtures"
LOG = str(FIXTURES / "synthetic_a.jsonl")
CHESS = str(FIXTURES / "chess50.jsonl")
CARDS = str(FIXTURES / "cards10.json")


@pytest.fixture(scope="module")
def snap_path(tmp_path_factory):
    out = str(tmp_path_factory.mktemp("snap") / "synthetic_a.snap.json")
    assert main(["ingest", "--log", LOG, "--out", out]) == 0
    return out


def run_json(tmp_path, args, name="out.json"):
    out = str(tmp_path / name)
    rc = main(args + ["--out", out])
    assert rc == 0, f"exit {rc} for {args}"
    return json.loads(Path(out).read_bytes())


class TestIngest:
    def test_summary_line(self, tmp_path, capsys):
        out = str(tmp_path / "snap.json")
        assert main(["ingest", "--log", LOG, "--out", out]) == 0
        captured = capsys.readouterr()
        assert "ingested 200 records (0 rejected)" in captured.out
        assert "snapshot version 1" in captured.out
        snap = load_snapshot(out)
        assert snap.records == 200

    def test_rejects_echoed(self, tmp_path, capsys):
        log = tmp_path / "dirty.jsonl"
        lines = [
            json.dumps({"match_id": f"m{i}", "sides": [["a"], ["b"]], "winner": 0})
            for i in range(40)
        ]
        lines.append(json.dumps({"match_id": "bad", "sides": [["a"], ["b"]], "winner": 7}))
        log.write_text("\n".join(lines))
        out = str(tmp_path / "snap.json")
        assert main(["ingest", "--log", str(log), "--out", out]) == 0
        captured = capsys.readouterr()
        assert "line 41: winner out of range" in captured.err
        assert "(1 rejected)" in captured.out

    def test_too_many_rejects_is_input_error(self, tmp_path, capsys):
        log = tmp_path / "broken.jsonl"
        log.write_text("junk\nmore junk\n" + json.dumps(
            {"match_id": "m", "sides": [["a"], ["b"]], "winner": 0}
        ))
        rc = main(["ingest", "--log", str(log), "--out", str(tmp_path / "s.json")])
        assert rc == 1
        assert "error:" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        rc = main(["ingest", "--log", str(tmp_path / "nope"), "--out", str(tmp_path / "s")])
        assert rc == 1

    def test_built_at_flag(self, tmp_path):
        out = str(tmp_path / "snap.json")
        assert main(["ingest", "--log", LOG, "--out", out, "--built-at", "t0"]) == 0
        assert load_snapshot(out).built_at == "t0"

    def test_deterministic_reruns(self, tmp_path):
        a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
        assert main(["ingest", "--log", LOG, "--out", a]) == 0
        assert main(["ingest", "--log", LOG, "--out", b]) == 0
        assert Path(a).read_bytes() == Path(b).read_bytes()


class TestMatrix:
    def test_json_report(self, snap_path, tmp_path, synthetic_a_table):
        doc = run_json(tmp_path, ["matrix", "--snap", snap_path])
        assert doc["report"] == "matrix"
        cells = {"|".join(e["pair"]): e["synergy"] for e in doc["matrix"]["entries"]}
        for key, expected in synthetic_a_table["matrix"].items():
            assert cells[key] == pytest.approx(expected, abs=1e-12)

    def test_stdout_default(self, snap_path, capsysbinary):
        assert main(["matrix", "--snap", snap_path]) == 0
        out = capsysbinary.readouterr().out
        assert out.endswith(b"\n")
        assert json.loads(out)["report"] == "matrix"

    def test_csv_sidecar(self, snap_path, tmp_path):
        csv_path = tmp_path / "m.csv"
        run_json(tmp_path, ["matrix", "--snap", snap_path, "--csv", str(csv_path)])
        header = csv_path.read_text().splitlines()[0]
        assert header == "a,b,synergy,joint_rate,joint_games,sufficient_games"

    def test_matching_flags_accepted(self, snap_path, tmp_path):
        doc = run_json(
            tmp_path,
            ["matrix", "--snap", snap_path, "--baseline", "mean", "--min-games", "30"],
        )
        assert doc["config"]["baseline"] == "mean"

    def test_conflicting_baseline_is_input_error(self, snap_path, tmp_path, capsys):
        rc = main(["matrix", "--snap", snap_path, "--baseline", "sum",
                   "--out", str(tmp_path / "x.json")])
        assert rc == 1
        assert "re-run ingest" in capsys.readouterr().err

    def test_counters_report(self, snap_path, tmp_path, synthetic_a_table):
        doc = run_json(tmp_path, ["counters", "--snap", snap_path])
        cells = {f'{e["a"]}|{e["b"]}': e["score"] for e in doc["counters"]["entries"]}
        for key, expected in synthetic_a_table["counter"].items():
            assert cells[key] == pytest.approx(expected["score"], abs=1e-12)


class TestTopk:
    def test_log_matches_library(self, tmp_path, synthetic_a_log):
        doc = run_json(tmp_path, ["topk", "--log", LOG, "--k", "3"])
        vf = winrate_value_function(synthetic_a_log, 30)
        scores = []
        for e in synthetic_a_log.pool:
            for f in synthetic_a_log.pool:
                if e < f:
                    try:
                        scores.append(
                            compute_synergy(SynergySet.of(e, f), vf, BaselineCombiner.MEAN)
                        )
                    except Exception:
                        continue
        expected = rank_sets(scores)[:3]
        got = doc["entries"]
        assert [g["set"] for g in got] == [list(s.set.expanded()) for s in expected]
        assert got[0]["synergy"] == pytest.approx(expected[0].synergy, abs=1e-12)
        assert doc["exhaustive"] is True

    def test_cards_finds_lord_package(self, tmp_path, cards10_table):
        doc = run_json(tmp_path, ["topk", "--cards", CARDS, "--k", "5"])
        assert doc["config"]["baseline"] == "pooled"
        top = doc["entries"][0]
        assert top["set"] == sorted(cards10_table["top_synergy"].split("|"))
        assert top["synergy"] == pytest.approx(0.75, abs=1e-12)

    def test_sampling_reported(self, tmp_path):
        doc = run_json(
            tmp_path,
            ["topk", "--cards", CARDS, "--strategy", "sample:50", "--seed", "3"],
        )
        assert doc["exhaustive"] is False
        assert doc["strategy"] == "sample:50"
        assert doc["sets_examined"] <= 50

    def test_workers_do_not_change_output(self, tmp_path):
        a = run_json(tmp_path, ["topk", "--cards", CARDS], name="a.json")
        b = run_json(tmp_path, ["topk", "--cards", CARDS, "--workers", "4"], name="b.json")
        assert a == b

    def test_requires_exactly_one_source(self, capsys):
        assert main(["topk", "--log", LOG, "--cards", CARDS]) == 1
        assert main(["topk"]) == 1

    def test_bad_strategy(self, capsys):
        assert main(["topk", "--cards", CARDS, "--strategy", "random"]) == 1


class TestRecommendCli:
    def test_matches_library(self, snap_path, tmp_path, synthetic_a_log):
        doc = run_json(tmp_path, ["recommend", "--snap", snap_path, "--allies", "a"])
        snap = load_snapshot(snap_path)
        expected = recommend(
            snap.matrix, snap.counters,
            DraftState(allies=("a",), enemies=(), pool=snap.pool),
        )
        got = doc["recommendations"]
        assert [g["candidate"] for g in got] == [e.candidate for e in expected]
        for g, e in zip(got, expected):
            assert g["total_score"] == pytest.approx(e.total_score, abs=1e-12)
        assert doc["state"]["unavailable"] == ["a"]

    def test_whatif_breakdown(self, snap_path, tmp_path, synthetic_a_table):
        doc = run_json(
            tmp_path,
            ["whatif", "--snap", snap_path, "--allies", "a", "--candidate", "b"],
        )
        assert doc["projected_allies"] == ["a", "b"]
        (contrib,) = doc["ally_contributions"]
        assert contrib["value"] == pytest.approx(
            synthetic_a_table["matrix"]["a|b"], abs=1e-12
        )

    def test_unavailable_candidate_is_input_error(self, snap_path, capsys):
        rc = main(["whatif", "--snap", snap_path, "--allies", "a", "--candidate", "a"])
        assert rc == 1
        assert "error:" in capsys.readouterr().err

    def test_weight_flags_override_config(self, snap_path, tmp_path):
        doc = run_json(
            tmp_path,
            ["recommend", "--snap", snap_path, "--allies", "a",
             "--ally-weight", "2.0", "--counter-weight", "0"],
        )
        best = doc["recommendations"][0]
        assert best["total_score"] == pytest.approx(
            2 * best["ally_component"], abs=1e-12
        )


class TestTcgCli:
    def test_scan_flags_lord_package(self, tmp_path, cards10_table):
        doc = run_json(
            tmp_path,
            ["tcg-scan", "--pool", CARDS, "--new-ids", "pearl_lord,spreading_seas"],
        )
        assert doc["report"] == "tcg-scan"
        top = doc["scan"]["flagged"][0]
        assert top["set"] == sorted(cards10_table["top_synergy"].split("|"))
        assert top["deviation"] is None  # dispersion collapsed: infinite deviation

    def test_scan_with_new_card_file(self, tmp_path):
        new_file = tmp_path / "new.json"
        new_file.write_text(json.dumps({"cards": [{
            "id": "reef_singer", "name": "Reef Singer", "mana": 2,
            "types": ["merfolk"], "damage": 1,
        }]}))
        doc = run_json(
            tmp_path, ["tcg-scan", "--pool", CARDS, "--new", str(new_file)]
        )
        assert doc["new_ids"] == ["reef_singer"]
        flagged = {tuple(f["set"]) for f in doc["scan"]["flagged"]}
        assert ("pearl_lord", "reef_singer") in flagged

    def test_scan_requires_new_cards(self, capsys):
        assert main(["tcg-scan", "--pool", CARDS]) == 1

    def test_rebalance_nerf_removes_pair(self, tmp_path):
        before = run_json(
            tmp_path,
            ["tcg-scan", "--pool", CARDS, "--new-ids", "pearl_lord"],
            name="before.json",
        )
        sets_before = {tuple(f["set"]) for f in before["scan"]["flagged"]}
        assert ("merfolk_scout", "pearl_lord") in sets_before

        out_pool = tmp_path / "pool.v2.json"
        after = run_json(
            tmp_path,
            ["tcg-rebalance", "--pool", CARDS, "--new-ids", "pearl_lord",
             "--edit", "pearl_lord:effects[0].amount=0",
             "--out-pool", str(out_pool)],
            name="after.json",
        )
        sets_after = {tuple(f["set"]) for f in after["scan"]["flagged"]}
        assert ("merfolk_scout", "pearl_lord") not in sets_after
        assert after["pool_version"] == before["pool_version"] + 1
        saved = json.loads(out_pool.read_bytes())
        lord = next(c for c in saved["cards"] if c["id"] == "pearl_lord")
        assert lord["effects"][0]["amount"] == 0

    def test_rebalance_without_edits_is_byte_identical_to_scan(self, tmp_path):
        scan_out = tmp_path / "scan.json"
        reb_out = tmp_path / "reb.json"
        assert main(["tcg-scan", "--pool", CARDS, "--new-ids", "pearl_lord",
                     "--out", str(scan_out)]) == 0
        assert main(["tcg-rebalance", "--pool", CARDS, "--new-ids", "pearl_lord",
                     "--out", str(reb_out)]) == 0
        assert scan_out.read_bytes() == reb_out.read_bytes()

    def test_bad_edit_syntax(self, capsys):
        assert main(["tcg-rebalance", "--pool", CARDS, "--new-ids", "pearl_lord",
                     "--edit", "pearl_lord+mana"]) == 1


class TestChessSeq:
    def test_elements_match_oracle(self, tmp_path, chess_table):
        doc = run_json(tmp_path, ["chess-seq", "--log", CHESS, "--min-games", "10"])
        rows = {e["element"]: e for e in doc["elements"]}
        assert set(rows) == set(chess_table)
        for bigram, (wins, games) in chess_table.items():
            assert rows[bigram]["wins"] == wins
            assert rows[bigram]["games"] == games
            assert rows[bigram]["sufficient_games"] == (games >= 10)

    def test_skip_moves_changes_counts(self, tmp_path):
        all_moves = run_json(tmp_path, ["chess-seq", "--log", CHESS], name="a.json")
        skipped = run_json(
            tmp_path, ["chess-seq", "--log", CHESS, "--skip-moves", "2"], name="b.json"
        )
        total = lambda doc: sum(e["games"] for e in doc["elements"])
        assert total(skipped) < total(all_moves)
        assert skipped["skip_moves"] == 2

    def test_log_without_moves_is_input_error(self, capsys):
        assert main(["chess-seq", "--log", LOG]) == 1


class TestCount:
    def test_ids(self, capsys):
        assert main(["count", "--ids", "a,b,c,d,e", "--max-size", "2"]) == 0
        assert capsys.readouterr().out.strip() == "10"

    def test_copy_cap(self, capsys):
        assert main(["count", "--ids", "a,b,c", "--max-size", "2",
                     "--copy-cap", "2"]) == 0
        assert capsys.readouterr().out.strip() == "6"

    def test_cards_source(self, capsys):
        assert main(["count", "--cards", CARDS, "--min-size", "2",
                     "--max-size", "3", "--copy-cap", "4"]) == 0
        assert capsys.readouterr().out.strip() == "275"

    def test_log_source(self, capsys):
        assert main(["count", "--log", LOG, "--max-size", "2"]) == 0
        assert capsys.readouterr().out.strip() == "45"

    def test_exactly_one_source(self, capsys):
        assert main(["count", "--ids", "a,b", "--cards", CARDS, "--max-size", "2"]) == 1


class TestExitCodes:
    def test_unknown_command(self, capsys):
        assert main(["frobnicate"]) == 1

    def test_help_is_success(self, capsys):
        assert main(["--help"]) == 0
        assert "ingest" in capsys.readouterr().out

    def test_internal_error_is_two(self, monkeypatch, tmp_path, capsys):
        import synergy.cli as cli_mod

        def boom(*args, **kwargs):
            raise RuntimeError("boom")

        monkeypatch.setattr(cli_mod, "build_snapshot", boom)
        rc = main(["ingest", "--log", LOG, "--out", str(tmp_path / "s.json")])
        assert rc == 2
        assert "internal error" in capsys.readouterr().err


def _free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def _wait_for(url, proc, timeout=15.0):
    deadline = time.time() + timeout
    last = None
    while time.time() < deadline:
        if proc.poll() is not None:
            raise AssertionError(f"server exited early: {proc.returncode}")
        try:
            return httpx.get(url, timeout=1.0)
        except Exception as exc:
            last = exc
            time.sleep(0.1)
    raise AssertionError(f"server never came up: {last}")


class TestServe:
    def test_serves_snapshot_and_ui(self, snap_path, tmp_path):
        port = _free_port()
        ui = tmp_path / "ui"
        ui.mkdir()
        (ui / "index.html").write_text("<!doctype html><title>synergy ui</title>")
        env = dict(os.environ, SYNERGY_PORT=str(port))
        proc = subprocess.Popen(
            [sys.executable, "-m", "synergy.cli", "serve", "--snap", snap_path,
             "--port", "1", "--ui", str(ui)],  # env must beat the flag
            env=env,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
        )
        try:
            health = _wait_for(f"http://127.0.0.1:{port}/api/health", proc)
            assert health.status_code == 200
            assert health.json() == {"status": "ok", "snapshot_version": 1}

            rec = httpx.post(
                f"http://127.0.0.1:{port}/api/recommend",
                json={"allies": ["a"]},
                timeout=5.0,
            )
            assert rec.status_code == 200
            assert rec.json()["recommendations"][0]["candidate"] == "b"

            page = httpx.get(f"http://127.0.0.1:{port}/", timeout=5.0)
            assert page.status_code == 200
            assert "synergy ui" in page.text
        finally:
            proc.send_signal(signal.SIGTERM)
            proc.wait(timeout=10)

    def test_cli_and_service_agree(self, snap_path, tmp_path):
        doc = run_json(tmp_path, ["recommend", "--snap", snap_path, "--allies", "a"])
        port = _free_port()
        proc = subprocess.Popen(
            [sys.executable, "-m", "synergy.cli", "serve", "--snap", snap_path],
            env=dict(os.environ, SYNERGY_PORT=str(port)),
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
        )
        try:
            _wait_for(f"http://127.0.0.1:{port}/api/health", proc)
            http = httpx.post(
                f"http://127.0.0.1:{port}/api/recommend",
                json={"allies": ["a"]},
                timeout=5.0,
            ).json()["recommendations"]
        finally:
            proc.send_signal(signal.SIGTERM)
            proc.wait(timeout=10)
        cli_recs = doc["recommendations"]
        assert [r["candidate"] for r in http] == [r["candidate"] for r in cli_recs]
        for h, c in zip(http, cli_recs):
            assert h["total_score"] == c["total_score"]  # same floats exactly
            assert h["low_confidence"] == c["low_confidence"]
