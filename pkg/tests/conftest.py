import json
from pathlib import Path

import pytest

from synergy import ingest_match_log, load_card_set

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_bytes(name: str) -> bytes:
    return (FIXTURES / name).read_bytes()


def fixture_json(name: str):
    return json.loads(fixture_bytes(name))


@pytest.fixture(scope="session")
def synthetic_a_log():
    result = ingest_match_log(fixture_bytes("synthetic_a.jsonl"))
    assert not result.rejects
    return result.log


@pytest.fixture(scope="session")
def synthetic_a_table():
    return fixture_json("synthetic_a_table.json")


@pytest.fixture(scope="session")
def chess_log():
    result = ingest_match_log(fixture_bytes("chess50.jsonl"))
    assert not result.rejects
    return result.log


@pytest.fixture(scope="session")
def chess_table():
    return fixture_json("chess50_table.json")


@pytest.fixture(scope="session")
def cards10():
    return load_card_set(fixture_bytes("cards10.json"))


@pytest.fixture(scope="session")
def cards10_table():
    return fixture_json("cards10_dpm_table.json")
