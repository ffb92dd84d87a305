import json

import pytest

from pairfuzz.corpus import (
    CorpusError,
    dump_corpus,
    load_corpus,
    make_record,
    record_new_invocation,
    valid_invocations,
)
from pairfuzz.values import vint


def write_corpus(tmp_path, obj):
    p = tmp_path / "corpus.json"
    p.write_text(json.dumps(obj), encoding="utf-8")
    return p


MINIMAL_API = {
    "name": "lib.f",
    "args": [{"name": "x", "position": 0, "optional": False, "observed_types": ["int"]}],
    "description": "Does f.",
    "code_blocks": [],
}


def test_shipped_fixture_loads_with_expected_entry_count(mini_corpus_path):
    db = load_corpus(mini_corpus_path)
    # count pinned against the shipped fixture
    assert len(db.entries) == 32
    assert db.covered == {a for a, recs in db.invocations.items() if recs}


def test_empty_corpus(tmp_path):
    db = load_corpus(write_corpus(tmp_path, {"apis": [], "invocations": []}))
    assert len(db.entries) == 0
    assert db.covered == set()


def test_invocation_for_unknown_api_is_a_load_error(tmp_path):
    obj = {
        "apis": [MINIMAL_API],
        "invocations": [{"api": "lib.g", "positional": [], "keyword": {}, "origin": "seed"}],
    }
    with pytest.raises(CorpusError, match="unknown api"):
        load_corpus(write_corpus(tmp_path, obj))


def test_duplicate_api_name_is_a_load_error(tmp_path):
    with pytest.raises(CorpusError, match="duplicate"):
        load_corpus(write_corpus(tmp_path, {"apis": [MINIMAL_API, MINIMAL_API], "invocations": []}))


def test_extra_keyword_rejected_at_load(tmp_path):
    obj = {
        "apis": [MINIMAL_API],
        "invocations": [
            {"api": "lib.f", "positional": [], "keyword": {"nope": {"kind": "int", "value": 1}}}
        ],
    }
    with pytest.raises(CorpusError, match="unknown keyword"):
        load_corpus(write_corpus(tmp_path, obj))


def test_round_trip(mini_corpus_path, tmp_path):
    db = load_corpus(mini_corpus_path)
    dumped = tmp_path / "dump.json"
    dumped.write_text(dump_corpus(db), encoding="utf-8")
    db2 = load_corpus(dumped)
    assert db2.entries == db.entries
    assert db2.invocations == db.invocations


def test_valid_invocations_caps_and_preserves_order(tmp_path):
    obj = {
        "apis": [MINIMAL_API],
        "invocations": [
            {"api": "lib.f", "positional": [{"kind": "int", "value": i}], "keyword": {}}
            for i in range(150)
        ],
    }
    db = load_corpus(write_corpus(tmp_path, obj))
    first = valid_invocations(db, "lib.f", 100)
    assert len(first) == 100
    assert [r.positional[0].value for r in first] == list(range(100))
    # repeated reads with no writes are identical
    assert valid_invocations(db, "lib.f", 100) == first


def test_valid_invocations_returns_all_when_fewer_exist(tmp_path):
    obj = {
        "apis": [MINIMAL_API],
        "invocations": [
            {"api": "lib.f", "positional": [{"kind": "int", "value": i}], "keyword": {}}
            for i in range(3)
        ],
    }
    db = load_corpus(write_corpus(tmp_path, obj))
    assert len(valid_invocations(db, "lib.f", 100)) == 3


def test_valid_invocations_empty_and_unknown(tmp_path):
    db = load_corpus(write_corpus(tmp_path, {"apis": [MINIMAL_API], "invocations": []}))
    assert valid_invocations(db, "lib.f", 100) == []
    with pytest.raises(CorpusError):
        valid_invocations(db, "lib.nope", 100)


def test_record_new_invocation_reports_new_coverage(tmp_path):
    db = load_corpus(write_corpus(tmp_path, {"apis": [MINIMAL_API], "invocations": []}))
    rec = make_record("lib.f", [vint(1)])
    assert record_new_invocation(db, rec) is True
    assert record_new_invocation(db, make_record("lib.f", [vint(2)])) is False
    with pytest.raises(CorpusError):
        record_new_invocation(db, make_record("lib.missing", []))


def test_coverage_is_monotone_under_appends(tmp_path):
    apis = [dict(MINIMAL_API, name=f"lib.f{i}") for i in range(5)]
    db = load_corpus(write_corpus(tmp_path, {"apis": apis, "invocations": []}))
    sizes = [len(db.covered)]
    for i in range(5):
        record_new_invocation(db, make_record(f"lib.f{i}", [vint(i)]))
        sizes.append(len(db.covered))
    assert sizes == sorted(sizes)


def test_missing_required_argument_rejected(tmp_path):
    obj = {
        "apis": [MINIMAL_API],
        "invocations": [{"api": "lib.f", "positional": [], "keyword": {}}],
    }
    with pytest.raises(CorpusError, match="required"):
        load_corpus(write_corpus(tmp_path, obj))
