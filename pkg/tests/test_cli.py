import json

import pytest

from pairfuzz import cli
from tests.conftest import FIXTURES, ROOT

CORPUS = str(FIXTURES / "mini_corpus.json")
MOCK = f"mock:{FIXTURES / 'mini_mock_script.json'}"


def run_cli(args):
    return cli.main(args)


class TestStaticCommands:
    def test_match_writes_candidates(self, tmp_path):
        out = tmp_path / "pairs.json"
        assert run_cli(["match", "--corpus", CORPUS, "--out", str(out)]) == 0
        pairs = json.loads(out.read_text())
        assert {"source", "target", "score", "channel"} <= set(pairs[0])
        assert any(p["channel"] == "template" for p in pairs)

    def test_synth_writes_plans(self, tmp_path):
        out = tmp_path / "plans.json"
        assert run_cli(["synth", "--corpus", CORPUS, "--out", str(out)]) == 0
        plans = json.loads(out.read_text())
        assert any(p["kind"] == "template" and "template" in p for p in plans)
        assert any(p["kind"] == "arg-match" for p in plans)

    def test_match_respects_top_k(self, tmp_path):
        out = tmp_path / "pairs.json"
        assert run_cli(["match", "--corpus", CORPUS, "--top-k", "1", "--out", str(out)]) == 0
        pairs = json.loads(out.read_text())
        ranked = [p for p in pairs if p["channel"] != "template"]
        per_source = {}
        for p in ranked:
            per_source[p["source"]] = per_source.get(p["source"], 0) + 1
        assert max(per_source.values()) == 1


class TestExecutorCommands:
    def test_verify_single_iteration(self, tmp_path):
        out = tmp_path / "verify.json"
        code = run_cli(
            ["verify", "--corpus", CORPUS, "--executor-cmd", MOCK, "--out", str(out)]
        )
        assert code == 0
        obj = json.loads(out.read_text())
        assert obj["iteration"]["index"] == 1
        assert obj["verified_pairs"]
        assert obj["inconsistencies"] == []

    def test_run_produces_report_and_exit_zero_when_clean(self, tmp_path):
        out = tmp_path / "report.json"
        code = run_cli(
            [
                "run", "--corpus", CORPUS, "--executor-cmd", MOCK,
                "--seed", "42", "--fuzz-count", "50", "--out", str(out),
            ]
        )
        assert code == 0
        report = json.loads(out.read_text())
        assert report["coverage"]["final"] >= report["coverage"]["initial"]
        assert report["iterations"]

    def test_timings_sidecar_keeps_report_deterministic(self, tmp_path):
        out = tmp_path / "report.json"
        timings = tmp_path / "timings.json"
        code = run_cli(
            [
                "run", "--corpus", CORPUS, "--executor-cmd", MOCK,
                "--seed", "42", "--fuzz-count", "10",
                "--out", str(out), "--timings", str(timings),
            ]
        )
        assert code == 0
        assert "timings" not in json.loads(out.read_text())["iterations"][0]
        recorded = json.loads(timings.read_text())["iterations"][0]["timings"]
        assert {"match", "synthesize", "verify", "fuzz"} <= set(recorded)

    def test_missing_corpus_is_exit_two(self, tmp_path):
        code = run_cli(
            ["run", "--corpus", str(tmp_path / "nope.json"), "--executor-cmd", MOCK]
        )
        assert code == 2

    def test_fuzz_findings_give_exit_one(self, tmp_path):
        # two-API corpus; the scripted death lands inside the fuzzing phase,
        # surfacing as a crash-status inconsistency
        apis = [
            {
                "name": name,
                "args": [{"name": "x", "position": 0, "optional": False, "observed_types": ["int"]}],
                "description": "adds numbers together",
                "code_blocks": [],
            }
            for name in ("lib.alpha", "lib.beta")
        ]
        invocations = [
            {"api": "lib.alpha", "positional": [{"kind": "int", "value": i}], "keyword": {}}
            for i in range(2)
        ]
        corpus = tmp_path / "two.json"
        corpus.write_text(json.dumps({"apis": apis, "invocations": invocations}))
        script = tmp_path / "script.json"
        script.write_text(json.dumps({"default": {"status": "success", "value": "=input"},
                                      "die_on_requests": [5]}))
        out = tmp_path / "report.json"
        code = run_cli(
            [
                "run", "--corpus", str(corpus), "--executor-cmd", f"mock:{script}",
                "--fuzz-count", "10", "--out", str(out),
            ]
        )
        assert code == 1
        report = json.loads(out.read_text())
        assert report["inconsistencies"]
        assert report["inconsistencies"][0]["status_t"] == "crash"


class TestGoldenReport:
    def test_report_matches_golden_fixture(self, monkeypatch, tmp_path):
        monkeypatch.chdir(ROOT)
        out = tmp_path / "report.json"
        code = run_cli(
            [
                "run",
                "--corpus", "fixtures/mini_corpus.json",
                "--executor-cmd", "mock:fixtures/mini_mock_script.json",
                "--seed", "42", "--fuzz-count", "50",
                "--out", str(out),
            ]
        )
        assert code == 0
        golden = (ROOT / "fixtures" / "golden_mock_report.json").read_bytes()
        assert out.read_bytes() == golden
