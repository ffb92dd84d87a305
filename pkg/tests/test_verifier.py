import pytest

from pairfuzz.corpus import make_record
from pairfuzz.protocol import MockExecutor, ScriptedOutcome, Status, Tolerance
from pairfuzz.synthesizer import synthesize_by_matching
from pairfuzz.values import vint
from pairfuzz.verifier import (
    Verdict,
    classify_evidence,
    compare_values,
    status_only_verdict,
    verify_pair,
)
from tests.conftest import entry


def identity_setup():
    s = entry("m.src", [("x", {"int"})])
    t = entry("m.tgt", [("x", {"int"})])
    plan = synthesize_by_matching(s, t)
    entries = {"m.src": s, "m.tgt": t}
    inputs = [make_record("m.src", [vint(i)]) for i in range(4)]
    return plan, entries, inputs


class TestVerifyPair:
    def test_all_equal_gives_value_equivalent(self):
        plan, entries, inputs = identity_setup()
        result = verify_pair(plan, inputs, MockExecutor(default=ScriptedOutcome()),
                             Tolerance(), entries=entries)
        assert result.verdict is Verdict.VALUE_EQUIVALENT
        assert len(result.evidence) == 4

    def test_value_mismatch_downgrades_to_status_equivalent(self):
        plan, entries, inputs = identity_setup()
        mock = MockExecutor(
            {("m.tgt", None): ScriptedOutcome(value="different")},
            default=ScriptedOutcome(),
        )
        result = verify_pair(plan, inputs, mock, Tolerance(), entries=entries)
        assert result.verdict is Verdict.STATUS_EQUIVALENT

    def test_status_mismatch_rejects(self):
        from pairfuzz.values import values_hash

        plan, entries, inputs = identity_setup()
        bad_hash = values_hash(list(inputs[2].positional), {})
        mock = MockExecutor(
            {("m.tgt", bad_hash): ScriptedOutcome(status=Status.EXCEPTION, exception_class="TypeError")},
            default=ScriptedOutcome(),
        )
        result = verify_pair(plan, inputs, mock, Tolerance(), entries=entries)
        assert result.verdict is Verdict.REJECTED
        mismatches = [e for e in result.evidence if not e.statuses_match]
        assert mismatches and mismatches[0].exception_class_t == "TypeError"

    def test_successful_target_invocations_reported_for_insertion(self):
        plan, entries, inputs = identity_setup()
        result = verify_pair(
            plan, inputs, MockExecutor(default=ScriptedOutcome()), Tolerance(),
            entries=entries, iteration=3,
        )
        assert len(result.success_target_records) == 4
        rec = result.success_target_records[0]
        assert rec.api == "m.tgt"
        assert rec.positional == (vint(0),)
        assert rec.origin == "synthesized@iteration-3"

    def test_exception_on_target_yields_no_insertable_record(self):
        plan, entries, inputs = identity_setup()
        mock = MockExecutor(
            {("m.tgt", None): ScriptedOutcome(status=Status.EXCEPTION, exception_class="E")},
            default=ScriptedOutcome(),
        )
        result = verify_pair(plan, inputs, mock, Tolerance(), entries=entries)
        assert result.success_target_records == []

    def test_empty_inputs_rejected(self):
        plan, entries, _ = identity_setup()
        with pytest.raises(ValueError):
            verify_pair(plan, [], MockExecutor(default=ScriptedOutcome()),
                        Tolerance(), entries=entries)

    def test_skip_value_check_caps_at_status_equivalent(self):
        plan, entries, inputs = identity_setup()
        result = verify_pair(
            plan, inputs, MockExecutor(default=ScriptedOutcome()), Tolerance(),
            entries=entries, skip_value_check=True,
        )
        assert result.verdict is Verdict.STATUS_EQUIVALENT

    def test_verdict_deterministic_for_fixed_evidence(self):
        plan, entries, inputs = identity_setup()
        results = [
            verify_pair(plan, inputs, MockExecutor(default=ScriptedOutcome()),
                        Tolerance(), entries=entries).verdict
            for _ in range(3)
        ]
        assert results == [Verdict.VALUE_EQUIVALENT] * 3

    def test_value_equivalent_implies_status_equal_on_same_evidence(self):
        plan, entries, inputs = identity_setup()
        result = verify_pair(plan, inputs, MockExecutor(default=ScriptedOutcome()),
                             Tolerance(), entries=entries)
        assert result.verdict is Verdict.VALUE_EQUIVALENT
        assert status_only_verdict(result.evidence) is Verdict.STATUS_EQUIVALENT


def tsum(values, dtype="f32", shape=None):
    shape = shape if shape is not None else [len(values)]
    return {
        "kind": "tensor",
        "dtype": dtype,
        "shape": shape,
        "count": len(values),
        "first": list(values),
    }


class TestCompareValues:
    def test_identical_integer_tensors(self):
        a = tsum([1, 2, 3], dtype="i64")
        assert compare_values(a, tsum([1, 2, 3], dtype="i64"), Tolerance())

    def test_close_floats_within_default_tolerance(self):
        # |0.4080 - 0.4082| = 2e-4 <= 1e-6 + 1e-3 * 0.4082, so the rule says equal
        a = {"kind": "number", "value": 0.4080}
        b = {"kind": "number", "value": 0.4082}
        assert compare_values(a, b, Tolerance(rtol=1e-3, atol=1e-6)) is True

    def test_same_floats_not_equal_under_tighter_rtol(self):
        a = {"kind": "number", "value": 0.4080}
        b = {"kind": "number", "value": 0.4082}
        assert compare_values(a, b, Tolerance(rtol=1e-4, atol=1e-6)) is False

    def test_same_values_different_dtype_not_equal(self):
        assert not compare_values(
            tsum([1.0, 2.0], dtype="f32"), tsum([1.0, 2.0], dtype="f64"), Tolerance()
        )

    def test_shape_mismatch_not_equal(self):
        assert not compare_values(
            tsum([1.0, 2.0], shape=[2]), tsum([1.0, 2.0], shape=[1, 2]), Tolerance()
        )

    def test_int_dtype_compares_exactly(self):
        assert not compare_values(
            tsum([1, 2], dtype="i32"), tsum([1, 3], dtype="i32"), Tolerance(rtol=10.0, atol=10.0)
        )

    def test_nested_lists_compare_structurally(self):
        a = {"kind": "list", "items": [tsum([0.5]), {"kind": "number", "value": 1.0}]}
        b = {"kind": "list", "items": [tsum([0.5]), {"kind": "number", "value": 1.0}]}
        assert compare_values(a, b, Tolerance())
        b["items"].append(tsum([2.0]))
        assert not compare_values(a, b, Tolerance())

    def test_truncated_prefix_falls_back_to_hash(self):
        a = dict(tsum([1.0] * 8), count=100, hash="aaaa")
        b = dict(tsum([1.0] * 8), count=100, hash="bbbb")
        assert not compare_values(a, b, Tolerance())
        assert compare_values(a, dict(a), Tolerance())


class TestClassifyEvidence:
    def test_rejected_requires_a_mismatch_witness(self):
        from pairfuzz.verifier import Evidence

        ev = [
            Evidence(0, Status.SUCCESS, Status.SUCCESS, True),
            Evidence(1, Status.EXCEPTION, Status.EXCEPTION, None),
        ]
        assert classify_evidence(ev) is Verdict.VALUE_EQUIVALENT
        ev.append(Evidence(2, Status.SUCCESS, Status.CRASH, None))
        assert classify_evidence(ev) is Verdict.REJECTED
        assert any(not e.statuses_match for e in ev)

    def test_crash_is_not_exception(self):
        from pairfuzz.verifier import Evidence

        ev = [Evidence(0, Status.EXCEPTION, Status.CRASH, None)]
        assert classify_evidence(ev) is Verdict.REJECTED
