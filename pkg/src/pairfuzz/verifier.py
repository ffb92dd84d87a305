"""Dynamic verification of candidate pairs over traced valid inputs.

Value equivalence is checked first; if any input breaks it but all statuses
still agree, the pair degrades to status equivalence; any status mismatch
rejects the pair.  Crashes never abort the campaign: a crash on one side is
a status mismatch (and an independent bug candidate).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .corpus import ApiEntry, InvocationRecord, make_record
from .protocol import PairedRequest, PairedResponse, Status, Tolerance
from .synthesizer import InvocationPlan, build_target_invocation

__all__ = [
    "Status",
    "Verdict",
    "Evidence",
    "PairVerdict",
    "build_paired_request",
    "verify_pair",
    "status_only_verdict",
    "compare_values",
]


class Verdict(str, enum.Enum):
    VALUE_EQUIVALENT = "value_equivalent"
    STATUS_EQUIVALENT = "status_equivalent"
    REJECTED = "rejected"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Evidence:
    """Outcome of one verifying input."""

    input_index: int
    status_s: Status
    status_t: Status
    value_equal: bool | None
    exception_class_s: str | None = None
    exception_class_t: str | None = None
    crash_tag_s: str | None = None
    crash_tag_t: str | None = None

    @property
    def statuses_match(self) -> bool:
        return self.status_s is self.status_t

    def to_obj(self) -> dict:
        obj = {
            "input_index": self.input_index,
            "status_s": self.status_s.value,
            "status_t": self.status_t.value,
        }
        if self.value_equal is not None:
            obj["value_equal"] = self.value_equal
        for name in ("exception_class_s", "exception_class_t", "crash_tag_s", "crash_tag_t"):
            v = getattr(self, name)
            if v is not None:
                obj[name] = v
        return obj


@dataclass
class PairVerdict:
    verdict: Verdict
    evidence: list[Evidence] = field(default_factory=list)
    # Target invocations that succeeded, reported for database insertion
    # when the target API is newly covered.
    success_target_records: list[InvocationRecord] = field(default_factory=list)


def build_paired_request(
    plan: InvocationPlan,
    record: InvocationRecord,
    entries: Mapping[str, ApiEntry],
    req_id: int,
    tolerance: Tolerance,
    timeout_ms: int,
) -> PairedRequest:
    positional, keyword = build_target_invocation(
        plan, entries[plan.source], entries[plan.target], record
    )
    return PairedRequest(
        id=req_id,
        source_api=record.api,
        source_positional=tuple(record.positional),
        source_keyword=record.keyword,
        target_api=plan.target,
        target_positional=tuple(positional),
        target_keyword=tuple(sorted(keyword.items())),
        tolerance=tolerance,
        timeout_ms=timeout_ms,
    )


def _evidence_from_response(index: int, resp: PairedResponse) -> Evidence:
    return Evidence(
        input_index=index,
        status_s=resp.status_s,
        status_t=resp.status_t,
        value_equal=resp.value_equal,
        exception_class_s=resp.exception_class_s,
        exception_class_t=resp.exception_class_t,
        crash_tag_s=resp.crash_tag_s,
        crash_tag_t=resp.crash_tag_t,
    )


def classify_evidence(evidence: Sequence[Evidence], *, skip_value_check: bool = False) -> Verdict:
    """Defs of the two equivalences applied to collected evidence."""
    if any(not e.statuses_match for e in evidence):
        return Verdict.REJECTED
    if skip_value_check:
        return Verdict.STATUS_EQUIVALENT
    if all(e.value_equal is not False for e in evidence):
        return Verdict.VALUE_EQUIVALENT
    return Verdict.STATUS_EQUIVALENT


def status_only_verdict(evidence: Sequence[Evidence]) -> Verdict:
    """The status-equivalence rule alone, used to replay the lattice property."""
    if any(not e.statuses_match for e in evidence):
        return Verdict.REJECTED
    return Verdict.STATUS_EQUIVALENT


def verify_pair(
    plan: InvocationPlan,
    inputs: Sequence[InvocationRecord],
    executor,
    tolerance: Tolerance,
    *,
    entries: Mapping[str, ApiEntry],
    skip_value_check: bool = False,
    request_ids=None,
    timeout_ms: int = 5000,
    iteration: int = 1,
) -> PairVerdict:
    """Run the plan over verifying inputs and classify the pair.

    Every successful target invocation is also reported back (as a record
    tagged with the synthesizing iteration) so the driver can insert it for
    newly covered target APIs.
    """
    if not inputs:
        raise ValueError("verify_pair requires at least one verifying input")
    evidence: list[Evidence] = []
    successes: list[InvocationRecord] = []
    for index, record in enumerate(inputs):
        req_id = next(request_ids) if request_ids is not None else index
        req = build_paired_request(plan, record, entries, req_id, tolerance, timeout_ms)
        resp = executor.call_paired(req)
        evidence.append(_evidence_from_response(index, resp))
        if resp.status_t is Status.SUCCESS:
            successes.append(
                make_record(
                    plan.target,
                    positional=req.target_positional,
                    keyword=dict(req.target_keyword),
                    origin=f"synthesized@iteration-{iteration}",
                )
            )
    verdict = classify_evidence(evidence, skip_value_check=skip_value_check)
    return PairVerdict(verdict=verdict, evidence=evidence, success_target_records=successes)


# ---------------------------------------------------------------------------
# Summary-level value comparison
# ---------------------------------------------------------------------------

_FLOAT_DTYPES = {"f32", "f64"}


def _close(x: float, y: float, tol: Tolerance) -> bool:
    if x == y:
        return True
    return abs(x - y) <= tol.atol + tol.rtol * abs(y)


def compare_values(a: dict | None, b: dict | None, tol: Tolerance) -> bool:
    """Equality of two value summaries under the float tolerance rule.

    Non-float kinds compare structurally; float content compares elementwise
    as |x-y| <= atol + rtol*|y|; shape and dtype must match exactly.  When a
    tensor summary truncates its element prefix, the content hash decides
    the tail (exactly), which is the best a summary can do.
    """
    if a is None or b is None:
        return a == b
    ka, kb = a.get("kind"), b.get("kind")
    if ka != kb:
        return False
    if ka == "tensor":
        if a.get("dtype") != b.get("dtype"):
            return False
        if list(a.get("shape", [])) != list(b.get("shape", [])):
            return False
        if a.get("count") != b.get("count"):
            return False
        fa, fb = list(a.get("first", [])), list(b.get("first", []))
        if len(fa) != len(fb):
            return False
        if a.get("dtype") in _FLOAT_DTYPES:
            if not all(_close(x, y, tol) for x, y in zip(fa, fb)):
                return False
        elif fa != fb:
            return False
        truncated = a.get("count", len(fa)) > len(fa)
        if truncated and a.get("hash") != b.get("hash"):
            return False
        return True
    if ka == "number":
        return _close(float(a.get("value")), float(b.get("value")), tol)
    if ka in ("list", "tuple"):
        ia, ib = a.get("items", []), b.get("items", [])
        if len(ia) != len(ib):
            return False
        return all(compare_values(x, y, tol) for x, y in zip(ia, ib))
    if ka == "opaque":
        return a.get("token") == b.get("token")
    # bool / str / none and anything future: structural equality
    return a == b
