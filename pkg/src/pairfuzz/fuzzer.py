"""Mutation-based fuzzing of verified pairs.

Mutants are derived from traced valid inputs by applying one rule to one
argument.  Rules are type-preserving with weighted boundary injections
(zeros, -1, negative dims, empty shapes, extreme magnitudes).  Every RNG
stream is derived from (campaign seed, pair identity), so pairs can fuzz
concurrently without perturbing reproducibility.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .corpus import ApiEntry, InvocationRecord, make_record
from .protocol import Status, Tolerance
from .synthesizer import InvocationPlan
from .values import ValueRepr, canonical_json, tensor, vint, vlist
from .verifier import Verdict, build_paired_request

INT_BOUNDARIES = (0, 1, -1, 2**31 - 1, -(2**31), 4096)
FLOAT_BOUNDARIES = (0.0, -1.0, 1.0, 1e308, -1e308, 1e-308)
FLOAT_SPECIALS = (float("nan"), float("inf"), float("-inf"))
STRING_POOL = ("", "a", "f32", "f64", "i32", "i64", "bool", "xyz", "A" * 64, "ünïcode")
DIM_BOUNDARIES = (0, -1, 1)


@dataclass(frozen=True)
class MutationConfig:
    """Knobs for the rule set; NaN/Inf injection stays off by default."""

    inject_nan: bool = False


def derive_rng(seed: int, *scope: str) -> random.Random:
    """Independent deterministic stream for (seed, scope...)."""
    h = hashlib.sha256(("|".join([str(seed), *scope])).encode("utf-8")).digest()
    return random.Random(int.from_bytes(h[:8], "big"))


def _mutate_int(v: int, rng: random.Random) -> int:
    if rng.random() < 0.5:
        return rng.choice(INT_BOUNDARIES)
    return v + rng.choice((-2, -1, 1, 2, v or 1))


def _mutate_float(v: float, rng: random.Random, config: MutationConfig) -> float:
    pool = FLOAT_BOUNDARIES + (FLOAT_SPECIALS if config.inject_nan else ())
    if rng.random() < 0.5:
        return rng.choice(pool)
    return v * rng.choice((-1.0, 0.5, 2.0, 10.0)) + rng.choice((0.0, 1.0))


def _mutate_shape(shape: tuple[int, ...], rng: random.Random) -> list[int]:
    shape_l = list(shape)
    choice = rng.random()
    if shape_l and choice < 0.6:
        i = rng.randrange(len(shape_l))
        if rng.random() < 0.5:
            shape_l[i] = rng.choice(DIM_BOUNDARIES)
        else:
            shape_l[i] = shape_l[i] * 2 + 1
    elif choice < 0.8:
        shape_l.append(rng.choice((1, 2, 3)))
    elif shape_l:
        shape_l.pop(rng.randrange(len(shape_l)))
    else:
        shape_l = [rng.choice(DIM_BOUNDARIES)]
    return shape_l


def _mutate_tensor(v: ValueRepr, rng: random.Random, config: MutationConfig) -> ValueRepr:
    rule = rng.choice(("tensor-shape", "tensor-dtype", "tensor-content"))
    if rule == "tensor-shape":
        # element count changes, so content degrades to a fresh seeded fill
        return tensor(_mutate_shape(v.shape, rng), v.dtype, seed=rng.getrandbits(31))
    if rule == "tensor-dtype":
        others = [d for d in ("f32", "f64", "i32", "i64", "bool") if d != v.dtype]
        new_dtype = rng.choice(others)
        if v.content is not None:
            return tensor(list(v.shape), new_dtype, values=list(v.content))
        return tensor(list(v.shape), new_dtype, seed=v.seed)
    if v.content is None or not v.content:
        return tensor(list(v.shape), v.dtype, seed=rng.getrandbits(31))
    values = list(v.content)
    i = rng.randrange(len(values))
    values[i] = _mutate_float(values[i], rng, config)
    return tensor(list(v.shape), v.dtype, values=values)


def mutate(v: ValueRepr, rng: random.Random, config: MutationConfig = MutationConfig()) -> ValueRepr:
    """Apply one applicable mutation rule; same seed and input give the same mutant."""
    k = v.kind
    if k == "int":
        return vint(_mutate_int(v.value, rng))
    if k == "float":
        return ValueRepr("float", _mutate_float(v.value, rng, config))
    if k == "bool":
        return ValueRepr("bool", not v.value)
    if k == "str":
        return ValueRepr("str", rng.choice(STRING_POOL))
    if k == "tensor":
        return _mutate_tensor(v, rng, config)
    if k == "list":
        if not v.items:
            return vlist([vint(rng.choice(INT_BOUNDARIES))])
        items = list(v.items)
        choice = rng.random()
        if choice < 0.25:  # drop
            items.pop(rng.randrange(len(items)))
        elif choice < 0.5:  # duplicate
            items.append(items[rng.randrange(len(items))])
        else:  # recurse into one element
            i = rng.randrange(len(items))
            items[i] = mutate(items[i], rng, config)
        return vlist(items)
    if k == "tuple":
        if not v.items:
            return v
        items = list(v.items)
        i = rng.randrange(len(items))
        items[i] = mutate(items[i], rng, config)
        return ValueRepr("tuple", items=tuple(items))
    # none / raw: no applicable rule
    return v


def mutate_record(
    record: InvocationRecord, rng: random.Random, config: MutationConfig = MutationConfig()
) -> InvocationRecord:
    """Mutate one argument (positional or keyword) of a traced invocation."""
    slots: list[tuple[str, int | str]] = [("pos", i) for i in range(len(record.positional))]
    slots += [("kw", k) for k, _ in record.keyword]
    if not slots:
        return record
    kind, key = slots[rng.randrange(len(slots))]
    positional = list(record.positional)
    keyword = dict(record.keyword)
    if kind == "pos":
        positional[key] = mutate(positional[key], rng, config)  # type: ignore[index]
    else:
        keyword[key] = mutate(keyword[key], rng, config)  # type: ignore[index]
    return make_record(record.api, positional, keyword, origin=record.origin)


@dataclass(frozen=True)
class Inconsistency:
    """One deduplicated disagreement between a verified pair's two sides."""

    source: str
    target: str
    kind: str
    channel: str
    oracle: str  # value | status
    input: InvocationRecord
    status_s: Status
    status_t: Status
    exception_class_s: str | None
    exception_class_t: str | None
    value_summary_s: dict | None
    value_summary_t: dict | None
    dedup_key: str

    def to_obj(self) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "kind": self.kind,
            "channel": self.channel,
            "oracle": self.oracle,
            "input": self.input.to_obj(),
            "status_s": self.status_s.value,
            "status_t": self.status_t.value,
            "exception_class_s": self.exception_class_s,
            "exception_class_t": self.exception_class_t,
            "value_summary_s": self.value_summary_s,
            "value_summary_t": self.value_summary_t,
            "dedup_key": self.dedup_key,
        }


def _dedup_key(plan: InvocationPlan, oracle: str, resp) -> str:
    payload = canonical_json(
        {
            "source": plan.source,
            "target": plan.target,
            "oracle": oracle,
            "status_s": resp.status_s.value,
            "status_t": resp.status_t.value,
            "exception_class_s": resp.exception_class_s,
            "exception_class_t": resp.exception_class_t,
        }
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def fuzz_pair(
    plan: InvocationPlan,
    verdict: Verdict,
    seeds: Sequence[InvocationRecord],
    n: int,
    executor,
    tolerance: Tolerance,
    *,
    entries: Mapping[str, ApiEntry],
    campaign_seed: int = 0,
    config: MutationConfig = MutationConfig(),
    skip_value_check: bool = False,
    request_ids=None,
    timeout_ms: int = 5000,
) -> list[Inconsistency]:
    """Generate up to n mutants cycling over seeds and report disagreements.

    Value-equivalent pairs are checked for both value and status agreement;
    status-equivalent pairs for status agreement only.  Findings dedupe on
    (pair, oracle, status signature, exception classes).
    """
    if verdict not in (Verdict.VALUE_EQUIVALENT, Verdict.STATUS_EQUIVALENT):
        raise ValueError(f"fuzz_pair needs a verified pair, got {verdict}")
    if not seeds:
        return []
    rng = derive_rng(campaign_seed, plan.source, plan.target, plan.kind)
    check_values = verdict is Verdict.VALUE_EQUIVALENT and not skip_value_check
    found: dict[str, Inconsistency] = {}
    for i in range(n):
        base = seeds[i % len(seeds)]
        mutant = mutate_record(base, rng, config)
        req_id = next(request_ids) if request_ids is not None else i
        req = build_paired_request(plan, mutant, entries, req_id, tolerance, timeout_ms)
        resp = executor.call_paired(req)
        if resp.status_s is not resp.status_t:
            oracle = "status"
        elif check_values and resp.value_equal is False:
            oracle = "value"
        else:
            continue
        key = _dedup_key(plan, oracle, resp)
        if key in found:
            continue
        found[key] = Inconsistency(
            source=plan.source,
            target=plan.target,
            kind=plan.kind,
            channel=plan.channel,
            oracle=oracle,
            input=mutant,
            status_s=resp.status_s,
            status_t=resp.status_t,
            exception_class_s=resp.exception_class_s,
            exception_class_t=resp.exception_class_t,
            value_summary_s=resp.value_summary_s,
            value_summary_t=resp.value_summary_t,
            dedup_key=key,
        )
    return [found[k] for k in sorted(found)]
