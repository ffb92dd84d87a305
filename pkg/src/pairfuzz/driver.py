"""Campaign orchestration: match, synthesize, verify, fuzz, iterate.

Each iteration runs the four phases over the current source APIs.  Target
invocations that succeed during verification are inserted into the database
for target APIs uncovered at the start of the iteration; the newly covered
APIs become the next iteration's sources.  The loop stops at the iteration
cap or as soon as an iteration covers nothing new.
"""

from __future__ import annotations

import itertools
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from queue import Queue
from typing import Any, Callable

from .corpus import CorpusDb, load_corpus, record_new_invocation, valid_invocations
from .fuzzer import Inconsistency, MutationConfig, fuzz_pair
from .matcher import DescriptionTfIdfEmbedder, PrecomputedEmbedder, top_k_pairs
from .protocol import DEFAULT_TIMEOUT_MS, ExecutorClient, MockExecutor, Tolerance
from .synthesizer import (
    InvocationPlan,
    extract_templates,
    plan_from_template,
    synthesize_by_matching,
)
from .verifier import PairVerdict, Verdict, verify_pair

log = logging.getLogger(__name__)


class LabelsError(Exception):
    """The ground-truth labels file cannot judge the reported pairs."""


@dataclass
class CampaignConfig:
    corpus_path: str
    k: int = 10
    iterations: int = 10
    verify_cap: int = 100
    fuzz_count: int = 1000
    seed: int = 0
    tolerance: Tolerance = Tolerance()
    executor_cmd: str | None = None
    workers: int = 1
    embeddings_path: str | None = None
    labels_path: str | None = None
    out_path: str | None = None
    timings_path: str | None = None
    timeout_ms: int = DEFAULT_TIMEOUT_MS
    max_restarts: int = 10
    mutation: MutationConfig = field(default_factory=MutationConfig)

    def __post_init__(self) -> None:
        if self.k < 1 or self.iterations < 1:
            raise ValueError("k and iterations must be >= 1")


@dataclass
class PlanOutcome:
    plan: InvocationPlan
    iteration: int
    result: PairVerdict


@dataclass
class IterationStats:
    index: int
    sources: list[str]
    candidates: int
    plans: int
    aborted: int
    verdicts: dict[str, int]
    newly_covered: list[str]
    inconsistencies: int
    timings: dict[str, float] = field(default_factory=dict)

    def to_obj(self, include_timings: bool = False) -> dict[str, Any]:
        obj: dict[str, Any] = {
            "index": self.index,
            "sources": self.sources,
            "candidate_pairs": self.candidates,
            "plans": self.plans,
            "aborted": self.aborted,
            "verified_pairs": self.verdicts,
            "newly_covered": self.newly_covered,
            "inconsistencies": self.inconsistencies,
        }
        if include_timings:
            obj["timings"] = self.timings
        return obj


@dataclass
class CampaignReport:
    config: CampaignConfig
    iterations: list[IterationStats] = field(default_factory=list)
    outcomes: list[PlanOutcome] = field(default_factory=list)
    inconsistencies: list[Inconsistency] = field(default_factory=list)
    initial_covered: list[str] = field(default_factory=list)
    final_covered: list[str] = field(default_factory=list)
    fpr: dict[str, Any] | None = None

    def pair_verdicts(self) -> dict[tuple[str, str], Verdict]:
        """Best verdict per (source, target) over all its plans."""
        rank = {Verdict.VALUE_EQUIVALENT: 2, Verdict.STATUS_EQUIVALENT: 1, Verdict.REJECTED: 0}
        best: dict[tuple[str, str], Verdict] = {}
        for o in self.outcomes:
            key = (o.plan.source, o.plan.target)
            v = o.result.verdict
            if key not in best or rank[v] > rank[best[key]]:
                best[key] = v
        return best

    def to_obj(self) -> dict[str, Any]:
        return {
            "config": {
                "corpus": self.config.corpus_path,
                "k": self.config.k,
                "iterations": self.config.iterations,
                "verify_cap": self.config.verify_cap,
                "fuzz_count": self.config.fuzz_count,
                "seed": self.config.seed,
                "rtol": self.config.tolerance.rtol,
                "atol": self.config.tolerance.atol,
            },
            "iterations": [it.to_obj() for it in self.iterations],
            "verified_pairs": [
                {
                    "iteration": o.iteration,
                    "verdict": o.result.verdict.value,
                    **o.plan.to_obj(),
                }
                for o in sorted(
                    self.outcomes,
                    key=lambda o: (o.iteration, o.plan.source, o.plan.target, o.plan.kind),
                )
            ],
            "inconsistencies": [i.to_obj() for i in self.inconsistencies],
            "coverage": {
                "initial": len(self.initial_covered),
                "final": len(self.final_covered),
                "covered": self.final_covered,
            },
            **({"fpr": self.fpr} if self.fpr is not None else {}),
        }


class ClientPool:
    """Checkout pool over one client per worker; one in-flight request each."""

    def __init__(self, clients: list):
        self._clients = list(clients)
        self._queue: Queue = Queue()
        for c in self._clients:
            self._queue.put(c)

    def __len__(self) -> int:
        return len(self._clients)

    @contextmanager
    def client(self):
        c = self._queue.get()
        try:
            yield c
        finally:
            self._queue.put(c)

    def close(self) -> None:
        for c in self._clients:
            c.close()


def make_pool(config: CampaignConfig, executor=None) -> ClientPool:
    """Build the executor client pool from the configured launch command.

    `mock:PATH` loads a scripted in-process executor (always a single
    client, since its scripting is request-order sensitive); anything else
    is treated as a subprocess command line, launched once per worker.
    """
    if executor is not None:
        return ClientPool([executor])
    cmd = config.executor_cmd
    if not cmd:
        raise ValueError("no executor command configured")
    if cmd.startswith("mock:"):
        return ClientPool([MockExecutor.from_script_file(cmd[len("mock:"):])])
    clients = [
        ExecutorClient(cmd, timeout_ms=config.timeout_ms, max_restarts=config.max_restarts)
        for _ in range(max(config.workers, 1))
    ]
    return ClientPool(clients)


def build_embedder(config: CampaignConfig, db: CorpusDb):
    if config.embeddings_path:
        return PrecomputedEmbedder.from_file(config.embeddings_path)
    return DescriptionTfIdfEmbedder(db.entries)


def _map_ordered(fn: Callable, items: list, workers: int) -> list:
    """Apply fn over items, optionally in a thread pool, preserving order."""
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def run_iteration(
    db: CorpusDb,
    config: CampaignConfig,
    pool: ClientPool,
    sources: list[str],
    iteration: int,
    request_ids,
    embedder=None,
) -> tuple[IterationStats, list[PlanOutcome], list[Inconsistency]]:
    timings: dict[str, float] = {}
    covered_at_start = set(db.covered)
    workers = min(config.workers, len(pool))

    # 1. match
    t0 = time.perf_counter()
    if embedder is None:
        embedder = build_embedder(config, db)
    template_map = {
        s: [tpl.invoked for tpl in extract_templates(db.entries[s], db)] for s in sources
    }
    candidates = top_k_pairs(
        db, config.k, embedder=embedder, sources=sources, template_targets=template_map
    )
    timings["match"] = time.perf_counter() - t0

    # 2. synthesize
    t0 = time.perf_counter()
    plans: list[InvocationPlan] = []
    seen_plans: set[str] = set()
    aborted = 0
    for cand in candidates:
        if cand.channel == "template":
            new = [
                plan_from_template(tpl)
                for tpl in extract_templates(db.entries[cand.source], db)
                if tpl.invoked == cand.target
            ]
        else:
            plan = synthesize_by_matching(
                db.entries[cand.source], db.entries[cand.target], channel=cand.channel
            )
            if plan is None:
                aborted += 1
                continue
            new = [plan]
        for plan in new:
            key = json.dumps(plan.to_obj(), sort_keys=True)
            if key not in seen_plans:
                seen_plans.add(key)
                plans.append(plan)
    timings["synthesize"] = time.perf_counter() - t0

    # 3. verify
    t0 = time.perf_counter()
    verifiable = [p for p in plans if valid_invocations(db, p.source, 1)]

    def _verify(plan: InvocationPlan) -> PlanOutcome:
        inputs = valid_invocations(db, plan.source, config.verify_cap)
        skip_values = (
            db.entries[plan.source].nondeterministic
            or db.entries[plan.target].nondeterministic
        )
        with pool.client() as client:
            result = verify_pair(
                plan,
                inputs,
                client,
                config.tolerance,
                entries=db.entries,
                skip_value_check=skip_values,
                request_ids=request_ids,
                timeout_ms=config.timeout_ms,
                iteration=iteration,
            )
        return PlanOutcome(plan=plan, iteration=iteration, result=result)

    outcomes = _map_ordered(_verify, verifiable, workers)

    # single-writer insertion of successful invocations of newly covered targets
    newly: list[str] = []
    for outcome in outcomes:
        target = outcome.plan.target
        if target in covered_at_start:
            continue
        for rec in outcome.result.success_target_records:
            if record_new_invocation(db, rec) and target not in newly:
                newly.append(target)
    verdict_counts = {v.value: 0 for v in Verdict}
    for o in outcomes:
        verdict_counts[o.result.verdict.value] += 1
    timings["verify"] = time.perf_counter() - t0

    # 4. fuzz verified pairs
    t0 = time.perf_counter()
    accepted = [o for o in outcomes if o.result.verdict is not Verdict.REJECTED]

    def _fuzz(outcome: PlanOutcome) -> list[Inconsistency]:
        plan = outcome.plan
        seeds = db.invocations[plan.source]
        skip_values = (
            db.entries[plan.source].nondeterministic
            or db.entries[plan.target].nondeterministic
        )
        with pool.client() as client:
            return fuzz_pair(
                plan,
                outcome.result.verdict,
                seeds,
                config.fuzz_count,
                client,
                config.tolerance,
                entries=db.entries,
                campaign_seed=config.seed,
                config=config.mutation,
                skip_value_check=skip_values,
                request_ids=request_ids,
                timeout_ms=config.timeout_ms,
            )

    found: list[Inconsistency] = []
    seen_keys: set[str] = set()
    for batch in _map_ordered(_fuzz, accepted, workers):
        for inc in batch:
            if inc.dedup_key not in seen_keys:
                seen_keys.add(inc.dedup_key)
                found.append(inc)
    timings["fuzz"] = time.perf_counter() - t0

    stats = IterationStats(
        index=iteration,
        sources=list(sources),
        candidates=len(candidates),
        plans=len(plans),
        aborted=aborted,
        verdicts=verdict_counts,
        newly_covered=sorted(newly),
        inconsistencies=len(found),
        timings=timings,
    )
    return stats, outcomes, found


def run(config: CampaignConfig, executor=None) -> CampaignReport:
    """Full iterative campaign; stops at the fixed point or the iteration cap."""
    db = load_corpus(config.corpus_path)
    pool = make_pool(config, executor)
    report = CampaignReport(config=config, initial_covered=sorted(db.covered))
    embedder = build_embedder(config, db)
    request_ids = itertools.count(1)
    sources = sorted(db.covered)
    seen_keys: set[str] = set()
    try:
        for iteration in range(1, config.iterations + 1):
            if not sources:
                break
            stats, outcomes, found = run_iteration(
                db, config, pool, sources, iteration, request_ids, embedder
            )
            report.iterations.append(stats)
            report.outcomes.extend(outcomes)
            for inc in found:
                if inc.dedup_key not in seen_keys:
                    seen_keys.add(inc.dedup_key)
                    report.inconsistencies.append(inc)
            log.info(
                "iteration %d: %d candidates, %d plans, %d newly covered, %d inconsistencies",
                iteration, stats.candidates, stats.plans,
                len(stats.newly_covered), stats.inconsistencies,
            )
            if not stats.newly_covered:
                break
            sources = stats.newly_covered
    finally:
        if executor is None:
            pool.close()
    report.final_covered = sorted(db.covered)
    report.inconsistencies.sort(key=lambda i: (i.source, i.target, i.oracle, i.dedup_key))
    if config.labels_path:
        report.fpr = fpr(report, load_labels(config.labels_path))
    return report


# ---------------------------------------------------------------------------
# Ground-truth labels and the false-positive rate
# ---------------------------------------------------------------------------

def load_labels(path: str | Path) -> dict[frozenset, dict]:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    labels: dict[frozenset, dict] = {}
    for entry in obj.get("pairs", []):
        labels[frozenset((entry["a"], entry["b"]))] = entry
    return labels


def fpr(report: CampaignReport, labels: dict[frozenset, dict]) -> dict[str, Any]:
    """False-positive rate over inconsistent pairs, judged by the labels.

    A pair with at least one reported inconsistency is a true positive when
    its label marks a bug and a false alarm otherwise.  Labels are
    direction-insensitive.  Every inconsistent pair must be labeled.
    """
    pairs = sorted({(i.source, i.target) for i in report.inconsistencies})
    missing = [p for p in pairs if frozenset(p) not in labels]
    if missing:
        raise LabelsError(
            "unlabeled inconsistent pairs: " + ", ".join(f"{s}/{t}" for s, t in missing)
        )
    tp = sum(1 for p in pairs if labels[frozenset(p)].get("bug"))
    fp = len(pairs) - tp
    if not pairs:
        return {"tp": 0, "fp": 0, "rate": 0.0, "no_findings": True}
    return {"tp": tp, "fp": fp, "rate": fp / (tp + fp)}


# ---------------------------------------------------------------------------
# Report output
# ---------------------------------------------------------------------------

def render_report(report: CampaignReport) -> str:
    """Deterministic JSON serialization (same seed, same bytes)."""
    return json.dumps(report.to_obj(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_report(report: CampaignReport, path: str | Path) -> None:
    Path(path).write_text(render_report(report), encoding="utf-8")


def write_timings(report: CampaignReport, path: str | Path) -> None:
    obj = {
        "iterations": [
            {"index": it.index, "timings": it.timings} for it in report.iterations
        ]
    }
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")
