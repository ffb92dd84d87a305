"""Command-line interface.

Subcommands mirror the pipeline phases.  `match` and `synth` are static
(no executor); `verify` and `fuzz` run a single iteration up to their phase;
`run` performs the full iterative campaign.  Exit codes: 0 clean, 1 when
inconsistencies were found, 2 on infrastructure or usage errors.
"""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import sys
from pathlib import Path

from .corpus import CorpusError, load_corpus, valid_invocations
from .driver import (
    CampaignConfig,
    LabelsError,
    make_pool,
    render_report,
    run,
    run_iteration,
    write_report,
    write_timings,
)
from .matcher import top_k_pairs
from .protocol import InfrastructureError, Tolerance
from .synthesizer import extract_templates, plan_from_template, synthesize_by_matching

log = logging.getLogger(__name__)

EXIT_CLEAN = 0
EXIT_FINDINGS = 1
EXIT_ERROR = 2


def _add_common(p: argparse.ArgumentParser, executor: bool) -> None:
    p.add_argument("--corpus", required=True, help="corpus JSON file")
    p.add_argument("--embeddings", help="precomputed description embeddings JSON")
    p.add_argument("--top-k", type=int, default=10, dest="top_k")
    p.add_argument("--iterations", type=int, default=10)
    p.add_argument("--verify-cap", type=int, default=100, dest="verify_cap")
    p.add_argument("--fuzz-count", type=int, default=1000, dest="fuzz_count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rtol", type=float, default=1e-3)
    p.add_argument("--atol", type=float, default=1e-6)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--labels", help="ground-truth labels JSON for FPR")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--timings", help="write per-phase wall-clock times here")
    if executor:
        p.add_argument(
            "--executor-cmd",
            required=True,
            dest="executor_cmd",
            help="executor launch command, or mock:SCRIPT.json",
        )


def _config(args: argparse.Namespace) -> CampaignConfig:
    return CampaignConfig(
        corpus_path=args.corpus,
        k=args.top_k,
        iterations=args.iterations,
        verify_cap=args.verify_cap,
        fuzz_count=args.fuzz_count,
        seed=args.seed,
        tolerance=Tolerance(rtol=args.rtol, atol=args.atol),
        executor_cmd=getattr(args, "executor_cmd", None),
        workers=args.workers,
        embeddings_path=args.embeddings,
        labels_path=args.labels,
        out_path=args.out,
        timings_path=args.timings,
    )


def _emit(args: argparse.Namespace, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _static_candidates(config: CampaignConfig):
    from .driver import build_embedder

    db = load_corpus(config.corpus_path)
    sources = sorted(db.covered)
    template_map = {
        s: [tpl.invoked for tpl in extract_templates(db.entries[s], db)] for s in sources
    }
    embedder = build_embedder(config, db)
    candidates = top_k_pairs(
        db, config.k, embedder=embedder, sources=sources, template_targets=template_map
    )
    return db, candidates


def cmd_match(args: argparse.Namespace) -> int:
    config = _config(args)
    _, candidates = _static_candidates(config)
    obj = [
        {"source": c.source, "target": c.target, "score": c.score, "channel": c.channel}
        for c in candidates
    ]
    _emit(args, json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return EXIT_CLEAN


def cmd_synth(args: argparse.Namespace) -> int:
    config = _config(args)
    db, candidates = _static_candidates(config)
    plans = []
    for cand in candidates:
        if cand.channel == "template":
            plans.extend(
                plan_from_template(tpl)
                for tpl in extract_templates(db.entries[cand.source], db)
                if tpl.invoked == cand.target
            )
        else:
            plan = synthesize_by_matching(
                db.entries[cand.source], db.entries[cand.target], channel=cand.channel
            )
            if plan is not None:
                plans.append(plan)
    _emit(args, json.dumps([p.to_obj() for p in plans], indent=2, sort_keys=True) + "\n")
    return EXIT_CLEAN


def _single_iteration(args: argparse.Namespace, with_fuzz: bool) -> int:
    config = _config(args)
    if not with_fuzz:
        config.fuzz_count = 0
    db = load_corpus(config.corpus_path)
    pool = make_pool(config)
    request_ids = itertools.count(1)
    try:
        stats, outcomes, found = run_iteration(
            db, config, pool, sorted(db.covered), 1, request_ids
        )
    finally:
        pool.close()
    obj = {
        "iteration": stats.to_obj(),
        "verified_pairs": [
            {"verdict": o.result.verdict.value, **o.plan.to_obj()} for o in outcomes
        ],
        "inconsistencies": [i.to_obj() for i in found],
    }
    _emit(args, json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return EXIT_FINDINGS if found else EXIT_CLEAN


def cmd_verify(args: argparse.Namespace) -> int:
    return _single_iteration(args, with_fuzz=False)


def cmd_fuzz(args: argparse.Namespace) -> int:
    return _single_iteration(args, with_fuzz=True)


def cmd_run(args: argparse.Namespace) -> int:
    config = _config(args)
    report = run(config)
    text = render_report(report)
    _emit(args, text)
    if config.timings_path:
        write_timings(report, config.timings_path)
    return EXIT_FINDINGS if report.inconsistencies else EXIT_CLEAN


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pairfuzz",
        description="Differential fuzzing of library APIs via inferred relational pairs",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    specs = [
        ("match", cmd_match, False, "rank candidate matched pairs"),
        ("synth", cmd_synth, False, "synthesize invocation plans"),
        ("verify", cmd_verify, True, "verify plans over traced inputs (one iteration)"),
        ("fuzz", cmd_fuzz, True, "verify then fuzz verified pairs (one iteration)"),
        ("run", cmd_run, True, "full iterative campaign"),
    ]
    for name, fn, needs_executor, help_text in specs:
        p = sub.add_parser(name, help=help_text)
        _add_common(p, executor=needs_executor)
        p.set_defaults(fn=fn)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.fn(args)
    except (CorpusError, LabelsError, InfrastructureError, OSError, ValueError) as e:
        log.error("%s", e)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
