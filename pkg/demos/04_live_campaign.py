#!/usr/bin/env python3
"""Walkthrough: the end-to-end campaign against the real executor.

Requires the executor build (cd executor && npm install && npm run build).
Runs the full pipeline on the `mini` corpus, then checks the verified
relations and reported inconsistencies against the shipped ground-truth
labels, mirroring how a real campaign's findings get triaged.

Run from the repository root:  python3 demos/04_live_campaign.py
"""

import shutil
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from pairfuzz.driver import CampaignConfig, load_labels, run
from pairfuzz.verifier import Verdict

ROOT = Path(__file__).resolve().parent.parent
EXECUTOR = ROOT / "executor" / "dist" / "main.js"

if shutil.which("node") is None or not EXECUTOR.exists():
    sys.exit("executor not built: cd executor && npm install && npm run build")

config = CampaignConfig(
    corpus_path=str(ROOT / "fixtures" / "mini_corpus.json"),
    executor_cmd=f"node {EXECUTOR}",
    seed=42,
    fuzz_count=200,
    labels_path=str(ROOT / "fixtures" / "mini_labels.json"),
)
start = time.perf_counter()
report = run(config)
elapsed = time.perf_counter() - start

print(f"campaign finished in {elapsed:.1f}s, {len(report.iterations)} iterations, "
      f"coverage {len(report.initial_covered)} -> {len(report.final_covered)}")

labels = load_labels(config.labels_path)
verdicts = report.pair_verdicts()

print("\nseeded relations vs verified verdicts:")
for key, label in sorted(labels.items(), key=lambda kv: sorted(kv[0])):
    a, b = sorted(key)
    got = [v for v in (verdicts.get((a, b)), verdicts.get((b, a))) if v is not None]
    order = {Verdict.VALUE_EQUIVALENT: 2, Verdict.STATUS_EQUIVALENT: 1, Verdict.REJECTED: 0}
    best = max(got, key=lambda v: order[v]) if got else None
    print(f"  {a} / {b}: labeled {label['relation']:6s} -> verified {best.value if best else 'never paired'}")

print("\nreported inconsistencies (after dedup):")
for inc in report.inconsistencies:
    judged = "BUG" if labels.get(frozenset((inc.source, inc.target)), {}).get("bug") else "false alarm"
    print(f"  [{inc.oracle:6s}] {inc.source} vs {inc.target}: "
          f"({inc.status_s.value}, {inc.status_t.value}) -> {judged}")

print(f"\nfalse-positive rate vs labels: {report.fpr['rate']:.2f} "
      f"(tp={report.fpr['tp']}, fp={report.fpr['fp']})")
