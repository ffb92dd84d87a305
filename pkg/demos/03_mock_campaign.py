#!/usr/bin/env python3
"""Walkthrough: a full iterative campaign against the scripted mock executor.

No subprocess involved: the mock replays scripted outcomes, which keeps the
demo deterministic and instant while exercising every phase (match,
synthesize, verify, fuzz) and the fixpoint loop.

Run from the repository root:  python3 demos/03_mock_campaign.py
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from pairfuzz.driver import CampaignConfig, run

ROOT = Path(__file__).resolve().parent.parent

config = CampaignConfig(
    corpus_path=str(ROOT / "fixtures" / "mini_corpus.json"),
    executor_cmd=f"mock:{ROOT / 'fixtures' / 'mini_mock_script.json'}",
    seed=42,
    fuzz_count=50,
)
report = run(config)

print("iter  sources  candidates  plans  VE  SE  rejected  newly-covered")
for it in report.iterations:
    v = it.verdicts
    print(
        f"{it.index:4d}  {len(it.sources):7d}  {it.candidates:10d}  {it.plans:5d}"
        f"  {v['value_equivalent']:2d}  {v['status_equivalent']:2d}  {v['rejected']:8d}"
        f"  {len(it.newly_covered)}"
    )

print(f"\ncoverage: {len(report.initial_covered)} -> {len(report.final_covered)} APIs")
print(f"stopped after {len(report.iterations)} iterations (fixed point or cap)")
print(f"inconsistencies: {len(report.inconsistencies)} (the script behaves consistently)")
print("\nAPIs never covered:")
all_apis = set()
from pairfuzz.corpus import load_corpus

all_apis = set(load_corpus(config.corpus_path).entries)
for name in sorted(all_apis - set(report.final_covered)):
    print(f"  {name}")
print("(unreachable targets: required arguments that no source can supply,")
print(" plus targets whose scripted behavior rejects every pair)")
