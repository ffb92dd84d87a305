#!/usr/bin/env python3
"""Regenerate the golden mock-campaign report used by the schema-stability test.

Run from the repository root after intentional report-format changes:

    python3 tools/make_golden.py
"""

from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from pairfuzz.driver import CampaignConfig, render_report, run  # noqa: E402


def golden_config() -> CampaignConfig:
    return CampaignConfig(
        corpus_path="fixtures/mini_corpus.json",
        executor_cmd="mock:fixtures/mini_mock_script.json",
        seed=42,
        fuzz_count=50,
    )


def main() -> None:
    report = run(golden_config())
    out = ROOT / "fixtures" / "golden_mock_report.json"
    out.write_text(render_report(report), encoding="utf-8")
    print(f"wrote {out} ({out.stat().st_size} bytes, {len(report.iterations)} iterations)")


if __name__ == "__main__":
    main()
