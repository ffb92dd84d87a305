#!/usr/bin/env python3
"""Walkthrough: synthesizing target invocations from source invocations.

Shows the weighted bipartite argument matching (names + observed types +
positions, solved with the Kuhn-Munkres algorithm), an aborted match, and a
documentation code block lifted into a matching template.

Run from the repository root:  python3 demos/02_synthesize_invocations.py
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from pairfuzz.corpus import load_corpus
from pairfuzz.synthesizer import (
    arg_similarity,
    build_target_invocation,
    extract_templates,
    plan_from_template,
    render_expr,
    render_value_expr,
    synthesize_by_matching,
)

ROOT = Path(__file__).resolve().parent.parent
db = load_corpus(ROOT / "fixtures" / "mini_corpus.json")

print("=== argument similarity matrix: mini.vsplit vs mini.tensor_split ===")
s = db.entries["mini.vsplit"]
t = db.entries["mini.tensor_split"]
header = " ".join(f"{b.name:>10s}" for b in t.args)
print(f"{'':>10s} {header}")
for a in s.args:
    row = " ".join(f"{arg_similarity(a, b, len(s.args), len(t.args)):10.3f}" for b in t.args)
    print(f"{a.name:>10s} {row}")

plan = synthesize_by_matching(s, t)
print(f"\nbest match -> slot_map={plan.slot_map_dict()}, fills={[(k, v.value) for k, v in plan.default_fills]}")

rec = db.invocations["mini.vsplit"][0]
positional, keyword = build_target_invocation(plan, s, t, rec)
print("rendered target invocation:")
print(f"  mini.tensor_split(<{positional[0].kind}>, {positional[1].value}, dim={keyword['dim'].value})")

print("\n=== aborted match: a required argument stays unmatched ===")
aborted = synthesize_by_matching(db.entries["mini.negate"], db.entries["mini.kthvalue"])
print(f"  negate -> kthvalue: {'aborted' if aborted is None else 'matched?!'} (k would have no value)")

print("\n=== template matching from a doc code block ===")
print(f"  doc block of mini.scatter: {db.entries['mini.scatter'].code_blocks[0]!r}")
tpl = extract_templates(db.entries["mini.scatter"], db)[0]
print(f"  extracted template (placeholders are source argument positions):")
print(f"    {render_expr(tpl.expr)}")

tplan = plan_from_template(tpl)
rec = db.invocations["mini.scatter"][0]
positional, keyword = build_target_invocation(
    tplan, db.entries["mini.scatter"], db.entries["mini.scatter_add"], rec
)
print("  instantiated for the first traced scatter invocation:")
print(f"    mini.scatter_add({', '.join(render_value_expr(v) for v in positional)})")
