#!/usr/bin/env python3
"""Regenerate the golden protocol transcripts.

Each line of fixtures/transcripts/conformance.jsonl holds one request, the
parsed response, and the exact response bytes the executor produced.  The
script checks every response against independently stated expectations
before freezing, so the transcripts double as a semantic regression net.

Run from the repository root with the executor built:

    python3 tools/make_transcripts.py
"""

from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "fixtures" / "transcripts" / "conformance.jsonl"

T22 = {"kind": "tensor", "shape": [2, 2], "dtype": "f32", "content": {"values": [0.5, -1.25, 2.75, 3.5]}}
R5 = {"kind": "tensor", "shape": [5], "dtype": "f32", "content": {"values": [0.5, -1.25, 2.75, 3.5, 0.125]}}
R6 = {"kind": "tensor", "shape": [6], "dtype": "f32", "content": {"values": [0.5, -1.25, 2.75, 3.5, 0.125, -2.25]}}
M43 = {
    "kind": "tensor", "shape": [4, 3], "dtype": "f32",
    "content": {"values": [0.5, -1.25, 2.75, 3.5, 0.125, -2.25, 1.5, 0.75, -0.5, -1.0, 2.5, 0.25]},
}
SEEDED = {"kind": "tensor", "shape": [2, 2], "dtype": "f64", "content": {"seed": 7}}
TOL = {"rtol": 0.001, "atol": 0.0001}


def vint(v):
    return {"kind": "int", "value": v}


def vlist(*items):
    return {"kind": "list", "items": list(items)}


def req(rid, s_api, s_pos, t_api, t_pos, t_kw=None):
    return {
        "id": rid,
        "source": {"api": s_api, "positional": s_pos, "keyword": {}},
        "target": {"api": t_api, "positional": t_pos, "keyword": t_kw or {}},
        "tolerance": TOL,
        "timeout_ms": 5000,
    }


CASES = [
    # (request, expectation checker)
    (
        req(1, "mini.total", [T22], "mini.sum", [T22]),
        lambda r: r["status_s"] == "success" and r["status_t"] == "success" and r["value_equal"] is True,
    ),
    (
        req(2, "mini.vsplit", [M43, vint(2)], "mini.tensor_split", [M43, vint(2)], {"dim": vint(0)}),
        lambda r: r["value_equal"] is True and r["value_summary_s"]["kind"] == "list",
    ),
    (
        req(3, "mini.kthvalue", [R5, vint(7)], "mini.kth_value", [R5, vint(7)]),
        lambda r: r["value_equal"] is False,
    ),
    (
        req(4, "mini.avg_pool", [R6, vlist(vint(-1))], "mini.max_pool", [R6, vlist(vint(-1))]),
        lambda r: (r["status_s"], r["status_t"]) == ("success", "exception")
        and r["exception_class_t"] == "ValueError",
    ),
    (
        req(5, "mini.add", [T22, vint(3)], "mini.add", [T22, T22]),
        lambda r: (r["status_s"], r["status_t"]) == ("exception", "success")
        and r["exception_class_s"] == "TypeError",
    ),
    (
        req(6, "mini.nope", [T22], "mini.negate", [T22]),
        lambda r: (r["status_s"], r["status_t"]) == ("exception", "success")
        and r["exception_class_s"] == "UnknownApi",
    ),
    (
        req(
            7,
            "mini.scatter",
            [vlist(vint(0), vint(2)), {"kind": "tensor", "shape": [2], "dtype": "f32", "content": {"values": [0.5, -1.25]}}, vlist(vint(4))],
            "mini.scatter_add",
            [
                {"kind": "raw", "text": "mini.zeros([4], __tensor__([0.5, -1.25], [2], 'f32').dtype)"},
                vlist(vint(0), vint(2)),
                {"kind": "tensor", "shape": [2], "dtype": "f32", "content": {"values": [0.5, -1.25]}},
            ],
        ),
        lambda r: r["value_equal"] is True,
    ),
    (
        req(8, "mini.identity", [SEEDED], "mini.transpose", [SEEDED]),
        lambda r: r["value_equal"] is False and r["value_summary_s"]["dtype"] == "f64",
    ),
    (
        req(9, "mini.zeros", [vlist(vint(2), vint(-3))], "mini.zeros", [vlist(vint(2), vint(3))]),
        lambda r: (r["status_s"], r["status_t"]) == ("exception", "success")
        and r["exception_class_s"] == "ValueError",
    ),
    (
        req(10, "mini.mean", [R6], "mini.sum", [R6]),
        lambda r: r["value_equal"] is False and r["value_summary_s"]["kind"] == "number",
    ),
]


def main() -> None:
    proc = subprocess.Popen(
        ["node", str(ROOT / "executor" / "dist" / "main.js")],
        stdin=subprocess.PIPE,
        stdout=subprocess.PIPE,
        text=True,
    )
    assert proc.stdin and proc.stdout
    handshake = json.loads(proc.stdout.readline())
    assert handshake == {"protocol": 1, "ready": True}, handshake

    entries = []
    for request, check in CASES:
        proc.stdin.write(json.dumps(request) + "\n")
        proc.stdin.flush()
        raw = proc.stdout.readline().rstrip("\n")
        response = json.loads(raw)
        assert response["id"] == request["id"]
        if not check(response):
            sys.exit(f"expectation failed for request {request['id']}: {raw}")
        entries.append({"request": request, "response": response, "response_raw": raw})
    proc.stdin.close()
    proc.wait(timeout=10)

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text("\n".join(json.dumps(e) for e in entries) + "\n", encoding="utf-8")
    print(f"wrote {OUT} with {len(entries)} cases")


if __name__ == "__main__":
    main()
