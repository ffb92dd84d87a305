#!/usr/bin/env python3
"""Walkthrough: how candidate API pairs are ranked.

Loads the bundled `mini` corpus, tokenizes a few signatures, builds the
term-frequency embeddings, and prints each covered API's closest neighbours
under the max(signature, description) similarity.

Run from the repository root:  python3 demos/01_rank_candidate_pairs.py
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from pairfuzz.corpus import load_corpus
from pairfuzz.matcher import DescriptionTfIdfEmbedder, cosine, signature_vectors, tokenize, top_k_pairs

ROOT = Path(__file__).resolve().parent.parent
db = load_corpus(ROOT / "fixtures" / "mini_corpus.json")

print("=== signature tokenization ===")
for name in ("mini.tensor_split", "mini.avg_pool", "mini.kthvalue"):
    print(f"{name:24s} -> {tokenize(db.entries[name])}")

print("\n=== token weights downweight ubiquitous subwords ===")
vecs = signature_vectors(db)
v = vecs["mini.tensor_split"]
for token in ("mini", "x", "tensor", "split"):
    print(f"  weight of {token!r:10s} in mini.tensor_split: {v.get(token, 0.0):.4f}")

print("\n=== top-3 neighbours per covered API (max of both channels) ===")
embedder = DescriptionTfIdfEmbedder(db.entries)
pairs = top_k_pairs(db, 3, embedder=embedder, sources=sorted(db.covered))
by_source: dict = {}
for c in pairs:
    by_source.setdefault(c.source, []).append(c)
for source in sorted(by_source):
    row = ", ".join(f"{c.target.removeprefix('mini.')}({c.score:.2f},{c.channel[:3]})" for c in by_source[source])
    print(f"  {source:18s} -> {row}")

print("\nNote the alias pair: identical descriptions give document similarity 1.0:")
sim = cosine(
    embedder.vector("mini.total"), embedder.vector("mini.sum")
)
print(f"  doc_similarity(mini.total, mini.sum) = {sim:.4f}")
