"""Similarity ranking of API pairs from signatures and descriptions.

Signature similarity embeds the tokenized signature (qualified name plus
argument names) as a term-frequency vector normalized by the corpus-wide
count of each token, then takes cosine similarity.  Document similarity is
cosine over a pluggable description embedder; the default embeds the
one-sentence descriptions the same way, and a precomputed-vector file can be
supplied instead.  The pair score is the maximum of the two channels.
"""

from __future__ import annotations

import json
import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import ApiEntry, CorpusDb

log = logging.getLogger(__name__)

# Sparse token -> weight map; the zero vector is the empty dict.
TfIdfVector = dict[str, float]

_WORD_RE = re.compile(r"[A-Za-z0-9]+")
_CAMEL_RE = re.compile(r"(?<=[a-z])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])|(?<=[A-Za-z])(?=[0-9])")


def split_words(text: str) -> list[str]:
    """Split on non-alphanumerics, camelCase and letter-to-digit boundaries.

    Digit-to-letter transitions do not split, so "Pool3d" tokenizes to
    ["pool", "3d"].  All tokens are lowercased.
    """
    out: list[str] = []
    for chunk in _WORD_RE.findall(text):
        out.extend(t.lower() for t in _CAMEL_RE.split(chunk) if t)
    return out


def tokenize(entry: ApiEntry) -> list[str]:
    """Signature tokens: qualified-name subwords then argument-name subwords."""
    tokens = split_words(entry.qualified_name)
    for a in entry.args:
        tokens.extend(split_words(a.name))
    return tokens


def tfidf_embed(all_tokens: Mapping[str, Sequence[str]]) -> dict[str, TfIdfVector]:
    """Per-API sparse embeddings: count of token j divided by its corpus-wide count."""
    totals: dict[str, int] = {}
    counts: dict[str, dict[str, int]] = {}
    for api, toks in all_tokens.items():
        c: dict[str, int] = {}
        for t in toks:
            c[t] = c.get(t, 0) + 1
        counts[api] = c
        for t, n in c.items():
            totals[t] = totals.get(t, 0) + n
    return {
        api: {t: n / totals[t] for t, n in c.items()}
        for api, c in counts.items()
    }


def cosine(x: TfIdfVector | Sequence[float], y: TfIdfVector | Sequence[float]) -> float:
    """Cosine similarity; 0.0 when either vector has zero norm."""
    if isinstance(x, dict) and isinstance(y, dict):
        dot = sum(w * y[t] for t, w in x.items() if t in y)
        nx = math.sqrt(sum(w * w for w in x.values()))
        ny = math.sqrt(sum(w * w for w in y.values()))
    else:
        xs, ys = list(x), list(y)  # type: ignore[arg-type]
        if len(xs) != len(ys):
            raise ValueError("dense vectors must have equal length")
        dot = sum(a * b for a, b in zip(xs, ys))
        nx = math.sqrt(sum(a * a for a in xs))
        ny = math.sqrt(sum(b * b for b in ys))
    if nx == 0.0 or ny == 0.0:
        return 0.0
    return dot / (nx * ny)


class DescriptionTfIdfEmbedder:
    """Default document embedder: term-frequency embedding of descriptions."""

    def __init__(self, entries: Mapping[str, ApiEntry]):
        self._vectors = tfidf_embed(
            {name: split_words(e.description) for name, e in entries.items()}
        )

    def vector(self, api: str) -> TfIdfVector | None:
        return self._vectors.get(api)


class PrecomputedEmbedder:
    """Embedder backed by a JSON file mapping api name to a dense vector."""

    def __init__(self, vectors: Mapping[str, Sequence[float]]):
        self._vectors = {k: list(v) for k, v in vectors.items()}
        lengths = {len(v) for v in self._vectors.values()}
        if len(lengths) > 1:
            raise ValueError("precomputed vectors must all have equal length")

    @classmethod
    def from_file(cls, path: str | Path) -> "PrecomputedEmbedder":
        return cls(json.loads(Path(path).read_text(encoding="utf-8")))

    def vector(self, api: str) -> Sequence[float] | None:
        v = self._vectors.get(api)
        if v is None:
            log.warning("no precomputed embedding for %s; treating similarity as 0", api)
        return v


def doc_similarity(s: ApiEntry, t: ApiEntry, embedder) -> float:
    """Cosine of the two description embeddings; 0.0 when a vector is missing."""
    vs = embedder.vector(s.qualified_name)
    vt = embedder.vector(t.qualified_name)
    if vs is None or vt is None:
        return 0.0
    return cosine(vs, vt)


@dataclass(frozen=True)
class CandidatePair:
    """A candidate matched pair prior to verification."""

    source: str
    target: str
    score: float
    channel: str  # signature | document | template


def signature_vectors(db: CorpusDb) -> dict[str, TfIdfVector]:
    return tfidf_embed({name: tokenize(e) for name, e in db.entries.items()})


def top_k_pairs(
    db: CorpusDb,
    k: int,
    *,
    embedder=None,
    sources: Iterable[str] | None = None,
    template_targets: Mapping[str, Iterable[str]] | None = None,
) -> list[CandidatePair]:
    """Top-K candidate pairs per source API, plus all template-derived pairs.

    The pair score is max(signature similarity, document similarity); ties in
    the ranking break by lexicographic target name.  Template-derived pairs
    (owner -> invoked API, from `template_targets`) are always emitted with
    channel "template", regardless of their rank.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    sig_vecs = signature_vectors(db)
    if embedder is None:
        embedder = DescriptionTfIdfEmbedder(db.entries)
    names = sorted(db.entries)
    src_names = sorted(sources) if sources is not None else names

    out: list[CandidatePair] = []
    for s in src_names:
        scored: list[tuple[float, str, str]] = []
        for t in names:
            if t == s:
                continue
            sim_sig = cosine(sig_vecs[s], sig_vecs[t])
            sim_doc = doc_similarity(db.entries[s], db.entries[t], embedder)
            if sim_sig >= sim_doc:
                scored.append((sim_sig, t, "signature"))
            else:
                scored.append((sim_doc, t, "document"))
        scored.sort(key=lambda it: (-it[0], it[1]))
        for score, t, channel in scored[:k]:
            out.append(CandidatePair(s, t, score, channel))
        for t in sorted(set((template_targets or {}).get(s, ()))):
            if t == s or t not in db.entries:
                continue
            sim_sig = cosine(sig_vecs[s], sig_vecs[t])
            sim_doc = doc_similarity(db.entries[s], db.entries[t], embedder)
            out.append(CandidatePair(s, t, max(sim_sig, sim_doc), "template"))
    return out
