"""API corpus: signatures, descriptions, doc code blocks, and traced invocations.

The corpus is a static JSON file (see README for the schema) rather than
scraped documentation, so runs are hermetic and reproducible.  An API is
*covered* when the database holds at least one valid invocation for it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

from .values import MalformedValue, ValueRepr, canonical_json


class CorpusError(Exception):
    """Corpus file violates the schema or internal invariants."""


@dataclass(frozen=True)
class ArgSpec:
    """One declared argument of an API."""

    name: str
    position: int
    optional: bool = False
    default: ValueRepr | None = None
    observed_types: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if self.optional != (self.default is not None):
            raise CorpusError(
                f"argument {self.name!r}: optional flag and default presence must agree"
            )


@dataclass(frozen=True)
class ApiEntry:
    """One API: qualified name, ordered arguments, one-line description, doc snippets."""

    qualified_name: str
    args: tuple[ArgSpec, ...] = ()
    description: str = ""
    code_blocks: tuple[str, ...] = ()
    nondeterministic: bool = False

    def __post_init__(self) -> None:
        for i, a in enumerate(self.args):
            if a.position != i:
                raise CorpusError(
                    f"{self.qualified_name}: argument positions must be 0..n-1 without gaps"
                )

    @property
    def required_positions(self) -> list[int]:
        return [a.position for a in self.args if not a.optional]

    def arg_by_name(self, name: str) -> ArgSpec | None:
        for a in self.args:
            if a.name == name:
                return a
        return None


@dataclass(frozen=True)
class InvocationRecord:
    """Concrete argument values passed to an API, as traced or synthesized."""

    api: str
    positional: tuple[ValueRepr, ...] = ()
    keyword: tuple[tuple[str, ValueRepr], ...] = ()
    origin: str = "seed"

    def keyword_dict(self) -> dict[str, ValueRepr]:
        return dict(self.keyword)

    def to_obj(self) -> dict[str, Any]:
        return {
            "api": self.api,
            "positional": [v.to_obj() for v in self.positional],
            "keyword": {k: v.to_obj() for k, v in self.keyword},
            "origin": self.origin,
        }

    @staticmethod
    def from_obj(obj: dict[str, Any]) -> "InvocationRecord":
        return InvocationRecord(
            api=obj["api"],
            positional=tuple(ValueRepr.from_obj(o) for o in obj.get("positional", [])),
            keyword=tuple(sorted((k, ValueRepr.from_obj(v)) for k, v in obj.get("keyword", {}).items())),
            origin=obj.get("origin", "seed"),
        )


def make_record(
    api: str,
    positional: Iterable[ValueRepr] = (),
    keyword: dict[str, ValueRepr] | None = None,
    origin: str = "seed",
) -> InvocationRecord:
    kw = tuple(sorted((keyword or {}).items()))
    return InvocationRecord(api=api, positional=tuple(positional), keyword=kw, origin=origin)


@dataclass
class CorpusDb:
    """Entries plus the invocation database; append-only within an iteration."""

    entries: dict[str, ApiEntry] = field(default_factory=dict)
    invocations: dict[str, list[InvocationRecord]] = field(default_factory=dict)

    @property
    def covered(self) -> set[str]:
        return {a for a, recs in self.invocations.items() if recs}

    def entry(self, api: str) -> ApiEntry:
        try:
            return self.entries[api]
        except KeyError:
            raise CorpusError(f"unknown api {api!r}") from None

    def check_record(self, rec: InvocationRecord) -> None:
        entry = self.entry(rec.api)
        if len(rec.positional) > len(entry.args):
            raise CorpusError(
                f"{rec.api}: {len(rec.positional)} positional values for {len(entry.args)} declared arguments"
            )
        names = {a.name for a in entry.args}
        for k, _ in rec.keyword:
            if k not in names:
                raise CorpusError(f"{rec.api}: unknown keyword argument {k!r}")
        provided = rec.keyword_dict()
        for a in entry.args:
            if not a.optional and a.position >= len(rec.positional) and a.name not in provided:
                raise CorpusError(f"{rec.api}: required argument {a.name!r} missing")


def load_corpus(path: str | Path) -> CorpusDb:
    """Load and validate a corpus file.

    Raises CorpusError naming the offending entry on schema violations,
    duplicate API names, or invocations of unknown APIs.
    """
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise CorpusError(f"cannot load corpus {path}: {e}") from e

    db = CorpusDb()
    for api_obj in raw.get("apis", []):
        name = api_obj.get("name")
        if not name:
            raise CorpusError("api entry without a name")
        if name in db.entries:
            raise CorpusError(f"duplicate api name {name!r}")
        args = []
        for arg_obj in api_obj.get("args", []):
            default = arg_obj.get("default")
            try:
                default_vr = ValueRepr.from_obj(default) if default is not None else None
            except MalformedValue as e:
                raise CorpusError(f"{name}: bad default for {arg_obj.get('name')!r}: {e}") from e
            args.append(
                ArgSpec(
                    name=arg_obj["name"],
                    position=int(arg_obj["position"]),
                    optional=bool(arg_obj.get("optional", False)),
                    default=default_vr,
                    observed_types=frozenset(arg_obj.get("observed_types", [])),
                )
            )
        db.entries[name] = ApiEntry(
            qualified_name=name,
            args=tuple(sorted(args, key=lambda a: a.position)),
            description=api_obj.get("description", ""),
            code_blocks=tuple(api_obj.get("code_blocks", [])),
            nondeterministic=bool(api_obj.get("nondeterministic", False)),
        )
        db.invocations[name] = []

    for rec_obj in raw.get("invocations", []):
        try:
            rec = InvocationRecord.from_obj(rec_obj)
        except MalformedValue as e:
            raise CorpusError(f"bad invocation for {rec_obj.get('api')!r}: {e}") from e
        if rec.api not in db.entries:
            raise CorpusError(f"unknown api {rec.api!r} in invocations")
        db.check_record(rec)
        db.invocations[rec.api].append(rec)
    return db


def dump_corpus(db: CorpusDb) -> str:
    """Serialize back to the corpus file format (round-trips load_corpus)."""
    apis = []
    for name in sorted(db.entries):
        e = db.entries[name]
        apis.append(
            {
                "name": e.qualified_name,
                "args": [
                    {
                        "name": a.name,
                        "position": a.position,
                        "optional": a.optional,
                        **({"default": a.default.to_obj()} if a.default is not None else {}),
                        "observed_types": sorted(a.observed_types),
                    }
                    for a in e.args
                ],
                "description": e.description,
                "code_blocks": list(e.code_blocks),
                **({"nondeterministic": True} if e.nondeterministic else {}),
            }
        )
    invocations = [rec.to_obj() for name in sorted(db.invocations) for rec in db.invocations[name]]
    return canonical_json({"apis": apis, "invocations": invocations})


def valid_invocations(db: CorpusDb, api: str, cap: int) -> list[InvocationRecord]:
    """First `cap` traced invocations of `api`, in insertion order."""
    entry = db.entry(api)
    return list(db.invocations[entry.qualified_name][: max(cap, 0)])


def record_new_invocation(db: CorpusDb, rec: InvocationRecord) -> bool:
    """Append a record; True iff this newly covers rec.api."""
    db.check_record(rec)
    was_covered = bool(db.invocations[rec.api])
    db.invocations[rec.api].append(rec)
    return not was_covered
