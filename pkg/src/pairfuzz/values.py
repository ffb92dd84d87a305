"""Language-neutral abstract values exchanged between all pipeline stages.

A :class:`ValueRepr` describes one argument value without materializing it:
traced invocations, mutated fuzz inputs, and wire-protocol payloads all use
the same representation.  Executors materialize these into live values; the
orchestrator side never does.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field
from typing import Any

DTYPES = ("f32", "f64", "i32", "i64", "bool")


class MalformedValue(Exception):
    """Malformed ValueRepr (bad kind, shape/content mismatch, ...)."""


def inline_len_for_shape(shape: list[int]) -> int:
    """Expected inline-content length: product of the non-negative dims.

    Negative dims are legal (they are interesting fuzz inputs) and do not
    contribute to the expected element count.
    """
    n = 1
    for d in shape:
        if d >= 0:
            n *= d
    return n


@dataclass(frozen=True)
class ValueRepr:
    """Tagged variant of an abstract value.

    kind is one of: tensor, int, float, bool, str, none, list, tuple, raw.
    The payload fields used depend on the kind; unused fields stay at their
    defaults so instances hash and compare structurally.
    """

    kind: str
    value: Any = None                      # int/float/bool/str payload, raw text
    shape: tuple[int, ...] = ()            # tensor only
    dtype: str = ""                        # tensor only
    content: tuple[float, ...] | None = None   # tensor: inline values
    seed: int | None = None                # tensor: distribution seed
    items: tuple["ValueRepr", ...] = ()    # list/tuple children

    def __post_init__(self) -> None:
        if self.kind == "tensor":
            if self.dtype not in DTYPES:
                raise MalformedValue(f"unknown dtype {self.dtype!r}")
            if (self.content is None) == (self.seed is None):
                raise MalformedValue("tensor needs exactly one of inline content or seed")
            if self.content is not None:
                want = inline_len_for_shape(list(self.shape))
                if len(self.content) != want:
                    raise MalformedValue(
                        f"inline content length {len(self.content)} != {want} for shape {list(self.shape)}"
                    )
        elif self.kind not in ("int", "float", "bool", "str", "none", "list", "tuple", "raw"):
            raise MalformedValue(f"unknown value kind {self.kind!r}")

    def to_obj(self) -> dict[str, Any]:
        """Encode as the JSON object form used by corpus files and the wire."""
        k = self.kind
        if k == "tensor":
            obj: dict[str, Any] = {"kind": k, "shape": list(self.shape), "dtype": self.dtype}
            if self.content is not None:
                obj["content"] = {"values": list(self.content)}
            else:
                obj["content"] = {"seed": self.seed}
            return obj
        if k in ("int", "float", "bool", "str"):
            return {"kind": k, "value": self.value}
        if k == "none":
            return {"kind": k}
        if k in ("list", "tuple"):
            return {"kind": k, "items": [v.to_obj() for v in self.items]}
        return {"kind": "raw", "text": self.value}

    @staticmethod
    def from_obj(obj: dict[str, Any]) -> "ValueRepr":
        if not isinstance(obj, dict) or "kind" not in obj:
            raise MalformedValue(f"not a value object: {obj!r}")
        k = obj["kind"]
        if k == "tensor":
            content = obj.get("content", {})
            if "values" in content:
                return tensor(obj["shape"], obj["dtype"], values=content["values"])
            if "seed" in content:
                return tensor(obj["shape"], obj["dtype"], seed=content["seed"])
            raise MalformedValue("tensor content must carry 'values' or 'seed'")
        if k == "int":
            return ValueRepr("int", int(obj["value"]))
        if k == "float":
            return ValueRepr("float", float(obj["value"]))
        if k == "bool":
            return ValueRepr("bool", bool(obj["value"]))
        if k == "str":
            return ValueRepr("str", str(obj["value"]))
        if k == "none":
            return ValueRepr("none")
        if k in ("list", "tuple"):
            return ValueRepr(k, items=tuple(ValueRepr.from_obj(o) for o in obj["items"]))
        if k == "raw":
            return ValueRepr("raw", str(obj["text"]))
        raise MalformedValue(f"unknown value kind {k!r}")


def tensor(
    shape: list[int] | tuple[int, ...],
    dtype: str,
    *,
    values: list[float] | None = None,
    seed: int | None = None,
) -> ValueRepr:
    content = None if values is None else tuple(float(v) for v in values)
    return ValueRepr("tensor", shape=tuple(int(d) for d in shape), dtype=dtype, content=content, seed=seed)


def vint(v: int) -> ValueRepr:
    return ValueRepr("int", int(v))


def vfloat(v: float) -> ValueRepr:
    return ValueRepr("float", float(v))


def vbool(v: bool) -> ValueRepr:
    return ValueRepr("bool", bool(v))


def vstr(v: str) -> ValueRepr:
    return ValueRepr("str", str(v))


def vnone() -> ValueRepr:
    return ValueRepr("none")


def vlist(items: list[ValueRepr] | tuple[ValueRepr, ...]) -> ValueRepr:
    return ValueRepr("list", items=tuple(items))


def vtuple(items: list[ValueRepr] | tuple[ValueRepr, ...]) -> ValueRepr:
    return ValueRepr("tuple", items=tuple(items))


def vraw(text: str) -> ValueRepr:
    return ValueRepr("raw", str(text))


def canonical_json(obj: Any) -> str:
    """Stable compact serialization used for hashing and byte-exact reports."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def values_hash(positional: list[ValueRepr], keyword: dict[str, ValueRepr]) -> str:
    """Content hash of an argument bundle, independent of the API invoked."""
    payload = canonical_json(
        {
            "positional": [v.to_obj() for v in positional],
            "keyword": {k: v.to_obj() for k, v in sorted(keyword.items())},
        }
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def content_hash(dtype: str, shape: list[int], values: list[float]) -> str:
    """Fingerprint of tensor content over IEEE-754 bytes, stable across languages."""
    h = hashlib.sha256()
    h.update(dtype.encode())
    h.update(b"|")
    h.update(",".join(str(int(d)) for d in shape).encode())
    h.update(b"|")
    for v in values:
        h.update(struct.pack(">d", float(v)))
    return h.hexdigest()
