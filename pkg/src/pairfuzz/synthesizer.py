"""Synthesis of target-API invocations from source-API invocations.

Two routes, mirroring how relational pairs arise in practice:

* argument matching: a maximum-weight bipartite matching over per-argument
  similarity (name + observed types + position) decides which source value
  feeds which target argument; unmatched optional target arguments take
  their defaults, and any unmatched required argument aborts the pair.
* template matching: a documentation code block of the source API that
  invokes another corpus API is lifted into an expression template whose
  placeholders #i stand for the source API's arguments.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .corpus import ApiEntry, ArgSpec, CorpusDb, InvocationRecord
from .values import ValueRepr, vraw


class RenderError(Exception):
    """An invocation plan cannot be rendered against a given record."""


# ---------------------------------------------------------------------------
# Argument similarity (name, type, position)
# ---------------------------------------------------------------------------

def levenshtein(a: str, b: str) -> int:
    """Edit distance via the classic two-row dynamic program."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a):
        cur = [i + 1]
        for j, cb in enumerate(b):
            cur.append(min(prev[j + 1] + 1, cur[j] + 1, prev[j] + (ca != cb)))
        prev = cur
    return prev[-1]


def name_similarity(a: ArgSpec, b: ArgSpec) -> float:
    """1 - edit_distance / max(len); two empty names count as identical."""
    if not a.name and not b.name:
        return 1.0
    return 1.0 - levenshtein(a.name, b.name) / max(len(a.name), len(b.name))


def type_similarity(a: ArgSpec, b: ArgSpec) -> float:
    """Fraction of a's observed types that b also admits; 0 on empty sets."""
    if not a.observed_types or not b.observed_types:
        return 0.0
    return len(a.observed_types & b.observed_types) / len(a.observed_types)


def pos_similarity(a: ArgSpec, b: ArgSpec, len_s: int, len_t: int) -> float:
    return 1.0 - abs(a.position - b.position) / max(len_s, len_t, 1)


def arg_similarity(a: ArgSpec, b: ArgSpec, len_s: int, len_t: int) -> float:
    return (
        name_similarity(a, b)
        + type_similarity(a, b)
        + pos_similarity(a, b, len_s, len_t)
    )


# ---------------------------------------------------------------------------
# Maximum-weight bipartite matching (Kuhn-Munkres)
# ---------------------------------------------------------------------------

def max_weight_match(weights: Sequence[Sequence[float]] | np.ndarray) -> list[tuple[int, int]]:
    """Assignment of rows to columns maximizing total weight.

    Rectangular matrices are padded internally with zero-weight slots; the
    returned pairs cover only real rows and columns.  The potential-based
    augmenting formulation below uses only order comparisons, so float
    weights need no tolerance fiddling, and its fixed scan order makes the
    choice among equal-weight optima deterministic (low indices preferred).
    """
    W = np.asarray(weights, dtype=float)
    if W.ndim != 2:
        raise ValueError("weight matrix must be two-dimensional")
    if W.size == 0:
        return []
    if not np.all(np.isfinite(W)) or np.any(W < 0):
        raise ValueError("weights must be finite and non-negative")
    r, c = W.shape
    n = max(r, c)
    a = np.zeros((n, n))
    a[:r, :c] = -W  # minimize cost = maximize weight

    INF = float("inf")
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    match_row = [0] * (n + 1)  # column j (1-based) -> assigned row, 0 = free
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        match_row[0] = i
        j0 = 0
        minv = [INF] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = match_row[j0]
            delta = INF
            j1 = 0
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = a[i0 - 1][j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[match_row[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match_row[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            match_row[j0] = match_row[j1]
            j0 = j1

    pairs = [
        (match_row[j] - 1, j - 1)
        for j in range(1, n + 1)
        if 1 <= match_row[j] <= r and j <= c
    ]
    pairs.sort()
    return pairs


# ---------------------------------------------------------------------------
# Template expressions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TExpr:
    """Node of the minimal template expression language.

    node is one of: call, attr, name, placeholder, literal, list, tuple.
    """

    node: str
    value: Any = None                       # name id / literal value / attr field
    func: "TExpr | None" = None             # call
    args: tuple["TExpr", ...] = ()          # call positional
    kwargs: tuple[tuple[str, "TExpr"], ...] = ()  # call keywords
    target: "TExpr | None" = None           # attr base
    items: tuple["TExpr", ...] = ()         # list/tuple


def _render_literal(v: Any) -> str:
    if v is None:
        return "None"
    if isinstance(v, bool):
        return "True" if v else "False"
    if isinstance(v, (int, float)):
        return repr(v)
    if isinstance(v, str):
        return repr(v)
    raise RenderError(f"unrenderable literal {v!r}")


def render_expr(e: TExpr) -> str:
    """Printable form of a template expression, placeholders as #i."""
    if e.node == "placeholder":
        return f"#{e.value}"
    if e.node == "literal":
        return _render_literal(e.value)
    if e.node == "name":
        return str(e.value)
    if e.node == "attr":
        return f"{render_expr(e.target)}.{e.value}"
    if e.node == "list":
        return "[" + ", ".join(render_expr(x) for x in e.items) + "]"
    if e.node == "tuple":
        inner = ", ".join(render_expr(x) for x in e.items)
        if len(e.items) == 1:
            inner += ","
        return "(" + inner + ")"
    if e.node == "call":
        parts = [render_expr(x) for x in e.args]
        parts += [f"{k}={render_expr(x)}" for k, x in e.kwargs]
        return f"{render_expr(e.func)}({', '.join(parts)})"
    raise RenderError(f"unknown node {e.node!r}")


def render_value_expr(v: ValueRepr) -> str:
    """Render a concrete value as template-expression text.

    Tensors use the reserved constructors `__tensor__(values, shape, dtype)`
    and `__seeded__(shape, dtype, seed)` that every executor's expression
    evaluator must provide.
    """
    k = v.kind
    if k == "int":
        return repr(int(v.value))
    if k == "float":
        return repr(float(v.value))
    if k == "bool":
        return "True" if v.value else "False"
    if k == "str":
        return repr(v.value)
    if k == "none":
        return "None"
    if k == "list":
        return "[" + ", ".join(render_value_expr(x) for x in v.items) + "]"
    if k == "tuple":
        inner = ", ".join(render_value_expr(x) for x in v.items)
        if len(v.items) == 1:
            inner += ","
        return "(" + inner + ")"
    if k == "raw":
        return str(v.value)
    if k == "tensor":
        shape = "[" + ", ".join(str(d) for d in v.shape) + "]"
        if v.content is not None:
            vals = "[" + ", ".join(repr(x) for x in v.content) + "]"
            return f"__tensor__({vals}, {shape}, {v.dtype!r})"
        return f"__seeded__({shape}, {v.dtype!r}, {v.seed})"
    raise RenderError(f"unrenderable value kind {k!r}")


def _dotted_name(e: TExpr) -> str | None:
    if e.node == "name":
        return str(e.value)
    if e.node == "attr" and e.target is not None:
        base = _dotted_name(e.target)
        return None if base is None else f"{base}.{e.value}"
    return None


class _Unsupported(Exception):
    pass


def _convert(node: ast.AST, placeholder_of: dict[str, int]) -> TExpr:
    if isinstance(node, ast.Name):
        idx = placeholder_of.get(node.id)
        if idx is not None:
            return TExpr("placeholder", value=idx)
        return TExpr("name", value=node.id)
    if isinstance(node, ast.Attribute):
        return TExpr("attr", value=node.attr, target=_convert(node.value, placeholder_of))
    if isinstance(node, ast.Constant):
        if node.value is None or isinstance(node.value, (bool, int, float, str)):
            return TExpr("literal", value=node.value)
        raise _Unsupported(f"literal {node.value!r}")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        inner = _convert(node.operand, placeholder_of)
        if inner.node == "literal" and isinstance(inner.value, (int, float)):
            return TExpr("literal", value=-inner.value)
        raise _Unsupported("unary minus on non-number")
    if isinstance(node, ast.List):
        return TExpr("list", items=tuple(_convert(x, placeholder_of) for x in node.elts))
    if isinstance(node, ast.Tuple):
        return TExpr("tuple", items=tuple(_convert(x, placeholder_of) for x in node.elts))
    if isinstance(node, ast.Call):
        if any(isinstance(x, ast.Starred) for x in node.args):
            raise _Unsupported("starred argument")
        kwargs = []
        for kw in node.keywords:
            if kw.arg is None:
                raise _Unsupported("**kwargs")
            kwargs.append((kw.arg, _convert(kw.value, placeholder_of)))
        return TExpr(
            "call",
            func=_convert(node.func, placeholder_of),
            args=tuple(_convert(x, placeholder_of) for x in node.args),
            kwargs=tuple(kwargs),
        )
    raise _Unsupported(type(node).__name__)


@dataclass(frozen=True)
class MatchingTemplate:
    """A doc code block of `owner` rewritten as a call template of `invoked`."""

    owner: str
    invoked: str
    expr: TExpr


def extract_templates(entry: ApiEntry, db: CorpusDb) -> list[MatchingTemplate]:
    """Templates from the entry's code blocks.

    A block qualifies when it parses to a single expression in the minimal
    language and its outermost node is a call to a different corpus API.
    Occurrences of the owner's argument names become placeholders #i
    (1-based position).  Anything else is skipped, never mis-parsed.
    """
    placeholder_of = {a.name: a.position + 1 for a in entry.args}
    out: list[MatchingTemplate] = []
    for block in entry.code_blocks:
        try:
            module = ast.parse(block)
        except SyntaxError:
            continue
        if len(module.body) != 1 or not isinstance(module.body[0], ast.Expr):
            continue
        try:
            tree = _convert(module.body[0].value, placeholder_of)
        except _Unsupported:
            continue
        if tree.node != "call":
            continue
        invoked = _dotted_name(tree.func)
        if invoked is None or invoked == entry.qualified_name or invoked not in db.entries:
            continue
        out.append(MatchingTemplate(owner=entry.qualified_name, invoked=invoked, expr=tree))
    return out


# ---------------------------------------------------------------------------
# Invocation plans
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InvocationPlan:
    """How to invoke the target API from a source invocation."""

    source: str
    target: str
    kind: str  # arg-match | template
    channel: str = "signature"
    slot_map: tuple[tuple[int, int], ...] = ()  # (target position, source position)
    default_fills: tuple[tuple[str, ValueRepr], ...] = ()
    template_expr: TExpr | None = None

    def slot_map_dict(self) -> dict[int, int]:
        return dict(self.slot_map)

    def to_obj(self) -> dict[str, Any]:
        obj: dict[str, Any] = {
            "source": self.source,
            "target": self.target,
            "kind": self.kind,
            "channel": self.channel,
            "slot_map": {str(t): s for t, s in self.slot_map},
            "default_fills": {k: v.to_obj() for k, v in self.default_fills},
        }
        if self.template_expr is not None:
            obj["template"] = render_expr(self.template_expr)
        return obj


def synthesize_by_matching(
    s: ApiEntry, t: ApiEntry, channel: str = "signature"
) -> InvocationPlan | None:
    """Best argument match between s and t, or None when matching aborts.

    Matching aborts when any unmatched argument on either side is required:
    an unmatched required target argument has no value, and an unmatched
    required source argument signals the signatures do not correspond.
    Unmatched optional target arguments take their declared defaults.
    """
    if s.qualified_name == t.qualified_name:
        return None
    len_s, len_t = len(s.args), len(t.args)
    if len_s == 0 and len_t == 0:
        return InvocationPlan(s.qualified_name, t.qualified_name, "arg-match", channel)
    if len_s == 0 or len_t == 0:
        matched_src: set[int] = set()
        matched_tgt: set[int] = set()
        assignment: list[tuple[int, int]] = []
    else:
        weights = [
            [arg_similarity(a, b, len_s, len_t) for b in t.args]
            for a in s.args
        ]
        assignment = max_weight_match(weights)
        matched_src = {i for i, _ in assignment}
        matched_tgt = {j for _, j in assignment}

    for a in s.args:
        if a.position not in matched_src and not a.optional:
            return None
    for b in t.args:
        if b.position not in matched_tgt and not b.optional:
            return None

    slot_map = tuple(sorted((j, i) for i, j in assignment))
    fills = tuple(
        (b.name, b.default)
        for b in t.args
        if b.position not in matched_tgt and b.default is not None
    )
    return InvocationPlan(
        s.qualified_name, t.qualified_name, "arg-match", channel,
        slot_map=slot_map, default_fills=fills,
    )


def plan_from_template(tpl: MatchingTemplate, channel: str = "template") -> InvocationPlan:
    return InvocationPlan(
        tpl.owner, tpl.invoked, "template", channel, template_expr=tpl.expr
    )


# ---------------------------------------------------------------------------
# Rendering plans against concrete records
# ---------------------------------------------------------------------------

def effective_source_args(entry: ApiEntry, record: InvocationRecord) -> list[ValueRepr | None]:
    """Source argument vector by position: provided values, else defaults."""
    vals: list[ValueRepr | None] = [None] * len(entry.args)
    for i, v in enumerate(record.positional):
        if i < len(vals):
            vals[i] = v
    kw = record.keyword_dict()
    for a in entry.args:
        if vals[a.position] is None:
            if a.name in kw:
                vals[a.position] = kw[a.name]
            elif a.default is not None:
                vals[a.position] = a.default
    return vals


def _substitute(e: TExpr, eff: list[ValueRepr | None]) -> ValueRepr:
    """Template argument -> concrete ValueRepr (raw text for composite exprs)."""
    if e.node == "placeholder":
        v = eff[e.value - 1] if 0 < e.value <= len(eff) else None
        if v is None:
            raise RenderError(f"no value for placeholder #{e.value}")
        return v
    if e.node == "literal":
        v = e.value
        if v is None:
            return ValueRepr("none")
        if isinstance(v, bool):
            return ValueRepr("bool", v)
        if isinstance(v, int):
            return ValueRepr("int", v)
        if isinstance(v, float):
            return ValueRepr("float", v)
        return ValueRepr("str", v)
    return vraw(_render_substituted(e, eff))


def _render_substituted(e: TExpr, eff: list[ValueRepr | None]) -> str:
    if e.node == "placeholder":
        v = eff[e.value - 1] if 0 < e.value <= len(eff) else None
        if v is None:
            raise RenderError(f"no value for placeholder #{e.value}")
        return render_value_expr(v)
    if e.node in ("literal", "name"):
        return render_expr(e)
    if e.node == "attr":
        return f"{_render_substituted(e.target, eff)}.{e.value}"
    if e.node == "list":
        return "[" + ", ".join(_render_substituted(x, eff) for x in e.items) + "]"
    if e.node == "tuple":
        inner = ", ".join(_render_substituted(x, eff) for x in e.items)
        if len(e.items) == 1:
            inner += ","
        return "(" + inner + ")"
    if e.node == "call":
        parts = [_render_substituted(x, eff) for x in e.args]
        parts += [f"{k}={_render_substituted(x, eff)}" for k, x in e.kwargs]
        return f"{_render_substituted(e.func, eff)}({', '.join(parts)})"
    raise RenderError(f"unknown node {e.node!r}")


def build_target_invocation(
    plan: InvocationPlan,
    source_entry: ApiEntry,
    target_entry: ApiEntry,
    record: InvocationRecord,
) -> tuple[list[ValueRepr], dict[str, ValueRepr]]:
    """Concrete target argument bundle for one source record.

    Slot-mapped arguments stay positional while they form a contiguous
    prefix, then switch to keywords; default fills are always keywords.
    Template plans take the outermost call's arguments with placeholders
    substituted (composite expressions become raw expression text).
    """
    eff = effective_source_args(source_entry, record)

    if plan.kind == "template":
        expr = plan.template_expr
        if expr is None or expr.node != "call":
            raise RenderError("template plan without a call expression")
        positional = [_substitute(x, eff) for x in expr.args]
        keyword = {k: _substitute(x, eff) for k, x in expr.kwargs}
        return positional, keyword

    slot = plan.slot_map_dict()
    positional: list[ValueRepr] = []
    keyword: dict[str, ValueRepr] = {}
    prefix = True
    for b in target_entry.args:
        if b.position in slot:
            v = eff[slot[b.position]]
            if v is None:
                raise RenderError(
                    f"{plan.source}: no value for source argument {slot[b.position]}"
                )
            if prefix:
                positional.append(v)
            else:
                keyword[b.name] = v
        else:
            prefix = False
    for name, v in plan.default_fills:
        keyword[name] = v
    return positional, keyword
