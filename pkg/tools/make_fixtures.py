#!/usr/bin/env python3
"""Regenerate the shipped `mini` corpus, labels, and mock-script fixtures.

The corpus describes the toy dense-array library implemented by the
executor.  Traced invocations are chosen so that unintended candidate pairs
get rejected during verification (type-check walls and probe inputs) while
the seeded relations verify and the seeded bugs surface under fuzzing:

* alias pair        mini.total  == mini.sum          (value-equivalent)
* rewrite pair      mini.vsplit == mini.tensor_split (value-equivalent)
* template pair     mini.scatter == mini.scatter_add via doc code block
* similar pair      mini.avg_pool ~ mini.max_pool    (status-equivalent)
* value bug         mini.kthvalue / mini.kth_value disagree for out-of-range k
* status bug        mini.avg_pool skips the negative-size check max_pool has
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from pairfuzz.values import tensor, vint, vfloat, vlist, vstr

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

F32 = "f32"

# Varied fractional, non-symmetric tensors so that no two distinct
# operations agree on every verifying input by accident.
A23 = [[0.5, -1.25, 2.75], [3.5, 0.125, -2.25]]
B23 = [[1.5, 0.75, -0.5], [-1.0, 2.5, 0.25]]
C23 = [[2.25, 1.0, -3.5], [0.625, -0.875, 1.75]]
M32 = [[1.5, 0.75], [-0.5, -1.0], [2.5, 0.25]]
M14 = [[0.5, -1.25, 2.75, 3.5]]
M42 = [[1.5, 0.75], [-0.5, -1.0], [2.5, 0.25], [0.125, 2.25]]
M43 = [[0.5, -1.25, 2.75], [3.5, 0.125, -2.25], [1.5, 0.75, -0.5], [-1.0, 2.5, 0.25]]
M62 = [[0.5, -1.25], [2.75, 3.5], [0.125, -2.25], [1.5, 0.75], [-0.5, -1.0], [2.5, 0.25]]
M22 = [[0.5, -1.25], [2.75, 3.5]]
R3 = [0.25, -1.5, 2.125]
R4 = [1.5, -0.75, 2.25, 0.625]
R4B = [0.75, 2.5, -0.125, 1.0]
R5 = [0.5, -1.25, 2.75, 3.5, 0.125]
R6 = [0.5, -1.25, 2.75, 3.5, 0.125, -2.25]


def t(nested, dtype=F32):
    """Tensor ValueRepr from a nested list."""
    if not nested or not isinstance(nested[0], list):
        return tensor([len(nested)], dtype, values=list(nested))
    rows, cols = len(nested), len(nested[0])
    flat = [x for row in nested for x in row]
    return tensor([rows, cols], dtype, values=flat)


def empty(shape, dtype=F32):
    return tensor(shape, dtype, values=[])


def arg(name, position, types, optional=False, default=None):
    out = {
        "name": name,
        "position": position,
        "optional": optional,
        "observed_types": sorted(types),
    }
    if default is not None:
        out["default"] = default.to_obj()
    return out


def api(name, args, description, code_blocks=()):
    return {
        "name": name,
        "args": args,
        "description": description,
        "code_blocks": list(code_blocks),
    }


def inv(api_name, positional, keyword=None):
    return {
        "api": api_name,
        "positional": [v.to_obj() for v in positional],
        "keyword": {k: v.to_obj() for k, v in (keyword or {}).items()},
        "origin": "seed",
    }


TENSOR = {"tensor"}
APIS = [
    # creation
    api("mini.array",
        [arg("values", 0, {"list"}), arg("shape", 1, {"list"}),
         arg("dtype", 2, {"str"}, optional=True, default=vstr(F32))],
        "Builds a tensor from a flat list of values arranged into the given shape."),
    api("mini.zeros",
        [arg("shape", 0, {"list"}),
         arg("dtype", 1, {"str"}, optional=True, default=vstr(F32))],
        "Creates a tensor of the given shape filled with zeros."),
    api("mini.ones",
        [arg("shape", 0, {"list"}),
         arg("dtype", 1, {"str"}, optional=True, default=vstr(F32))],
        "Creates a tensor of the given shape filled with ones."),
    api("mini.full",
        [arg("shape", 0, {"list"}), arg("fill_value", 1, {"float"}),
         arg("dtype", 2, {"str"}, optional=True, default=vstr(F32))],
        "Creates a tensor of the given shape filled with the given value."),
    api("mini.rand",
        [arg("shape", 0, {"list"}),
         arg("dtype", 1, {"str"}, optional=True, default=vstr(F32)),
         arg("seed", 2, {"int"}, optional=True, default=vint(0))],
        "Creates a tensor of the given shape filled with deterministic pseudo-random values in [0, 1)."),
    # elementwise unary
    api("mini.negate", [arg("x", 0, TENSOR)],
        "Returns a tensor with every element of the input negated.",
        code_blocks=["mini.negate(x)"]),
    api("mini.absolute", [arg("x", 0, TENSOR)],
        "Returns a tensor with the absolute value of every element of the input."),
    api("mini.square", [arg("x", 0, TENSOR)],
        "Returns a tensor with every element of the input squared."),
    api("mini.sqrt", [arg("x", 0, TENSOR)],
        "Returns a tensor with the square root of every element of the input."),
    api("mini.identity", [arg("x", 0, TENSOR)],
        "Returns the input tensor unchanged."),
    # reductions
    api("mini.sum", [arg("x", 0, TENSOR)],
        "Computes the sum of all elements of the input tensor."),
    api("mini.total", [arg("x", 0, TENSOR)],
        "Computes the sum of all elements of the input tensor.",
        code_blocks=["mini.total(x)"]),
    api("mini.mean", [arg("x", 0, TENSOR)],
        "Computes the mean of all elements of the input tensor."),
    # shape ops
    api("mini.reshape", [arg("x", 0, TENSOR), arg("shape", 1, {"list"})],
        "Returns a tensor with the same elements as the input arranged into a new shape."),
    api("mini.transpose", [arg("x", 0, TENSOR)],
        "Returns the input tensor with its dimension order reversed."),
    api("mini.flatten", [arg("x", 0, TENSOR)],
        "Returns a one-dimensional tensor with all elements of the input."),
    # elementwise binary
    api("mini.add", [arg("x", 0, TENSOR), arg("y", 1, TENSOR)],
        "Returns the elementwise sum of two tensors of identical shape."),
    api("mini.subtract", [arg("x", 0, TENSOR), arg("y", 1, TENSOR)],
        "Returns the elementwise difference of two tensors of identical shape."),
    api("mini.multiply", [arg("x", 0, TENSOR), arg("y", 1, TENSOR)],
        "Returns the elementwise product of two tensors of identical shape."),
    api("mini.divide", [arg("x", 0, TENSOR), arg("y", 1, TENSOR)],
        "Returns the elementwise quotient of two tensors of identical shape."),
    api("mini.maximum", [arg("x", 0, TENSOR), arg("y", 1, TENSOR)],
        "Returns the elementwise maximum of two tensors of identical shape."),
    api("mini.minimum", [arg("x", 0, TENSOR), arg("y", 1, TENSOR)],
        "Returns the elementwise minimum of two tensors of identical shape."),
    api("mini.matmul", [arg("x", 0, TENSOR), arg("y", 1, TENSOR)],
        "Computes the matrix product of two rank-2 tensors with conforming shapes."),
    # splitting
    api("mini.vsplit", [arg("x", 0, TENSOR), arg("sections", 1, {"int"})],
        "Splits the input tensor into equal parts along its first dimension according to sections.",
        code_blocks=["parts = mini.vsplit(x, sections)"]),
    api("mini.tensor_split",
        [arg("x", 0, TENSOR), arg("sections", 1, {"int"}),
         arg("dim", 2, {"int"}, optional=True, default=vint(0))],
        "Splits the input tensor into equal parts along the given dimension according to sections."),
    # order statistics (seeded value bug: no range check on k)
    api("mini.kthvalue", [arg("x", 0, TENSOR), arg("k", 1, {"int"})],
        "Returns the k-th smallest element of the input tensor."),
    api("mini.kth_value", [arg("x", 0, TENSOR), arg("k", 1, {"int"})],
        "Returns the k-th smallest element of the input tensor."),
    # pooling (seeded status bug: avg_pool skips the negative-size check)
    api("mini.avg_pool", [arg("x", 0, TENSOR), arg("output_size", 1, {"list"})],
        "Applies adaptive average pooling over a one-dimensional tensor to produce the given output size."),
    api("mini.max_pool", [arg("x", 0, TENSOR), arg("output_size", 1, {"list"})],
        "Applies adaptive maximum pooling over a one-dimensional tensor to produce the given output size."),
    # scatter (template pair via the doc code block)
    api("mini.scatter",
        [arg("indices", 0, {"list"}), arg("updates", 1, TENSOR), arg("shape", 2, {"list"})],
        "Builds a tensor of the given shape by adding the update values at the given indices into zeros.",
        code_blocks=["mini.scatter_add(mini.zeros(shape, updates.dtype), indices, updates)"]),
    api("mini.scatter_add",
        [arg("base", 0, TENSOR), arg("indices", 1, {"list"}), arg("updates", 2, TENSOR)],
        "Returns a copy of the base tensor with the update values added at the given indices."),
    # dtype conversion
    api("mini.cast", [arg("x", 0, TENSOR), arg("dtype", 1, {"str"})],
        "Returns a copy of the input tensor converted to the given element type."),
]

INVOCATIONS = [
    inv("mini.zeros", [vlist([vint(2), vint(2)]), vstr(F32)]),
    inv("mini.zeros", [vlist([vint(3)]), vstr("i64")]),
    inv("mini.zeros", [vlist([vint(2), vint(3)]), vstr("f64")]),
    inv("mini.negate", [t(A23)]),
    inv("mini.negate", [t(R5)]),
    inv("mini.negate", [empty([0])]),
    inv("mini.total", [t(A23)]),
    inv("mini.total", [t(R4)]),
    inv("mini.total", [empty([0])]),
    inv("mini.identity", [t(M22)]),
    inv("mini.identity", [t(R3)]),
    inv("mini.reshape", [t(A23), vlist([vint(3), vint(2)])]),
    inv("mini.reshape", [t(R6), vlist([vint(2), vint(3)])]),
    inv("mini.add", [t(A23), t(B23)]),
    inv("mini.add", [t(R4), t(R4B)]),
    inv("mini.multiply", [t(B23), t(C23)]),
    inv("mini.multiply", [t(R4B), t(R4)]),
    inv("mini.matmul", [t(A23), t(M32)]),
    inv("mini.matmul", [t(M14), t(M42)]),
    # probe (x=[0,3], sections=1): splits fine but rejects candidates that
    # choke on empty input, e.g. the kthvalue family
    inv("mini.vsplit", [t(M43), vint(2)]),
    inv("mini.vsplit", [t(M62), vint(3)]),
    inv("mini.vsplit", [empty([0, 3]), vint(1)]),
    inv("mini.vsplit", [t(M22), vint(1)]),
    # probe (5 elements, k=2): 2 does not divide 5, rejecting the split family
    inv("mini.kthvalue", [t(R5), vint(2)]),
    inv("mini.kthvalue", [t(A23), vint(4)]),
    inv("mini.kthvalue", [t(R4), vint(1)]),
    inv("mini.avg_pool", [t(R6), vlist([vint(3)])]),
    inv("mini.avg_pool", [t(R4), vlist([vint(2)])]),
    inv("mini.avg_pool", [t(R5), vlist([vint(5)])]),
    inv("mini.scatter", [vlist([vint(0), vint(2)]), t([0.5, -1.25]), vlist([vint(4)])]),
    inv("mini.scatter", [vlist([vint(1)]), t([2.75]), vlist([vint(3)])]),
    inv("mini.cast", [t(M22), vstr("i32")]),
    inv("mini.cast", [t(R3), vstr("f64")]),
]

LABELS = {
    "pairs": [
        {"a": "mini.total", "b": "mini.sum", "relation": "value", "bug": False},
        {"a": "mini.vsplit", "b": "mini.tensor_split", "relation": "value", "bug": False},
        {"a": "mini.scatter", "b": "mini.scatter_add", "relation": "value", "bug": False,
         "channel": "template"},
        {"a": "mini.kthvalue", "b": "mini.kth_value", "relation": "value", "bug": True,
         "oracle": "value"},
        {"a": "mini.avg_pool", "b": "mini.max_pool", "relation": "status", "bug": True,
         "oracle": "status"},
    ]
}

# Scripted behavior for the in-process mock executor: everything succeeds
# and a value token equal to the input hash, so identity-mapped pairs come
# out value-equivalent and everything else status-equivalent.  mini.sqrt is
# scripted to raise so campaigns exercise the rejection path too.
MOCK_SCRIPT = {
    "default": {"status": "success", "value": "=input"},
    "rules": [
        {"api": "mini.sqrt", "status": "exception", "exception_class": "DomainError"},
    ],
}


def main() -> None:
    FIXTURES.mkdir(exist_ok=True)
    corpus = {"apis": APIS, "invocations": INVOCATIONS}
    (FIXTURES / "mini_corpus.json").write_text(
        json.dumps(corpus, indent=1, sort_keys=True) + "\n", encoding="utf-8"
    )
    (FIXTURES / "mini_labels.json").write_text(
        json.dumps(LABELS, indent=1, sort_keys=True) + "\n", encoding="utf-8"
    )
    (FIXTURES / "mini_mock_script.json").write_text(
        json.dumps(MOCK_SCRIPT, indent=1, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"wrote {len(APIS)} apis, {len(INVOCATIONS)} invocations")


if __name__ == "__main__":
    main()
