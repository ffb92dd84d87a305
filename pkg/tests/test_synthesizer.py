import itertools
import json
import random
from functools import lru_cache

import numpy as np
import pytest

from pairfuzz.corpus import load_corpus, make_record
from pairfuzz.synthesizer import (
    MatchingTemplate,
    arg_similarity,
    build_target_invocation,
    extract_templates,
    levenshtein,
    max_weight_match,
    name_similarity,
    plan_from_template,
    pos_similarity,
    render_expr,
    render_value_expr,
    synthesize_by_matching,
    type_similarity,
)
from pairfuzz.values import tensor, vint, vlist, vstr
from tests.conftest import entry


# --- independent oracles -----------------------------------------------------

def edit_distance_oracle(a: str, b: str) -> int:
    """Plain recursive definition of Levenshtein distance, memoized."""

    @lru_cache(maxsize=None)
    def d(i: int, j: int) -> int:
        if i == 0:
            return j
        if j == 0:
            return i
        return min(
            d(i - 1, j) + 1,
            d(i, j - 1) + 1,
            d(i - 1, j - 1) + (a[i - 1] != b[j - 1]),
        )

    return d(len(a), len(b))


def brute_force_max_assignment(weights) -> float:
    """Maximum total over all injective row->column assignments."""
    W = np.asarray(weights, dtype=float)
    r, c = W.shape
    n = max(r, c)
    padded = np.zeros((n, n))
    padded[:r, :c] = W
    return max(
        sum(padded[i][perm[i]] for i in range(n))
        for perm in itertools.permutations(range(n))
    )


# --- similarity formulas ------------------------------------------------------

class TestLevenshtein:
    def test_against_recursive_oracle(self):
        rng = random.Random(5)
        for _ in range(200):
            a = "".join(rng.choice("abcd_") for _ in range(rng.randint(0, 8)))
            b = "".join(rng.choice("abcd_") for _ in range(rng.randint(0, 8)))
            assert levenshtein(a, b) == edit_distance_oracle(a, b)


def arg(name, types=(), position=0):
    import dataclasses

    from pairfuzz.corpus import ArgSpec

    return ArgSpec(name=name, position=position, observed_types=frozenset(types))


class TestNameSimilarity:
    def test_identical(self):
        assert name_similarity(arg("input"), arg("input")) == pytest.approx(1.0)

    def test_fully_different_single_char(self):
        assert name_similarity(arg("x"), arg("y")) == 0.0

    def test_dim_vs_dims(self):
        # oracle: distance 1, max length 4 -> 1 - 1/4
        assert edit_distance_oracle("dim", "dims") == 1
        assert name_similarity(arg("dim"), arg("dims")) == pytest.approx(0.75, abs=1e-12)

    def test_both_empty_defined_as_one(self):
        assert name_similarity(arg(""), arg("")) == 1.0


class TestTypeSimilarity:
    def test_full_containment(self):
        assert type_similarity(arg("a", {"tensor"}), arg("b", {"tensor", "int"})) == 1.0

    def test_partial(self):
        assert type_similarity(arg("a", {"tensor", "int"}), arg("b", {"tensor"})) == 0.5

    def test_empty_target_set_gives_zero(self):
        assert type_similarity(arg("a", {"tensor"}), arg("b", set())) == 0.0

    def test_empty_source_set_gives_zero(self):
        assert type_similarity(arg("a", set()), arg("b", {"tensor"})) == 0.0


class TestPosSimilarity:
    def test_same_index(self):
        assert pos_similarity(arg("a", position=0), arg("b", position=0), 3, 3) == 1.0

    def test_distance_two_of_three(self):
        assert pos_similarity(arg("a", position=0), arg("b", position=2), 3, 3) == pytest.approx(1 / 3)

    def test_distance_one_of_two(self):
        assert pos_similarity(arg("a", position=0), arg("b", position=1), 2, 2) == 0.5


class TestArgSimilarity:
    def test_identical_argument_scores_three(self):
        a = arg("input", {"tensor"}, 0)
        b = arg("input", {"tensor"}, 0)
        assert arg_similarity(a, b, 2, 3) == pytest.approx(3.0, abs=1e-12)

    def test_range_bounds(self):
        rng = random.Random(9)
        names = ["", "x", "dim", "input", "indices_or_sections", "output"]
        types = [set(), {"tensor"}, {"int"}, {"tensor", "int"}, {"list", "str"}]
        for _ in range(300):
            ls, lt = rng.randint(1, 6), rng.randint(1, 6)
            a = arg(rng.choice(names), rng.choice(types), rng.randrange(ls))
            b = arg(rng.choice(names), rng.choice(types), rng.randrange(lt))
            for part in (
                name_similarity(a, b),
                type_similarity(a, b),
                pos_similarity(a, b, ls, lt),
            ):
                assert 0.0 <= part <= 1.0 + 1e-12
            assert 0.0 <= arg_similarity(a, b, ls, lt) <= 3.0 + 1e-12


# --- Kuhn-Munkres -------------------------------------------------------------

class TestMaxWeightMatch:
    def test_two_by_two_example(self):
        pairs = max_weight_match([[3.0, 1.9], [1.1, 2.5]])
        assert pairs == [(0, 0), (1, 1)]
        assert sum([3.0, 2.5]) == pytest.approx(brute_force_max_assignment([[3.0, 1.9], [1.1, 2.5]]))

    def test_diagonal_dominant_matrix(self):
        W = np.eye(4) * 5.0 + 0.1
        assert max_weight_match(W) == [(i, i) for i in range(4)]

    def test_single_row_picks_max(self):
        assert max_weight_match([[0.1, 0.9, 0.5]]) == [(0, 1)]

    def test_rectangular_against_brute_force(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            r = int(rng.integers(1, 6))
            c = int(rng.integers(1, 6))
            W = rng.random((r, c))
            pairs = max_weight_match(W)
            got = sum(W[i, j] for i, j in pairs)
            assert got == pytest.approx(brute_force_max_assignment(W), abs=1e-9)
            assert len({i for i, _ in pairs}) == len(pairs)
            assert len({j for _, j in pairs}) == len(pairs)

    def test_integer_ties_still_optimal_and_deterministic(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            W = rng.integers(0, 3, size=(4, 4)).astype(float)
            pairs = max_weight_match(W)
            got = sum(W[i, j] for i, j in pairs)
            assert got == brute_force_max_assignment(W)
            assert max_weight_match(W) == pairs

    def test_rejects_bad_weights(self):
        with pytest.raises(ValueError):
            max_weight_match([[1.0, float("inf")]])
        with pytest.raises(ValueError):
            max_weight_match([[-0.5]])


# --- plan synthesis -----------------------------------------------------------

def vsplit_like_entries():
    s = entry(
        "mini.vsplit",
        [("x", {"tensor"}), ("sections", {"int"})],
        description="Splits the input tensor into equal parts along its first dimension.",
    )
    t = entry(
        "mini.tensor_split",
        [("x", {"tensor"}), ("sections", {"int"}), ("dim", {"int"}, True, vint(0))],
        description="Splits the input tensor into equal parts along the given dimension.",
    )
    return s, t


class TestSynthesizeByMatching:
    def test_split_pair_maps_identity_and_fills_dim_default(self):
        s, t = vsplit_like_entries()
        plan = synthesize_by_matching(s, t)
        assert plan is not None
        assert plan.slot_map_dict() == {0: 0, 1: 1}
        assert dict(plan.default_fills) == {"dim": vint(0)}

    def test_unmatched_required_target_argument_aborts(self):
        s = entry("m.s", [("a", {"int"}), ("b", {"int"})])
        t = entry(
            "m.t", [("a", {"int"}), ("b", {"int"}), ("c", {"int"})]
        )
        assert synthesize_by_matching(s, t) is None

    def test_unmatched_required_source_argument_aborts(self):
        s = entry("m.s", [("a", {"int"}), ("b", {"int"}), ("c", {"int"})])
        t = entry("m.t", [("a", {"int"}), ("b", {"int"})])
        assert synthesize_by_matching(s, t) is None

    def test_unmatched_optional_source_argument_is_dropped(self):
        s = entry("m.s", [("a", {"int"}), ("b", {"int"}), ("c", {"int"}, True, vint(7))])
        t = entry("m.t", [("a", {"int"}), ("b", {"int"})])
        plan = synthesize_by_matching(s, t)
        assert plan is not None
        assert plan.slot_map_dict() == {0: 0, 1: 1}
        assert plan.default_fills == ()

    def test_identical_signatures_identity_map_no_fills(self):
        s = entry("m.s", [("x", {"tensor"}), ("y", {"tensor"})])
        t = entry("m.t", [("x", {"tensor"}), ("y", {"tensor"})])
        plan = synthesize_by_matching(s, t)
        assert plan.slot_map_dict() == {0: 0, 1: 1}
        assert plan.default_fills == ()

    def test_required_target_args_always_bound(self):
        rng = random.Random(31)
        names = ["x", "y", "dim", "input", "out", "k"]
        for _ in range(200):
            def mk(prefix, n):
                return entry(
                    f"m.{prefix}",
                    [
                        (
                            rng.choice(names),
                            {rng.choice(["tensor", "int", "list"])},
                            *( (True, vint(0)) if rng.random() < 0.4 else () ),
                        )
                        for _ in range(n)
                    ],
                )

            s = mk("s", rng.randint(0, 4))
            t = mk("t", rng.randint(0, 4))
            plan = synthesize_by_matching(s, t)
            if plan is None:
                continue
            bound = set(plan.slot_map_dict()) | {
                a.position for a in t.args if a.name in dict(plan.default_fills)
            }
            for a in t.args:
                if not a.optional:
                    assert a.position in bound

    def test_plan_serialization_is_deterministic(self):
        s, t = vsplit_like_entries()
        p1 = synthesize_by_matching(s, t)
        p2 = synthesize_by_matching(s, t)
        assert json.dumps(p1.to_obj(), sort_keys=True) == json.dumps(p2.to_obj(), sort_keys=True)


# --- templates ----------------------------------------------------------------

class TestExtractTemplates:
    def test_scatter_template_from_fixture(self, mini_db):
        tpls = extract_templates(mini_db.entries["mini.scatter"], mini_db)
        assert len(tpls) == 1
        tpl = tpls[0]
        assert tpl.owner == "mini.scatter"
        assert tpl.invoked == "mini.scatter_add"
        assert render_expr(tpl.expr) == "mini.scatter_add(mini.zeros(#3, #2.dtype), #1, #2)"

    def test_entry_without_code_blocks(self, mini_db):
        assert extract_templates(mini_db.entries["mini.add"], mini_db) == []

    def test_owner_only_call_yields_nothing(self, mini_db):
        # mini.total's block invokes only mini.total itself
        assert extract_templates(mini_db.entries["mini.total"], mini_db) == []

    def test_assignment_block_is_skipped(self, mini_db):
        # mini.vsplit's doc block is a statement, not a single expression
        assert extract_templates(mini_db.entries["mini.vsplit"], mini_db) == []

    def test_unparseable_block_is_skipped(self, mini_db):
        e = entry("mini.weird", [("x", {"tensor"})], code_blocks=["this is ( not python"])
        assert extract_templates(e, mini_db) == []

    def test_call_to_non_corpus_api_is_skipped(self, mini_db):
        e = entry("mini.weird", [("x", {"tensor"})], code_blocks=["other.lib(x)"])
        assert extract_templates(e, mini_db) == []


class TestRendering:
    def test_arg_match_rendering_with_default_fill(self, mini_db):
        s, t = vsplit_like_entries()
        plan = synthesize_by_matching(s, t)
        rec = make_record("mini.vsplit", [tensor([2, 2], "f32", values=[1, 2, 3, 4]), vint(2)])
        positional, keyword = build_target_invocation(plan, s, t, rec)
        assert positional == [rec.positional[0], vint(2)]
        assert keyword == {"dim": vint(0)}

    def test_gap_in_slot_map_switches_to_keywords(self):
        s = entry("m.s", [("a", {"int"}), ("c", {"int"})])
        t = entry(
            "m.t",
            [("a", {"int"}), ("b", {"int"}, True, vint(5)), ("c", {"int"})],
        )
        plan = synthesize_by_matching(s, t)
        assert plan is not None
        rec = make_record("m.s", [vint(1), vint(3)])
        positional, keyword = build_target_invocation(plan, s, t, rec)
        assert positional == [vint(1)]
        assert keyword == {"b": vint(5), "c": vint(3)}

    def test_template_rendering_substitutes_placeholders(self, mini_db):
        tpl = extract_templates(mini_db.entries["mini.scatter"], mini_db)[0]
        plan = plan_from_template(tpl)
        rec = make_record(
            "mini.scatter",
            [vlist([vint(0), vint(2)]), tensor([2], "f32", values=[0.5, -1.25]), vlist([vint(4)])],
        )
        positional, keyword = build_target_invocation(
            plan,
            mini_db.entries["mini.scatter"],
            mini_db.entries["mini.scatter_add"],
            rec,
        )
        assert keyword == {}
        assert len(positional) == 3
        base, indices, updates = positional
        assert base.kind == "raw"
        assert base.value == "mini.zeros([4], __tensor__([0.5, -1.25], [2], 'f32').dtype)"
        assert indices == rec.positional[0]
        assert updates == rec.positional[1]

    def test_render_value_expr_forms(self):
        assert render_value_expr(vint(-3)) == "-3"
        assert render_value_expr(vstr("f32")) == "'f32'"
        assert render_value_expr(vlist([vint(1), vint(2)])) == "[1, 2]"
        assert (
            render_value_expr(tensor([2], "f64", seed=9))
            == "__seeded__([2], 'f64', 9)"
        )
