"""Condition language: parse, print, evaluate, and the truth-table oracle."""
from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modulecanvas.conditions import (
    METRICS,
    OPERATORS,
    And,
    Comparison,
    Completed,
    ConditionSyntaxError,
    InvalidCondition,
    Not,
    Or,
    evaluate,
    parse,
    tree_depth,
    unparse,
    validate,
)
from modulecanvas.model import OutcomeRecord

from support import (
    OUTCOME_GRID,
    compile_condition_source,
    python_truth,
    random_condition,
)


def outcome(score=0.0, attempts=1, duration=0.0, completed=False):
    return OutcomeRecord(
        node_id="n",
        score_percent=score,
        completed=completed,
        attempts=attempts,
        duration_seconds=duration,
    )


class TestParse:
    def test_score_threshold(self):
        assert parse("score >= 80") == Comparison("score", ">=", 80)

    def test_and_not_parenthesized(self):
        got = parse("completed and not (attempts > 3)")
        assert got == And((Completed(), Not(Comparison("attempts", ">", 3))))

    def test_truncated_input_positions_diagnostic(self):
        with pytest.raises(ConditionSyntaxError) as err:
            parse("score >= ")
        diag = err.value.diagnostic
        assert (diag.line, diag.column) == (1, 10)
        assert diag.expected == "number"

    def test_keywords_case_insensitive(self):
        assert parse("Score >= 80 AND Completed") == parse("score >= 80 and completed")

    def test_whitespace_insignificant(self):
        assert parse("score>=80") == parse("  score \n >= \t 80 ")

    def test_or_binds_looser_than_and(self):
        got = parse("completed and score > 50 or attempts == 1")
        assert isinstance(got, Or)
        assert isinstance(got.children[0], And)

    def test_nary_chains_stay_flat(self):
        got = parse("score > 1 and score > 2 and score > 3")
        assert isinstance(got, And)
        assert len(got.children) == 3

    def test_score_literal_out_of_range(self):
        with pytest.raises(ConditionSyntaxError) as err:
            parse("score >= 150")
        assert "outside [0, 100]" in err.value.diagnostic.message
        # other metrics have no such cap
        parse("duration >= 150")

    def test_unknown_word(self):
        with pytest.raises(ConditionSyntaxError) as err:
            parse("points >= 3")
        assert err.value.diagnostic.column == 1

    def test_trailing_garbage(self):
        with pytest.raises(ConditionSyntaxError):
            parse("completed completed")

    def test_unclosed_paren(self):
        with pytest.raises(ConditionSyntaxError):
            parse("(completed or score > 4")

    def test_malformed_number(self):
        with pytest.raises(ConditionSyntaxError):
            parse("score >= 80.")

    def test_source_length_cap(self):
        with pytest.raises(ConditionSyntaxError):
            parse("completed" + " " * 5000)

    def test_depth_cap(self):
        deep = "not " * 40 + "completed"
        with pytest.raises(ConditionSyntaxError):
            parse(deep)
        assert tree_depth(parse("not " * 31 + "completed")) == 32


class TestUnparse:
    def test_comparison_canonical(self):
        assert unparse(Comparison("score", ">=", 80)) == "score >= 80"

    def test_or_of_completed_and_duration(self):
        c = Or((Completed(), Comparison("duration", "<", 60)))
        assert unparse(c) == "completed or duration < 60"
        assert parse(unparse(c)) == c

    def test_double_not_is_not_simplified(self):
        assert unparse(Not(Not(Completed()))) == "not not completed"

    def test_integral_float_prints_as_int(self):
        assert unparse(Comparison("score", ">", 80.0)) == "score > 80"

    def test_nested_same_kind_keeps_parens(self):
        c = And((And((Completed(), Completed())), Comparison("score", ">", 1)))
        assert unparse(c) == "(completed and completed) and score > 1"
        assert parse(unparse(c)) == c

    def test_roundtrip_random_trees(self):
        rng = random.Random(20240811)
        for _ in range(300):
            c = random_condition(rng)
            validate(c)
            assert parse(unparse(c)) == c


class TestEvaluate:
    def test_score_branch_true(self):
        assert evaluate(parse("score >= 80"), outcome(score=85)) is True

    def test_boundary_inclusive(self):
        assert evaluate(parse("score >= 80"), outcome(score=80)) is True

    def test_strict_comparator_excludes_boundary(self):
        assert evaluate(parse("score > 80"), outcome(score=80)) is False

    def test_metric_bindings(self):
        o = outcome(score=10, attempts=4, duration=120, completed=True)
        assert evaluate(parse("attempts >= 4"), o)
        assert evaluate(parse("duration == 120"), o)
        assert evaluate(parse("completed"), o)
        assert not evaluate(parse("not completed"), o)

    def test_monotone_in_score(self):
        cond = parse("score >= 40")
        previous = False
        for score in range(0, 101, 5):
            value = evaluate(cond, outcome(score=score))
            assert value >= previous  # never flips back to False
            previous = value

    def test_totality_over_random_trees_and_grid(self):
        rng = random.Random(99)
        for _ in range(100):
            cond = random_condition(rng)
            for score, attempts, duration, completed in OUTCOME_GRID:
                value = evaluate(
                    cond, outcome(score, attempts, duration, completed)
                )
                assert isinstance(value, bool)

    def test_agrees_with_python_truth_oracle(self):
        rng = random.Random(4242)
        for _ in range(200):
            cond = random_condition(rng)
            code = compile_condition_source(unparse(cond))
            for score, attempts, duration, completed in OUTCOME_GRID:
                expected = python_truth(code, score, attempts, duration, completed)
                got = evaluate(cond, outcome(score, attempts, duration, completed))
                assert got == expected, unparse(cond)


def _comparisons():
    ranges = {"score": 100, "attempts": 50, "duration": 3600}
    return st.one_of(
        st.builds(
            Comparison,
            st.just(metric),
            st.sampled_from(OPERATORS),
            st.integers(0, ranges[metric]),
        )
        for metric in METRICS
    )


def _condition_trees():
    return st.recursive(
        st.one_of(st.builds(Completed), _comparisons()),
        lambda children: st.one_of(
            st.builds(Not, children),
            st.builds(And, st.lists(children, min_size=2, max_size=3).map(tuple)),
            st.builds(Or, st.lists(children, min_size=2, max_size=3).map(tuple)),
        ),
        max_leaves=12,
    )


class TestProperties:
    @given(_condition_trees())
    @settings(max_examples=300)
    def test_roundtrip_holds_for_generated_trees(self, condition):
        validate(condition)
        assert parse(unparse(condition)) == condition

    @given(
        _condition_trees(),
        st.floats(0, 100),
        st.integers(1, 20),
        st.floats(0, 7200),
        st.booleans(),
    )
    @settings(max_examples=200)
    def test_evaluation_is_total(self, condition, score, attempts, duration, completed):
        value = evaluate(
            condition, outcome(score, attempts, duration, completed)
        )
        assert isinstance(value, bool)


class TestValidate:
    def test_rejects_unary_and(self):
        with pytest.raises(InvalidCondition):
            validate(And((Completed(),)))

    def test_rejects_unknown_metric(self):
        with pytest.raises(InvalidCondition):
            validate(Comparison("streak", ">", 3))

    def test_rejects_out_of_range_score(self):
        with pytest.raises(InvalidCondition):
            validate(Comparison("score", ">", 120))

    def test_rejects_non_finite_literal(self):
        with pytest.raises(InvalidCondition):
            validate(Comparison("duration", ">", float("inf")))

    def test_rejects_excessive_depth(self):
        c = Completed()
        for _ in range(40):
            c = Not(c)
        with pytest.raises(InvalidCondition):
            validate(c)
