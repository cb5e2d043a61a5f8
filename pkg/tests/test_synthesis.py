import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import caputo_structure, small_structures
from oracles import NaiveDefinability
from impugn.errors import BudgetExplosionError, SortTooLargeError
from impugn.logic import defined_set, formula_length, free_vars, pretty, quantifier_depth, variable_names
from impugn.synthesis import SynthesisBudget, description_complexity, enumerate_definable


def test_budget_parse():
    assert SynthesisBudget.parse("8,2,2") == SynthesisBudget(8, 2, 2)
    assert SynthesisBudget.parse("6") == SynthesisBudget(6)
    with pytest.raises(ValueError):
        SynthesisBudget.parse("1,2,3,4")
    with pytest.raises(ValueError):
        SynthesisBudget(1)


def test_desk_lottery_map(desk):
    m = enumerate_definable(desk, "Person", SynthesisBudget(8, 2, 2))
    assert m[frozenset({"John"})][0] == 3
    rel = frozenset({"Donna", "Rita"})
    assert m[rel] == (2, m[rel][1]) and pretty(m[rel][1]) == "CloseRelativeOfJohn(x)"
    union = frozenset({"Donna", "Rita", "Fred", "Fiona"})
    assert m[union][0] == 5
    assert m[frozenset()][0] == 2  # a false sentence such as CloseFriendOfJohn(John)
    for s, (length, f) in m.items():
        assert formula_length(f) == length
        assert defined_set(desk, f, "x", "Person") == s


def test_description_complexity_finds_union(desk):
    target = {"Donna", "Rita", "Fred", "Fiona"}
    r = description_complexity(desk, target, "Person", SynthesisBudget(8, 2, 2))
    assert r.found and r.length == 5
    assert defined_set(desk, r.formula, "x", "Person") == target
    oracle = NaiveDefinability(desk, "Person", 2, 2).min_lengths(5)
    assert oracle[frozenset(target)] == 5


def test_undefinable_target(desk):
    # s1 and s2 are indistinguishable, so {s1} is not definable at all
    r = description_complexity(desk, {"s1"}, "Person", SynthesisBudget(7, 2, 2))
    assert not r.found and r.length is None
    assert "no definition" in r.note


def test_explosion_cap(desk):
    with pytest.raises(BudgetExplosionError):
        enumerate_definable(desk, "Person", SynthesisBudget(9, 3, 3), class_cap=50)


def test_over_limit_target_sort():
    with pytest.raises(SortTooLargeError):
        enumerate_definable(caputo_structure(41), "Outcome", SynthesisBudget(5))


def test_implicit_target_sort():
    s = caputo_structure(3)
    m = enumerate_definable(s, "Outcome", SynthesisBudget(6, 2, 1))
    all_d = frozenset({("D", "D", "D")})
    target = frozenset(f for f in s.elements("Outcome") if "N" not in f)
    assert target == all_d
    assert m[target][0] == 6  # forall v2:Election. R(x, v2, D)


def test_free_variable_name_avoids_vocabulary():
    from helpers import build
    s = build(["A"], {"x": ["A"]}, {}, {"A": ["a", "b"]}, {"x": [["a"]]})
    m = enumerate_definable(s, "A", SynthesisBudget(3, 1, 0))
    f = m[frozenset({"a"})][1]
    assert "x" not in variable_names(f)
    (var,) = free_vars(f)
    assert defined_set(s, f, var, "A") == {"a"}


@settings(max_examples=40, deadline=None)
@given(small_structures(max_size=5), st.integers(2, 7), st.integers(1, 2), st.integers(0, 2))
def test_pruned_search_equals_naive_oracle(s, max_len, max_vars, depth):
    got = enumerate_definable(s, "A", SynthesisBudget(max_len, max_vars, depth))
    want = NaiveDefinability(s, "A", max_vars, depth).min_lengths(max_len)
    assert {k: v[0] for k, v in got.items()} == want
    for k, (length, f) in got.items():
        assert quantifier_depth(f) <= depth


@settings(max_examples=8, deadline=None)
@given(small_structures(max_size=3))
def test_three_variables_equal_naive_oracle(s):
    got = enumerate_definable(s, "A", SynthesisBudget(6, 3, 2))
    want = NaiveDefinability(s, "A", 3, 2).min_lengths(6)
    assert {k: v[0] for k, v in got.items()} == want


def test_small_budget_runs_fast(desk):
    t = time.perf_counter()
    enumerate_definable(desk, "Person", SynthesisBudget(8, 2, 2))
    assert time.perf_counter() - t < 5
