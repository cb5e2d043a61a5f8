import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import build, caputo_structure, formulas, small_structures, stalking_structure
from impugn.errors import (
    ArityMismatchError, DuplicateElementError, SortTooLargeError, StructureValidationError, TypeMismatchError,
    UnknownSortError, UnvaluedConstantError,
)
from impugn.logic import defined_set, free_vars, variable_names
from impugn.structure import (
    DEFAULT_ENUM_LIMIT, Explicit, IdRange, Vocabulary, parse_element, reduce_anonymous, sort_size, validate,
)


def test_ticket_structure(tickets):
    assert tickets.size("Person") == 5
    assert tickets.size("Ticket") == 7
    assert tickets.holds("Owns", ("Donna", "k1"))
    assert not tickets.holds("Owns", ("John", "k1"))
    assert tickets.constant("John") == "John"


def test_constant_of_wrong_sort_is_type_mismatch():
    with pytest.raises(StructureValidationError) as info:
        build(["Person", "Ticket"], {"Owns": ["Person", "Ticket"]}, {"John": "Person"},
              {"Person": ["a"], "Ticket": ["t"]}, {"Owns": []}, {"John": "t"})
    assert any(isinstance(i, TypeMismatchError) for i in info.value.issues)


def test_all_issues_are_reported():
    with pytest.raises(StructureValidationError) as info:
        build(["A"], {"R": ["A", "A"]}, {"c": "A"}, {"A": ["a", "b", "a"]},
              {"R": [["a"], ["a", "zz"]]})
    kinds = {type(i) for i in info.value.issues}
    assert {DuplicateElementError, ArityMismatchError, TypeMismatchError, UnvaluedConstantError} <= kinds


def test_unknown_sort_in_vocabulary():
    with pytest.raises(StructureValidationError) as info:
        Vocabulary.from_data({"sorts": ["A"], "relations": {"R": ["B"]}})
    assert isinstance(info.value.issues[0], UnknownSortError)


def test_tuple_arity_checked_at_holds(tickets):
    with pytest.raises(ArityMismatchError):
        tickets.holds("Owns", ("Donna",))


def test_implicit_sizes():
    assert stalking_structure().size("Outcome") == 1024
    big = caputo_structure(41)
    size = sort_size(big, "Outcome")
    assert size.size == 2**41 and size.over_limit
    assert DEFAULT_ENUM_LIMIT == 2**20
    with pytest.raises(SortTooLargeError):
        big.elements("Outcome")


def test_enum_limit_env_override(monkeypatch):
    monkeypatch.setenv("RA_ENUM_LIMIT", "100")
    s = stalking_structure()
    assert not s.enumerable("Outcome")
    monkeypatch.setenv("RA_ENUM_LIMIT", "4096")
    assert stalking_structure().enumerable("Outcome")


def test_subset_sort_size_and_membership():
    s = build(["P", "M", "Pool"], {"In": ["M", "Pool"]}, {},
              {"P": [{"prefix": "m", "from": 1, "to": 8}], "M": ["m1", "m2"],
               "Pool": {"subsets": {"base": "P", "k": 3}}},
              {"In": {"builtin": "member"}})
    assert s.size("Pool") == 56
    pool = parse_element(s, "Pool", ["m3", "m1", "m2"])
    assert pool == ("m1", "m2", "m3")
    assert s.holds("In", ("m2", pool))
    assert not s.holds("In", ("m2", ("m1", "m3", "m4")))
    assert len(list(s.elements("Pool"))) == 56


def test_function_elements_and_apply():
    s = caputo_structure(6)
    f = parse_element(s, "Outcome", "DDDDND")
    assert f == ("D", "D", "D", "D", "N", "D")
    assert parse_element(s, "Outcome", ["D", "D", "D", "D", "N", "D"]) == f
    assert s.holds("R", (f, "5", "N"))
    assert not s.holds("R", (f, "4", "N"))
    g = parse_element(s, "Outcome", "NNNNDN")
    assert not s.holds("R", (g, "5", "N"))
    with pytest.raises(Exception):
        parse_element(s, "Outcome", "DDX")


def test_idrange_carrier():
    c = Explicit((("x",), IdRange("o", 1, 5)))
    assert c.size == 6
    assert "o3" in c and "o0" not in c and "o03" not in c
    assert list(c) == ["x", "o1", "o2", "o3", "o4", "o5"]
    assert c.index("o5") == 5


@settings(max_examples=50, deadline=None)
@given(small_structures(two_sorted=True))
def test_document_round_trip(s):
    again = validate(s.vocabulary, s.to_data())
    assert again == s
    assert Vocabulary.from_data(s.vocabulary.to_data()) == s.vocabulary


@settings(max_examples=120, deadline=None)
@given(st.data())
def test_anonymous_reduction_preserves_definable_sets(data):
    s = data.draw(small_structures(max_size=6))
    # pad with untouched elements so the reduction has something to do
    doc = s.to_data()
    doc["carriers"]["A"] = list(doc["carriers"]["A"]) + [{"prefix": "z", "from": 1, "to": 5}]
    big = validate(s.vocabulary, doc)
    f = data.draw(formulas(big, var_names=("x", "y"), depth=3))
    names = variable_names(f)
    reduced, classes = reduce_anonymous(big, max(1, len(names)))
    cls = classes["A"]
    assert reduced.size("A") < big.size("A")
    fv = free_vars(f)
    if len(fv) != 1:
        return
    (var, _), = fv.items()
    full = defined_set(big, f, var, "A")
    small = defined_set(reduced, f, var, "A")
    assert {e for e in full if e in cls.named} == {e for e in small if e in cls.named}
    anon = [e for e in big.elements("A") if e not in cls.named]
    rep_in = cls.representatives[0] in small
    assert all((e in full) == rep_in for e in anon)
