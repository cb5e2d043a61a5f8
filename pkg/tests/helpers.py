"""Small structures and hypothesis strategies shared by the test modules."""

from hypothesis import strategies as st

from impugn.logic import (
    And, Const, DottedExists, DottedForall, Eq, Exists, Forall, Iff, Implies, Neq, Not, Or, RelApp, Var,
)
from impugn.structure import Vocabulary, validate


def build(sorts, relations=None, constants=None, carriers=None, extensions=None, values=None, enum_limit=None):
    voc = Vocabulary.from_data({"sorts": list(sorts), "relations": relations or {}, "constants": constants or {}})
    data = {"carriers": carriers, "relations": extensions or {}, "constants": values or {}}
    return validate(voc, data, enum_limit)


def ticket_structure():
    """Five people, seven owned tickets; Ann and Carl own exactly one each."""
    return build(
        ["Person", "Ticket"],
        {"Owns": ["Person", "Ticket"]},
        {"John": "Person"},
        {"Person": ["John", "Donna", "Ann", "Bob", "Carl"], "Ticket": [f"k{i}" for i in range(1, 8)]},
        {"Owns": [["Donna", "k1"], ["Donna", "k2"], ["Donna", "k3"], ["Ann", "k4"], ["Bob", "k5"],
                  ["Bob", "k6"], ["Carl", "k7"]]},
        {"John": "John"},
    )


def lottery_desk():
    """A small lottery model: John, three relatives/friends and a few strangers."""
    return build(
        ["Person"],
        {"CloseRelativeOfJohn": ["Person"], "CloseFriendOfJohn": ["Person"]},
        {"John": "Person"},
        {"Person": ["John", "Donna", "Rita", "Fred", "Fiona", "s1", "s2", "s3"]},
        {"CloseRelativeOfJohn": [["Donna"], ["Rita"]], "CloseFriendOfJohn": [["Fred"], ["Fiona"], ["Rita"]]},
        {"John": "John"},
    )


def stalking_structure(n=10):
    return build(
        ["Night", "Bit", "Outcome"],
        {"R": ["Outcome", "Night"]},
        {},
        {"Night": [str(i) for i in range(1, n + 1)], "Bit": ["0", "1"],
         "Outcome": {"functions": {"index": "Night", "value": "Bit"}}},
        {"R": {"builtin": "apply", "value": "1"}},
    )


def caputo_structure(n):
    return build(
        ["Election", "Party", "Outcome"],
        {"R": ["Outcome", "Election", "Party"]},
        {"D": "Party", "N": "Party"},
        {"Election": [str(i) for i in range(1, n + 1)], "Party": ["D", "N"],
         "Outcome": {"functions": {"index": "Election", "value": "Party"}}},
        {"R": {"builtin": "apply"}},
        {"D": "D", "N": "N"},
    )


# -- random one- and two-sorted structures ---------------------------------


@st.composite
def small_structures(draw, max_size=5, two_sorted=False, with_constant=None):
    """A random structure with unary P, Q and binary E; optionally a second sort B."""
    n = draw(st.integers(1, max_size))
    elems = [f"e{i}" for i in range(n)]
    sorts = {"A": elems}
    relations = {"P": ["A"], "Q": ["A"], "E": ["A", "A"]}
    if two_sorted:
        m = draw(st.integers(1, 3))
        sorts["B"] = [f"b{i}" for i in range(m)]
        relations["F"] = ["A", "B"]
    ext = {
        "P": [[e] for e in elems if draw(st.booleans())],
        "Q": [[e] for e in elems if draw(st.booleans())],
        "E": [[a, b] for a in elems for b in elems if draw(st.integers(0, 3)) == 0],
    }
    if two_sorted:
        ext["F"] = [[a, b] for a in elems for b in sorts["B"] if draw(st.booleans())]
    has_c = draw(st.booleans()) if with_constant is None else with_constant
    constants = {"c": "A"} if has_c else {}
    values = {"c": draw(st.sampled_from(elems))} if has_c else {}
    return build(list(sorts), relations, constants, sorts, ext, values)


QUANTIFIERS = (Exists, Forall, DottedExists, DottedForall)


@st.composite
def formulas(draw, structure, var_names=("x", "y", "z"), depth=3):
    """A well-sorted formula over ``structure``'s vocabulary (variables typed per sort)."""
    voc = structure.vocabulary
    typed = {s: [Var(f"{v}{'' if s == 'A' else '_' + s}", s) for v in var_names] for s in voc.sorts}
    consts = {s: [Const(c, cs) for c, cs in voc.constants.items() if cs == s] for s in voc.sorts}

    def term(sort):
        return draw(st.sampled_from(typed[sort] + consts[sort]))

    def atom():
        choice = draw(st.integers(0, 2))
        if choice == 0:
            rel = draw(st.sampled_from(sorted(voc.relations)))
            return RelApp(rel, tuple(term(s) for s in voc.relations[rel]))
        sort = draw(st.sampled_from(list(voc.sorts)))
        return (Eq if choice == 1 else Neq)(term(sort), term(sort))

    def go(d):
        if d == 0 or draw(st.integers(0, 3)) == 0:
            return atom()
        kind = draw(st.integers(0, 2))
        if kind == 0:
            return Not(go(d - 1))
        if kind == 1:
            op = draw(st.sampled_from((And, Or, Implies, Iff)))
            return op(go(d - 1), go(d - 1))
        q = draw(st.sampled_from(QUANTIFIERS))
        sort = draw(st.sampled_from(list(voc.sorts)))
        v = draw(st.sampled_from(typed[sort]))
        return q(v.name, sort, go(d - 1))

    return go(depth)
