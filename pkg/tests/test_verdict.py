import dataclasses
from fractions import Fraction

import pytest

from impugn.cli import GOLDEN, load_case
from impugn.errors import ScenarioError
from impugn.logic import parse, pretty
from impugn.probability import CountEvent, IndependentBinary
from impugn.structure import parse_element
from impugn.synthesis import SynthesisBudget
from impugn.verdict import (
    FAILED, IMPUGNED, NOT_IMPUGNED, PASSED, REASON_CROSS_CHECK, REASON_NOT_IN_EVENT, REASON_NOT_NEGLIGIBLE,
    REASON_TOO_LONG, SKIPPED, CheckOptions, FocalEvent, audit_description, check,
)

THREE = "exists n1:Night. exists* n2:Night. exists* n3:Night. (R(f, n1) & R(f, n2) & R(f, n3))"


def with_focal(s, text, spec):
    f = parse(text, s.structure.vocabulary, {s.focal.free_var: s.trial.outcome_sort})
    return dataclasses.replace(s, focal=FocalEvent(f, s.focal.free_var, spec))


@pytest.mark.parametrize("name", sorted(GOLDEN))
def test_golden_verdicts(name):
    assert check(load_case(name)).verdict == GOLDEN[name]


def test_caputo_report():
    r = check(load_case("caputo"))
    assert r.verdict == IMPUGNED and r.reasons == ()
    assert r.sup_probability.sup == Fraction(42, 2**41)
    assert r.description_length == 17 and r.within_budget and r.outcome_in_event
    assert r.cross_check.status == SKIPPED
    text = r.render_text()
    assert "null hypothesis impugned" in text
    assert "succinctness" in text
    assert "guilt" not in text.lower()
    assert "21/1099511627776" in text and "1.90994e-11" in text


def test_stalking_escalation():
    s = load_case("stalking")
    r = check(s)
    assert r.verdict == NOT_IMPUGNED and r.reasons == (REASON_NOT_NEGLIGIBLE,)
    assert r.cross_check.status == PASSED
    escalated = with_focal(s, THREE, CountEvent(">=", 3, "1"))
    r3 = check(escalated)
    assert r3.verdict == IMPUGNED, r3.reasons
    assert r3.description_length == 17 and r3.desugared_length > 17


def test_mismatched_descriptions_fail_cross_check():
    s = load_case("stalking")
    bad = dataclasses.replace(s, focal=dataclasses.replace(s.focal, prob_spec=CountEvent(">=", 3, "1")))
    r = check(bad)
    assert r.cross_check.status == FAILED
    assert REASON_CROSS_CHECK in r.reasons and r.verdict == NOT_IMPUGNED


def test_outcome_outside_event():
    s = load_case("stalking_three_nights")
    quiet = dataclasses.replace(s, actual_outcome=parse_element(s.structure, "Outcome", "1000000001"))
    r = check(quiet)
    assert r.reasons == (REASON_NOT_IN_EVENT,)


def test_budget_too_small():
    s = dataclasses.replace(load_case("caputo"), complexity_budget=16)
    assert check(s).reasons == (REASON_TOO_LONG,)


def test_default_budget_is_flagged():
    s = dataclasses.replace(load_case("caputo"), complexity_budget=None)
    r = check(s)
    assert r.budget == 20 and r.budget_is_default
    assert "default" in r.render_text()


def test_strict_and_lenient_errors():
    s = load_case("stalking")
    broken = dataclasses.replace(s, trial=dataclasses.replace(
        s.trial, model=IndependentBinary.uniform(7, 0, "1/100", "1")))
    with pytest.raises(ScenarioError):
        check(broken)
    r = check(broken, CheckOptions(lenient=True))
    assert r.verdict == NOT_IMPUGNED
    assert r.errors and any("positions" in e for e in r.errors)


def test_threshold_validation():
    s = dataclasses.replace(load_case("caputo"), threshold=Fraction(0))
    with pytest.raises(ScenarioError, match="threshold"):
        check(s)


@pytest.mark.parametrize("name", ["caputo", "jury", "stalking", "stalking_three_nights", "lottery"])
def test_threshold_and_budget_monotonicity(name):
    s = load_case(name)
    taus = [Fraction(1, 10**k) for k in (1, 3, 4, 5, 8)]
    budgets = [4, 10, 16, 24]
    grid = {}
    for tau in taus:
        for L in budgets:
            r = check(dataclasses.replace(s, threshold=tau, complexity_budget=L))
            assert r.negligible == (r.sup_probability.sup < tau)
            assert r.within_budget == (r.description_length <= L)
            grid[tau, L] = r.verdict == IMPUGNED
    assert len(grid) == 20
    for (tau, L), ok in grid.items():
        if ok:
            for (tau2, L2), ok2 in grid.items():
                if tau2 >= tau and L2 >= L:
                    assert ok2


def test_audits():
    lottery = audit_description(load_case("lottery"), SynthesisBudget(5, 3, 2))
    assert (lottery.supplied_length, lottery.synthesized_min_length, lottery.gap) == (5, 5, 0)
    jury = audit_description(load_case("jury"), SynthesisBudget(15, 3, 2))
    assert jury.skipped and jury.skipped.startswith("SortTooLarge")
    shrink = audit_description(load_case("jury_shrink"), SynthesisBudget(15, 3, 2))
    assert shrink.synthesized_min_length == 5 and shrink.gap == 10
    stalk = audit_description(load_case("stalking"), SynthesisBudget(11, 3, 2))
    assert stalk.synthesized_min_length == 11
    assert "exists*" in pretty(stalk.witness)


def test_check_with_synthesis():
    r = check(load_case("lottery"), CheckOptions(synthesis_budget=SynthesisBudget(5, 2, 1)))
    assert r.synthesized_min_length == 5
    assert r.to_dict()["synthesized_min_length"] == 5
