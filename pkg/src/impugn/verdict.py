"""The impugning procedure: negligibility, succinctness, occurrence, verdict.

A scenario's null hypothesis is impugned when its focal event

* is negligible: the supremum of its probability over every innate
  distribution is strictly below the threshold,
* has a description no longer than the complexity budget, which stands in
  for the event having been specified independently of the execution (the
  tool cannot know what the analyst knew; it can check succinctness),
* contains the actual outcome,

and the focal event's two descriptions (formula and probability event)
do not disagree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import probability as prob
from .errors import ImpugnError, ScenarioError, SortTooLargeError
from .logic import defined_set, evaluate, free_vars, variable_names
from .logic.syntax import Formula, desugar_dotted, formula_length, pretty
from .probability import (
    CountEvent, ExplicitSet, Extensional, IndependentBinary, ProbabilityBound, UniformKSubset,
    WeightedCategorical, format_decimal, format_rational,
)
from .structure import (
    Element, Explicit, ImplicitFunctions, ImplicitKSubsets, Structure, format_element, reduce_anonymous,
)
from .synthesis import SynthesisBudget, description_complexity

DEFAULT_COMPLEXITY_BUDGET = 20

IMPUGNED = "IMPUGNED"
NOT_IMPUGNED = "NOT_IMPUGNED"

PASSED, FAILED, SKIPPED = "PASSED", "FAILED", "SKIPPED"

REASON_NOT_NEGLIGIBLE = "not negligible"
REASON_TOO_LONG = "description exceeds budget"
REASON_NOT_IN_EVENT = "outcome not in focal event"
REASON_CROSS_CHECK = "cross-check failed"

INDEPENDENCE_NOTE = (
    "Independence of the focal event from the execution is checked only as "
    "succinctness: the focal formula must fit the complexity budget."
)


@dataclass(frozen=True)
class Trial:
    outcome_sort: str
    model: prob.TrialModel


@dataclass(frozen=True)
class FocalEvent:
    formula: Formula
    free_var: str
    prob_spec: prob.EventSpec


@dataclass(frozen=True)
class Scenario:
    name: str
    threshold: Fraction
    structure: Structure
    trial: Trial
    focal: FocalEvent
    actual_outcome: Element
    complexity_budget: int | None = None
    background_notes: str = ""

    @property
    def budget(self) -> int:
        return DEFAULT_COMPLEXITY_BUDGET if self.complexity_budget is None else self.complexity_budget

    @property
    def budget_is_default(self) -> bool:
        return self.complexity_budget is None


def scenario_problems(s: Scenario) -> list[str]:
    """Every way ``s`` violates the scenario invariants (empty when valid)."""
    out: list[str] = []
    st = s.structure
    if not 0 < s.threshold < 1:
        out.append(f"threshold {s.threshold} out of range: need 0 < threshold < 1")
    if s.complexity_budget is not None and s.complexity_budget < 0:
        out.append("complexity_budget must be nonnegative")
    sort = s.trial.outcome_sort
    if sort not in st.carriers:
        out.append(f"outcome sort {sort!r} is not declared")
        return out
    fv = free_vars(s.focal.formula)
    if set(fv) != {s.focal.free_var}:
        out.append(f"focal formula must have exactly one free variable {s.focal.free_var!r}, has {sorted(fv)}")
    elif fv[s.focal.free_var] != sort:
        out.append(f"free variable {s.focal.free_var} has sort {fv[s.focal.free_var]}, not the outcome sort {sort}")
    if not st.contains(sort, s.actual_outcome):
        out.append(f"actual outcome {s.actual_outcome!r} is not an element of {sort}")
    out.extend(_model_problems(s))
    return out


def _model_problems(s: Scenario) -> list[str]:
    st = s.structure
    sort = s.trial.outcome_sort
    model = s.trial.model
    carrier = st.carriers[sort]
    spec = s.focal.prob_spec
    out = []
    if isinstance(model, WeightedCategorical):
        if not isinstance(carrier, Explicit):
            return [f"a weighted categorical trial needs an explicit outcome sort, {sort} is implicit"]
        for e in model.weights:
            if e not in carrier:
                out.append(f"weight given for {e!r}, which is not an element of {sort}")
        for b in model.blocks:
            for end in (b.start, b.stop):
                if f"{b.prefix}{end}" not in carrier:
                    out.append(f"weight block {b.prefix}{b.start}..{b.stop} leaves {sort}")
        if not out and model.domain_size != carrier.size:
            out.append(f"weights cover {model.domain_size} outcomes but {sort} has {carrier.size}")
        if isinstance(spec, CountEvent):
            out.append("count events do not apply to a weighted categorical trial")
    elif isinstance(model, UniformKSubset):
        if not isinstance(carrier, ImplicitKSubsets):
            return [f"a uniform subset trial needs a subset outcome sort, {sort} is not one"]
        if st.size(carrier.base) != model.population:
            out.append(f"population {model.population} differs from |{carrier.base}| = {st.size(carrier.base)}")
        if carrier.k != model.pool:
            out.append(f"pool size {model.pool} differs from the subset size {carrier.k} of {sort}")
        if model.marked_sort is not None:
            if model.marked_sort not in st.carriers:
                out.append(f"marked sort {model.marked_sort!r} is not declared")
            elif st.size(model.marked_sort) != model.marked:
                out.append(f"marked count {model.marked} differs from |{model.marked_sort}|")
        if isinstance(spec, CountEvent) and spec.k > model.pool:
            out.append(f"count threshold {spec.k} exceeds the pool size {model.pool}")
    elif isinstance(model, IndependentBinary):
        if not isinstance(carrier, ImplicitFunctions):
            return [f"an independent binary trial needs a function outcome sort, {sort} is not one"]
        if st.size(carrier.index) != model.positions:
            out.append(f"{model.positions} positions but |{carrier.index}| = {st.size(carrier.index)}")
        values = list(st.carriers[carrier.value])
        if len(values) != 2:
            out.append(f"value sort {carrier.value} must have exactly two elements")
        if model.success_value is None or model.success_value not in values:
            out.append(f"success value {model.success_value!r} must be an element of {carrier.value}")
        if isinstance(spec, CountEvent):
            if spec.value is not None and spec.value not in values:
                out.append(f"count value {spec.value!r} is not an element of {carrier.value}")
            if spec.k > model.positions:
                out.append(f"count threshold {spec.k} exceeds {model.positions} positions")
    return out


def validate_scenario(s: Scenario) -> Scenario:
    problems = scenario_problems(s)
    if problems:
        raise ScenarioError("; ".join(problems))
    return s


# ---------------------------------------------------------------------------
# report


@dataclass(frozen=True)
class CrossCheck:
    status: str
    reason: str = ""

    def __str__(self):
        return f"{self.status}({self.reason})" if self.reason else self.status


@dataclass(frozen=True)
class CheckOptions:
    lenient: bool = False
    synthesis_budget: SynthesisBudget | None = None


@dataclass(frozen=True)
class Report:
    name: str
    threshold: Fraction
    sup_probability: ProbabilityBound | None
    negligible: bool
    description_length: int | None
    desugared_length: int | None
    budget: int
    budget_is_default: bool
    within_budget: bool
    outcome_in_event: bool
    cross_check: CrossCheck
    verdict: str
    reasons: tuple[str, ...]
    synthesized_min_length: int | None = None
    formula_text: str = ""
    errors: tuple[str, ...] = ()
    details: tuple[str, ...] = field(default=(), compare=False)

    @property
    def impugned(self) -> bool:
        return self.verdict == IMPUGNED

    def to_dict(self) -> dict:
        """Machine-readable form; exact rationals travel as ``"p/q"`` strings."""
        b = self.sup_probability
        return {
            "name": self.name,
            "sup": None if b is None else format_decimal(b.sup),
            "sup_exact": None if b is None else format_rational(b.sup),
            "inf": None if b is None else format_decimal(b.inf),
            "inf_exact": None if b is None else format_rational(b.inf),
            "attained_at": None if b is None else b.attained_at,
            "threshold": format_decimal(self.threshold),
            "threshold_exact": format_rational(self.threshold),
            "negligible": self.negligible,
            "formula": self.formula_text,
            "formula_length": self.description_length,
            "desugared_length": self.desugared_length,
            "budget": self.budget,
            "budget_is_default": self.budget_is_default,
            "within_budget": self.within_budget,
            "outcome_in_event": self.outcome_in_event,
            "cross_check": str(self.cross_check),
            "synthesized_min_length": self.synthesized_min_length,
            "verdict": self.verdict,
            "reasons": list(self.reasons),
            "errors": list(self.errors),
        }

    def render_text(self) -> str:
        b = self.sup_probability
        lines = [f"scenario: {self.name}"]
        if b is not None:
            lines.append(f"sup P(focal event) = {format_decimal(b.sup)} ({format_rational(b.sup)}), "
                         f"at {b.attained_at}")
            lines.append(f"inf P(focal event) = {format_decimal(b.inf)} ({format_rational(b.inf)})")
        else:
            lines.append("sup P(focal event) = unknown")
        lines.append(f"threshold = {format_decimal(self.threshold)} ({format_rational(self.threshold)})"
                     f" -> negligible: {'yes' if self.negligible else 'no'}")
        default = " (default, not derived from the case)" if self.budget_is_default else ""
        lines.append(f"focal formula: {self.formula_text}")
        lines.append(f"description length = {self.description_length}"
                     f" (desugared: {self.desugared_length}), budget = {self.budget}{default}"
                     f" -> within budget: {'yes' if self.within_budget else 'no'}")
        if self.synthesized_min_length is not None:
            lines.append(f"shortest definition found by synthesis: length {self.synthesized_min_length}")
        lines.append(f"actual outcome in focal event: {'yes' if self.outcome_in_event else 'no'}")
        lines.append(f"cross-check of the two focal-event descriptions: {self.cross_check}")
        for d in self.details:
            lines.append(f"  note: {d}")
        for e in self.errors:
            lines.append(f"  error: {e}")
        if self.impugned:
            lines.append("verdict: IMPUGNED -- null hypothesis impugned")
        else:
            lines.append(f"verdict: NOT_IMPUGNED ({'; '.join(self.reasons)})")
        lines.append(INDEPENDENCE_NOTE)
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# evaluation helpers that cope with large explicit outcome sorts


def _reduction_keep(formula: Formula, extra: int = 0) -> int:
    return max(1, len(variable_names(formula)), extra)


def evaluate_at(structure: Structure, formula: Formula, free_var: str, element) -> bool:
    """Truth of ``formula`` at ``element``, shrinking anonymous elements if a
    quantified sort is too large to enumerate."""
    try:
        return evaluate(structure, formula, {free_var: element})
    except SortTooLargeError:
        reduced, classes = reduce_anonymous(structure, _reduction_keep(formula))
        if not classes:
            raise
        for cls in classes.values():
            if isinstance(element, str) and element not in cls.named and element not in cls.representatives \
                    and structure.contains(cls.sort, element):
                element = cls.representatives[0]
        return evaluate(reduced, formula, {free_var: element})


def focal_set(structure: Structure, formula: Formula, free_var: str, sort: str, keep: int = 0):
    """Defined set of the formula, returned as ``(members, anonymous_class_or_None, structure_used)``.

    When the sort is too large but reducible, members are computed on the
    reduced structure; if a representative is a member, every anonymous
    element of the class is.
    """
    if structure.enumerable(sort):
        try:
            return defined_set(structure, formula, free_var, sort), None, structure
        except SortTooLargeError:
            pass
    reduced, classes = reduce_anonymous(structure, _reduction_keep(formula, keep))
    if sort in classes and reduced.enumerable(sort):
        return defined_set(reduced, formula, free_var, sort), classes[sort], reduced
    raise SortTooLargeError(sort, structure.size(sort), structure.enum_limit)


def _size_text(n: int) -> str:
    return str(n) if n < 10**12 else f"{n:.3e}"


def _count_predicate(s: Scenario) -> Callable[[Element], bool]:
    spec = s.focal.prob_spec
    model = s.trial.model
    st = s.structure
    if isinstance(model, IndependentBinary):
        value = spec.value if spec.value is not None else model.success_value
        return lambda f: prob.compare_count(sum(1 for v in f if v == value), spec.comparator, spec.k)
    if isinstance(model, UniformKSubset):
        if model.marked_sort is None:
            raise ScenarioError("the cross-check needs marked_sort to know which pool members to count")
        marked = model.marked_sort
        return lambda pool: prob.compare_count(sum(1 for e in pool if st.contains(marked, e)),
                                               spec.comparator, spec.k)
    raise ScenarioError("count events do not apply to this trial model")


def cross_check(s: Scenario) -> CrossCheck:
    """Check by enumeration that the formula and the probability spec define the same event."""
    st = s.structure
    sort = s.trial.outcome_sort
    spec = s.focal.prob_spec
    f, x = s.focal.formula, s.focal.free_var
    if isinstance(spec, Extensional) and spec.formula == f:
        return CrossCheck(SKIPPED, "the probability spec is the focal formula itself")
    if isinstance(spec, CountEvent):
        if not st.enumerable(sort):
            return CrossCheck(SKIPPED, f"{sort} has {_size_text(st.size(sort))} outcomes, above the enumeration "
                                       f"limit {st.enum_limit}")
        pred = _count_predicate(s)
        try:
            members = defined_set(st, f, x, sort)
        except SortTooLargeError as exc:
            return CrossCheck(SKIPPED, str(exc))
        for outcome in st.elements(sort):
            if (outcome in members) != pred(outcome):
                side = "formula only" if outcome in members else "count event only"
                return CrossCheck(FAILED, f"outcome {format_element(outcome)} is in the {side}")
        return CrossCheck(PASSED)
    try:
        members, cls, _ = focal_set(st, f, x, sort)
        if isinstance(spec, Extensional):
            other, ocls, _ = focal_set(st, spec.formula, spec.free_var, sort,
                                       keep=_reduction_keep(f))
        else:
            other, ocls = spec.elements, None
    except SortTooLargeError as exc:
        return CrossCheck(SKIPPED, str(exc))
    if cls is None:
        if frozenset(members) != frozenset(other):
            diff = sorted(map(format_element, frozenset(members) ^ frozenset(other)))[:3]
            return CrossCheck(FAILED, f"the descriptions disagree on {', '.join(diff)}")
        return CrossCheck(PASSED)
    anon_in = cls.representatives[0] in members
    named = frozenset(e for e in members if e in cls.named)
    if ocls is not None:
        other_named = frozenset(e for e in other if e in ocls.named)
        other_anon = ocls.representatives[0] in other
    else:
        other_named = frozenset(e for e in other if e in cls.named)
        other_anon = any(e not in cls.named for e in other)
        if other_anon and len(other) - len(other_named) != cls.count:
            return CrossCheck(FAILED, "the explicit event splits interchangeable outcomes")
    if named != other_named or anon_in != other_anon:
        return CrossCheck(FAILED, "the descriptions disagree")
    return CrossCheck(PASSED)


# ---------------------------------------------------------------------------
# the procedure


def check(scenario: Scenario, options: CheckOptions | None = None) -> Report:
    """Run the impugning procedure on ``scenario``."""
    options = options or CheckOptions()
    errors: list[str] = []
    details: list[str] = []

    def guarded(step: str, fn, fallback):
        if not options.lenient:
            return fn()
        try:
            return fn()
        except (ImpugnError, ValueError) as exc:
            errors.append(f"{step}: {exc}")
            return fallback

    s = scenario
    problems = scenario_problems(s)
    if problems:
        if not options.lenient:
            raise ScenarioError("; ".join(problems))
        errors.extend(problems)

    bound = guarded("probability", lambda: prob.event_probability_sup(
        s.trial.model, s.focal.prob_spec, s.structure, s.trial.outcome_sort), None)
    negligible = bound is not None and bound.sup < s.threshold

    length = formula_length(s.focal.formula)
    desugared = formula_length(desugar_dotted(s.focal.formula))
    within = length <= s.budget
    if s.budget_is_default:
        details.append(f"complexity budget {DEFAULT_COMPLEXITY_BUDGET} is the tool default")

    inside = guarded("outcome membership", lambda: evaluate_at(
        s.structure, s.focal.formula, s.focal.free_var, s.actual_outcome), False)
    xc = guarded("cross-check", lambda: cross_check(s), CrossCheck(SKIPPED, "error"))

    synthesized = None
    if options.synthesis_budget is not None:
        audit = guarded("synthesis", lambda: audit_description(s, options.synthesis_budget), None)
        if audit is not None:
            synthesized = audit.synthesized_min_length
            if audit.skipped:
                details.append(f"synthesis skipped: {audit.skipped}")
            elif synthesized is None:
                details.append(f"no definition found with {options.synthesis_budget.describe()}")

    reasons = []
    if not negligible:
        reasons.append(REASON_NOT_NEGLIGIBLE)
    if not within:
        reasons.append(REASON_TOO_LONG)
    if not inside:
        reasons.append(REASON_NOT_IN_EVENT)
    if xc.status == FAILED:
        reasons.append(REASON_CROSS_CHECK)
    if errors:
        reasons.append("errors: " + "; ".join(errors))
    verdict = IMPUGNED if not reasons else NOT_IMPUGNED
    return Report(
        name=s.name,
        threshold=s.threshold,
        sup_probability=bound,
        negligible=negligible,
        description_length=length,
        desugared_length=desugared,
        budget=s.budget,
        budget_is_default=s.budget_is_default,
        within_budget=within,
        outcome_in_event=bool(inside),
        cross_check=xc,
        verdict=verdict,
        reasons=tuple(reasons),
        synthesized_min_length=synthesized,
        formula_text=pretty(s.focal.formula),
        errors=tuple(errors),
        details=tuple(details),
    )


@dataclass(frozen=True)
class Audit:
    supplied_length: int
    desugared_length: int
    synthesized_min_length: int | None = None
    witness: Formula | None = None
    explored: int = 0
    skipped: str | None = None
    note: str = ""

    @property
    def gap(self) -> int | None:
        if self.synthesized_min_length is None:
            return None
        return self.supplied_length - self.synthesized_min_length

    @property
    def minimal(self) -> bool | None:
        return None if self.gap is None else self.gap <= 0


def audit_description(scenario: Scenario, budget: SynthesisBudget, structure: Structure | None = None,
                      target=None) -> Audit:
    """Compare the supplied focal formula's length with the shortest one synthesis finds.

    ``structure`` and ``target`` let a caller audit a shrunken instance; by
    default the focal set is computed on the scenario's own structure.
    """
    f = scenario.focal.formula
    supplied = formula_length(f)
    desugared = formula_length(desugar_dotted(f))
    sort = scenario.trial.outcome_sort
    st = structure or scenario.structure
    try:
        if target is None:
            members, cls, st = focal_set(st, f, scenario.focal.free_var, sort, keep=budget.max_vars)
            target = members
        result = description_complexity(st, target, sort, budget, free_var=scenario.focal.free_var)
    except SortTooLargeError as exc:
        return Audit(supplied, desugared, skipped=f"SortTooLarge: {exc}")
    return Audit(supplied, desugared, result.length, result.formula, result.explored, note=result.note)
