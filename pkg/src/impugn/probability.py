"""Exact focal-event probabilities under families of innate distributions.

Everything here is :class:`fractions.Fraction` arithmetic.  Floats appear
only in :func:`format_decimal`, which is for display.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from decimal import Context, Decimal
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .errors import (
    NondegenerateParametersError,
    ParameterOutOfRangeError,
    UnsupportedSupremumError,
    ZeroTotalWeightError,
)

ZERO = Fraction(0)
ONE = Fraction(1)

COMPARATORS = {">=": ">=", "≥": ">=", "<=": "<=", "≤": "<=", "=": "=", "==": "="}

VERTEX_LIMIT_POSITIONS = 20

_DECIMAL = re.compile(r"[+-]?(\d+)?(?:\.(\d+))?(?:[eE][+-]?\d+)?\Z")


def parse_rational(raw) -> Fraction:
    """Read ``"p/q"``, a decimal string (at most 30 fractional digits) or an int."""
    if isinstance(raw, bool):
        raise ValueError(f"not a rational: {raw!r}")
    if isinstance(raw, Fraction):
        return raw
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, float):
        raw = repr(raw)
    if not isinstance(raw, str):
        raise ValueError(f"not a rational: {raw!r}")
    text = raw.strip().replace("_", "")
    if "/" not in text:
        m = _DECIMAL.match(text)
        if m is None or not (m.group(1) or m.group(2)):
            raise ValueError(f"not a rational: {raw!r}")
        if m.group(2) and len(m.group(2)) > 30:
            raise ValueError(f"more than 30 fractional digits: {raw!r}")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a rational: {raw!r}") from None


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def format_decimal(q: Fraction, digits: int = 6) -> str:
    """``q`` rounded to ``digits`` significant digits (display only)."""
    if q == 0:
        return "0"
    ctx = Context(prec=digits + 10)
    d = ctx.divide(Decimal(q.numerator), Decimal(q.denominator))
    return format(d, f".{digits}g")


def _check_prob(p: Fraction, what: str = "probability") -> None:
    if not ZERO <= p <= ONE:
        raise ParameterOutOfRangeError(f"{what} {p} is outside [0, 1]")


def _normalize_comparator(comparator: str) -> str:
    try:
        return COMPARATORS[comparator]
    except KeyError:
        raise ParameterOutOfRangeError(f"unknown comparator {comparator!r}") from None


def compare_count(count: int, comparator: str, k: int) -> bool:
    c = _normalize_comparator(comparator)
    if c == ">=":
        return count >= k
    if c == "<=":
        return count <= k
    return count == k


# ---------------------------------------------------------------------------
# trial models


@dataclass(frozen=True)
class WeightBlock:
    """Weight ``weight`` for each identifier ``prefix + str(i)``, ``start <= i <= stop``."""

    prefix: str
    start: int
    stop: int
    weight: Fraction

    def __len__(self):
        return self.stop - self.start + 1

    def offset(self, element: str) -> int | None:
        if not element.startswith(self.prefix):
            return None
        digits = element[len(self.prefix):]
        if not digits.isdigit() or (len(digits) > 1 and digits[0] == "0"):
            return None
        i = int(digits)
        return i - self.start if self.start <= i <= self.stop else None


@dataclass(frozen=True)
class WeightedCategorical:
    """One outcome drawn with probability proportional to its weight."""

    weights: Mapping[str, Fraction]
    blocks: tuple[WeightBlock, ...] = ()

    def __post_init__(self):
        for e, w in self.weights.items():
            if w < 0:
                raise ParameterOutOfRangeError(f"negative weight {w} for {e!r}")
        for b in self.blocks:
            if b.weight < 0:
                raise ParameterOutOfRangeError(f"negative weight {b.weight} for block {b.prefix}")
        if self.total == 0:
            raise ZeroTotalWeightError("all weights are zero")

    @property
    def total(self) -> Fraction:
        return sum(self.weights.values(), ZERO) + sum((b.weight * len(b) for b in self.blocks), ZERO)

    @property
    def domain_size(self) -> int:
        return len(self.weights) + sum(len(b) for b in self.blocks)

    def weight_of(self, element: str) -> Fraction:
        if element in self.weights:
            return self.weights[element]
        for b in self.blocks:
            if b.offset(element) is not None:
                return b.weight
        raise ParameterOutOfRangeError(f"{element!r} is not in the weight domain")

    def has(self, element: str) -> bool:
        return element in self.weights or any(b.offset(element) is not None for b in self.blocks)


@dataclass(frozen=True)
class UniformKSubset:
    """A uniformly random ``pool``-subset of a ``population``, ``marked`` of which are special."""

    population: int
    pool: int
    marked: int
    marked_sort: str | None = None

    def __post_init__(self):
        if min(self.population, self.pool, self.marked) < 0:
            raise ParameterOutOfRangeError("sizes must be nonnegative")
        if self.pool > self.population or self.marked > self.population:
            raise ParameterOutOfRangeError(
                f"need pool <= population and marked <= population, got "
                f"N={self.population} n={self.pool} K={self.marked}")


@dataclass(frozen=True)
class IndependentBinary:
    """Independent two-valued positions; position i takes ``success_value``
    with an unknown probability in ``[lo[i], hi[i]]``."""

    lo: tuple[Fraction, ...]
    hi: tuple[Fraction, ...]
    success_value: str | None = None

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise ParameterOutOfRangeError("lo and hi must have one entry per position")
        for a, b in zip(self.lo, self.hi):
            _check_prob(a)
            _check_prob(b)
            if a > b:
                raise ParameterOutOfRangeError(f"lower bound {a} exceeds upper bound {b}")

    @classmethod
    def uniform(cls, positions: int, lo, hi=None, success_value: str | None = None) -> "IndependentBinary":
        lo = parse_rational(lo)
        hi = lo if hi is None else parse_rational(hi)
        return cls((lo,) * positions, (hi,) * positions, success_value)

    @property
    def positions(self) -> int:
        return len(self.lo)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi


TrialModel = Union[WeightedCategorical, UniformKSubset, IndependentBinary]


# ---------------------------------------------------------------------------
# events whose probability is bounded


@dataclass(frozen=True)
class CountEvent:
    """Count of successes (``value`` positions, or marked pool members) compared to ``k``."""

    comparator: str
    k: int
    value: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "comparator", _normalize_comparator(self.comparator))
        if self.k < 0:
            raise ParameterOutOfRangeError("k must be nonnegative")

    def describe(self) -> str:
        what = f"positions with value {self.value}" if self.value is not None else "successes"
        return f"#{what} {self.comparator} {self.k}"


@dataclass(frozen=True)
class Extensional:
    """The event defined by a formula with one free variable of the outcome sort."""

    formula: object
    free_var: str


@dataclass(frozen=True)
class ExplicitSet:
    elements: frozenset


EventSpec = Union[CountEvent, Extensional, ExplicitSet]


@dataclass(frozen=True)
class ProbabilityBound:
    sup: Fraction
    inf: Fraction
    attained_at: str
    inf_at: str = ""

    def __post_init__(self):
        if not ZERO <= self.inf <= self.sup <= ONE:
            raise ValueError(f"inconsistent bound inf={self.inf} sup={self.sup}")


# ---------------------------------------------------------------------------
# closed forms and dynamic programs


def binomial(n: int, k: int) -> int:
    return math.comb(n, k)


def categorical_event_probability(model: WeightedCategorical, event: Iterable[str]) -> Fraction:
    """Total weight of ``event`` over total weight."""
    total = model.total
    if total == 0:
        raise ZeroTotalWeightError("all weights are zero")
    mass = sum((model.weight_of(e) for e in set(event)), ZERO)
    return mass / total


def hypergeometric_pmf(N: int, K: int, n: int, j: int) -> Fraction:
    return Fraction(math.comb(K, j) * math.comb(N - K, n - j), math.comb(N, n))


def hypergeometric_count_probability(N: int, K: int, n: int, comparator: str, k: int) -> Fraction:
    """P(a uniform n-subset of N holds ``comparator k`` of the K marked elements)."""
    c = _normalize_comparator(comparator)
    if min(N, K, n, k) < 0 or n > N or K > N or k > n:
        raise ParameterOutOfRangeError(f"need k <= n <= N and K <= N, got N={N} K={K} n={n} k={k}")
    lo, hi = max(0, n - (N - K)), min(K, n)
    if c == "=":
        js: Iterable[int] = [k] if lo <= k <= hi else []
        complement = False
    elif c == ">=":
        # sum the shorter side
        complement = (k - lo) < (hi - k + 1)
        js = range(lo, min(k, hi + 1)) if complement else range(max(k, lo), hi + 1)
    else:
        complement = (hi - k) < (k - lo + 1)
        js = range(max(k + 1, lo), hi + 1) if complement else range(lo, min(k, hi) + 1)
    num = sum(math.comb(K, j) * math.comb(N - K, n - j) for j in js)
    p = Fraction(num, math.comb(N, n))
    return ONE - p if complement else p


def _count_distribution(probs: Sequence[Fraction], cap: int) -> list[Fraction]:
    """P(count = j) for j < cap and P(count >= cap) in the last slot."""
    dist = [ONE] + [ZERO] * cap
    for p in probs:
        q = ONE - p
        new = [ZERO] * (cap + 1)
        for j, w in enumerate(dist):
            if not w:
                continue
            if q:
                new[j] += w * q
            if p:
                new[min(j + 1, cap)] += w * p
        dist = new
    return dist


def poisson_binomial_count_probability(probs: Sequence, comparator: str, k: int) -> Fraction:
    """P(number of successes among independent coins ``probs`` is ``comparator k``)."""
    c = _normalize_comparator(comparator)
    probs = [parse_rational(p) for p in probs]
    for p in probs:
        _check_prob(p)
    n = len(probs)
    if not 0 <= k <= n:
        raise ParameterOutOfRangeError(f"k={k} outside 0..{n}")
    cap = min(k + 1, n)
    dist = _count_distribution(probs, cap)
    if cap == n:
        exact = dist  # every slot is a point mass, cap = n is P(count = n)
        if c == "<=":
            return sum(exact[: k + 1], ZERO)
        if c == "=":
            return exact[k]
        return sum(exact[k:], ZERO)
    if c == "<=":
        return sum(dist[: k + 1], ZERO)
    if c == "=":
        return dist[k]
    return dist[k] + dist[k + 1]


# ---------------------------------------------------------------------------
# suprema over parameter boxes


def _as_success_count(model: IndependentBinary, event: CountEvent) -> tuple[str, int]:
    """Rewrite a count of ``event.value`` positions as a count of successes."""
    if event.value is None or model.success_value is None or event.value == model.success_value:
        return event.comparator, event.k
    n = model.positions
    flip = {">=": "<=", "<=": ">=", "=": "="}
    return flip[event.comparator], n - event.k


def _describe_params(ps: Sequence[Fraction]) -> str:
    if len(set(ps)) == 1:
        return f"p_i = {format_rational(ps[0]) if ps[0].denominator != 1 else ps[0]} for all i"
    return "p = (" + ", ".join(str(p) for p in ps) + ")"


def _vertex_extremes(model: IndependentBinary, comparator: str, k: int):
    # P(count = k) is affine in each p_i, so extremes sit on box corners;
    # positions sharing an interval are exchangeable, so only how many of
    # each group sit at hi matters
    groups: dict[tuple[Fraction, Fraction], int] = {}
    for a, b in zip(model.lo, model.hi):
        groups[(a, b)] = groups.get((a, b), 0) + 1
    keys = list(groups)
    best = worst = None
    for counts in itertools.product(*(range(groups[g] + 1) for g in keys)):
        ps: list[Fraction] = []
        for (a, b), m in zip(keys, counts):
            ps.extend([b] * m + [a] * (groups[(a, b)] - m))
        p = poisson_binomial_count_probability(ps, comparator, k)
        if best is None or p > best[0]:
            best = (p, ps)
        if worst is None or p < worst[0]:
            worst = (p, ps)
    return best, worst


def event_probability_sup(model: TrialModel, event: EventSpec, structure=None,
                          outcome_sort: str | None = None) -> ProbabilityBound:
    """Supremum and infimum of P(event) over every innate distribution of ``model``."""
    if isinstance(model, IndependentBinary) and not model.is_point:
        if not isinstance(event, CountEvent):
            raise UnsupportedSupremumError(
                "interval parameters need a count event; extensional events have no monotone bound")
        comparator, k = _as_success_count(model, event)
        if not 0 <= k <= model.positions:
            raise ParameterOutOfRangeError(f"k={event.k} outside 0..{model.positions}")
        if comparator == ">=":
            sup = poisson_binomial_count_probability(model.hi, ">=", k)
            inf = poisson_binomial_count_probability(model.lo, ">=", k)
            return ProbabilityBound(sup, inf, _describe_params(model.hi), _describe_params(model.lo))
        if comparator == "<=":
            sup = poisson_binomial_count_probability(model.lo, "<=", k)
            inf = poisson_binomial_count_probability(model.hi, "<=", k)
            return ProbabilityBound(sup, inf, _describe_params(model.lo), _describe_params(model.hi))
        if model.positions > VERTEX_LIMIT_POSITIONS:
            raise UnsupportedSupremumError(
                f"P(count = k) is not monotone and {model.positions} positions exceed the "
                f"vertex-enumeration limit {VERTEX_LIMIT_POSITIONS}")
        best, worst = _vertex_extremes(model, comparator, k)
        return ProbabilityBound(best[0], worst[0], _describe_params(best[1]), _describe_params(worst[1]))

    p = point_event_probability(model, event, structure, outcome_sort)
    where = "the single innate distribution"
    if isinstance(model, IndependentBinary):
        where = _describe_params(model.lo)
    return ProbabilityBound(p, p, where, where)


def point_event_probability(model: TrialModel, event: EventSpec, structure=None,
                            outcome_sort: str | None = None) -> Fraction:
    if isinstance(event, Extensional):
        if structure is None or outcome_sort is None:
            raise ValueError("extensional events need the structure and outcome sort")
        return extensional_event_probability(model, structure, event.formula, event.free_var, outcome_sort)
    if isinstance(event, ExplicitSet):
        if isinstance(model, WeightedCategorical):
            return categorical_event_probability(model, event.elements)
        return sum((outcome_probability(model, e) for e in event.elements), ZERO)
    if isinstance(model, UniformKSubset):
        return hypergeometric_count_probability(model.population, model.marked, model.pool,
                                                event.comparator, event.k)
    if isinstance(model, IndependentBinary):
        comparator, k = _as_success_count(model, event)
        return poisson_binomial_count_probability(model.lo, comparator, k)
    raise UnsupportedSupremumError("count events do not apply to a weighted categorical trial")


def outcome_probability(model: TrialModel, outcome) -> Fraction:
    """Probability of a single outcome under a point-parameter model."""
    if isinstance(model, WeightedCategorical):
        return model.weight_of(outcome) / model.total
    if isinstance(model, UniformKSubset):
        return Fraction(1, math.comb(model.population, model.pool))
    if not model.is_point:
        raise NondegenerateParametersError("outcome probabilities need point parameters")
    if model.success_value is None:
        raise ValueError("independent-binary model needs a success value to score outcomes")
    p = ONE
    for v, q in zip(outcome, model.lo):
        p *= q if v == model.success_value else ONE - q
    return p


def extensional_event_probability(model: TrialModel, structure, formula, free_var: str,
                                  outcome_sort: str) -> Fraction:
    """Sum of outcome probabilities over the set the formula defines."""
    from .logic import defined_set, variable_names
    from .structure import reduce_anonymous

    if isinstance(model, IndependentBinary) and not model.is_point:
        raise NondegenerateParametersError("extensional probabilities need point parameters")
    if isinstance(model, WeightedCategorical) and not structure.enumerable(outcome_sort):
        sub, classes = reduce_anonymous(structure, max(1, len(variable_names(formula))), [outcome_sort])
        cls = classes.get(outcome_sort)
        if cls is not None and sub.enumerable(outcome_sort):
            members = defined_set(sub, formula, free_var, outcome_sort)
            named = [e for e in members if e in cls.named]
            mass = sum((model.weight_of(e) for e in named), ZERO)
            if cls.representatives[0] in members:
                mass += model.total - sum((model.weight_of(e) for e in cls.named), ZERO)
            return mass / model.total
    members = defined_set(structure, formula, free_var, outcome_sort)
    if isinstance(model, WeightedCategorical):
        return categorical_event_probability(model, members)
    if isinstance(model, UniformKSubset):
        return Fraction(len(members), math.comb(model.population, model.pool))
    return sum((outcome_probability(model, f) for f in members), ZERO)
