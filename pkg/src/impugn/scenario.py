"""Scenario documents: YAML (or JSON) files describing one case."""

from __future__ import annotations

import os
import warnings
from fractions import Fraction
from typing import Any, Mapping

import yaml

from .errors import FormulaError, ImpugnError, ScenarioError, StructureIssue, StructureValidationError
from .logic import free_vars, parse, pretty
from .probability import (
    CountEvent, ExplicitSet, Extensional, IndependentBinary, UniformKSubset, WeightBlock,
    WeightedCategorical, format_rational, parse_rational,
)
from .structure import Vocabulary, encode_element, parse_element, validate
from .verdict import FocalEvent, Scenario, Trial, scenario_problems

TOP_KEYS = ("name", "threshold", "complexity_budget", "vocabulary", "structure", "trial",
            "focal_event", "actual_outcome", "background_notes")
REQUIRED = ("name", "threshold", "vocabulary", "structure", "trial", "focal_event", "actual_outcome")

MODEL_KEYS = {
    "weighted_categorical": ("kind", "weights", "blocks"),
    "uniform_k_subset": ("kind", "population", "pool", "marked", "marked_sort"),
    "independent_binary": ("kind", "positions", "success_value", "prob", "lo", "hi"),
}
EVENT_KEYS = {
    "count": ("kind", "comparator", "k", "value"),
    "formula": ("kind", "formula", "free_variable"),
    "set": ("kind", "elements"),
}


class _Lines:
    """Map from document paths (``a.b[2]``) to 1-based source lines."""

    def __init__(self, text: str):
        self.lines: dict[str, int] = {}
        try:
            node = yaml.compose(text)
        except yaml.YAMLError:
            node = None
        if node is not None:
            self._walk(node, "")

    def _walk(self, node, path):
        self.lines[path] = node.start_mark.line + 1
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                key = f"{path}.{k.value}" if path else str(k.value)
                self.lines[key] = k.start_mark.line + 1
                self._walk_child(v, key)
        elif isinstance(node, yaml.SequenceNode):
            for i, v in enumerate(node.value):
                self._walk_child(v, f"{path}[{i}]")

    def _walk_child(self, node, path):
        line = self.lines.get(path)
        self._walk(node, path)
        if line is not None:
            self.lines[path] = line

    def find(self, path: str | None) -> int | None:
        while path:
            if path in self.lines:
                return self.lines[path]
            cut = max(path.rfind("."), path.rfind("["))
            path = path[:cut] if cut > 0 else ""
        return None


def _unknown(where: str, data: Mapping, allowed, lenient: bool, lines: _Lines, path):
    for key in data:
        if key not in allowed:
            loc = f"{where}.{key}" if where else str(key)
            msg = f"unknown key {loc!r}"
            if not lenient:
                raise ScenarioError(msg, path, lines.find(loc))
            warnings.warn(msg, stacklevel=3)


def _need(data: Mapping, key: str, where: str, lines: _Lines, path):
    if key not in data:
        raise ScenarioError(f"missing key {where + '.' if where else ''}{key}", path, lines.find(where))
    return data[key]


def _rational(raw, where, lines, path) -> Fraction:
    try:
        return parse_rational(raw)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ScenarioError(f"{where}: not a rational number: {raw!r} ({exc})", path, lines.find(where)) from None


def _as_int(raw, where, lines, path) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise ScenarioError(f"{where} must be an integer, got {raw!r}", path, lines.find(where))
    return raw


def _model(raw, structure, outcome_sort, lenient, lines, path):
    where = "trial.model"
    if not isinstance(raw, Mapping):
        raise ScenarioError(f"{where} must be a mapping", path, lines.find(where))
    kind = _need(raw, "kind", where, lines, path)
    if kind not in MODEL_KEYS:
        raise ScenarioError(f"unknown trial model kind {kind!r}; expected one of {sorted(MODEL_KEYS)}",
                            path, lines.find(f"{where}.kind"))
    _unknown(where, raw, MODEL_KEYS[kind], lenient, lines, path)
    if kind == "weighted_categorical":
        weights = {}
        for e, w in (raw.get("weights") or {}).items():
            weights[str(e)] = _rational(w, f"{where}.weights.{e}", lines, path)
        blocks = []
        for i, b in enumerate(raw.get("blocks") or []):
            loc = f"{where}.blocks[{i}]"
            _unknown(loc, b, ("prefix", "from", "to", "weight"), lenient, lines, path)
            blocks.append(WeightBlock(str(b.get("prefix", "")), _as_int(b.get("from"), f"{loc}.from", lines, path),
                                      _as_int(b.get("to"), f"{loc}.to", lines, path),
                                      _rational(b.get("weight"), f"{loc}.weight", lines, path)))
        return WeightedCategorical(weights, tuple(blocks))
    if kind == "uniform_k_subset":
        ints = {k: _as_int(_need(raw, k, where, lines, path), f"{where}.{k}", lines, path)
                for k in ("population", "pool", "marked")}
        ms = raw.get("marked_sort")
        return UniformKSubset(ints["population"], ints["pool"], ints["marked"], None if ms is None else str(ms))
    positions = raw.get("positions")
    if positions is None:
        carrier = structure.carriers.get(outcome_sort)
        index = getattr(carrier, "index", None)
        if index is None:
            raise ScenarioError(f"{where}.positions is required unless the outcome sort is a function sort",
                                path, lines.find(where))
        positions = structure.size(index)
    positions = _as_int(positions, f"{where}.positions", lines, path)

    def vec(key, default=None):
        value = raw.get(key, default)
        if value is None:
            return None
        if isinstance(value, list):
            if len(value) != positions:
                raise ScenarioError(f"{where}.{key} has {len(value)} entries, expected {positions}",
                                    path, lines.find(f"{where}.{key}"))
            return tuple(_rational(v, f"{where}.{key}[{i}]", lines, path) for i, v in enumerate(value))
        return (_rational(value, f"{where}.{key}", lines, path),) * positions

    lo = vec("prob") or vec("lo")
    if lo is None:
        raise ScenarioError(f"{where} needs prob or lo/hi", path, lines.find(where))
    hi = vec("hi") if "prob" not in raw else lo
    sv = raw.get("success_value")
    return IndependentBinary(lo, hi or lo, None if sv is None else str(sv))


def _event(raw, structure, formula, free_var, outcome_sort, lenient, lines, path):
    where = "focal_event.probability"
    if raw is None:
        return Extensional(formula, free_var)
    kind = _need(raw, "kind", where, lines, path)
    if kind not in EVENT_KEYS:
        raise ScenarioError(f"unknown event kind {kind!r}; expected one of {sorted(EVENT_KEYS)}",
                            path, lines.find(f"{where}.kind"))
    _unknown(where, raw, EVENT_KEYS[kind], lenient, lines, path)
    if kind == "count":
        k = _as_int(_need(raw, "k", where, lines, path), f"{where}.k", lines, path)
        value = raw.get("value")
        return CountEvent(str(_need(raw, "comparator", where, lines, path)), k,
                          None if value is None else str(value))
    if kind == "formula":
        text = raw.get("formula")
        if text is None:
            return Extensional(formula, free_var)
        var = str(raw.get("free_variable", free_var))
        f = _formula(text, structure, {var: outcome_sort}, f"{where}.formula", lines, path)
        return Extensional(f, var)
    elements = []
    for i, e in enumerate(_need(raw, "elements", where, lines, path) or []):
        try:
            elements.append(parse_element(structure, outcome_sort, e))
        except StructureIssue as exc:
            raise ScenarioError(exc.message, path, lines.find(f"{where}.elements[{i}]")) from None
    return ExplicitSet(frozenset(elements))


def _formula(text, structure, fv, where, lines, path):
    try:
        return parse(str(text), structure.vocabulary, fv)
    except FormulaError as exc:
        line = lines.find(where)
        raise ScenarioError(f"{where}: {exc}", path, line) from None


def from_data(data: Any, *, lenient: bool = False, path: str | None = None, lines: _Lines | None = None,
              enum_limit: int | None = None) -> Scenario:
    """Build a validated :class:`Scenario` from a parsed document."""
    lines = lines or _Lines("")
    if not isinstance(data, Mapping):
        raise ScenarioError("a scenario document must be a mapping", path, 1)
    _unknown("", data, TOP_KEYS, lenient, lines, path)
    for key in REQUIRED:
        _need(data, key, "", lines, path)
    try:
        vocabulary = Vocabulary.from_data(data["vocabulary"] or {})
        structure = validate(vocabulary, data["structure"] or {}, enum_limit)
    except StructureValidationError as exc:
        first = next((i.location for i in exc.issues if i.location), None)
        raise ScenarioError(str(exc), path, lines.find(first)) from exc

    trial_raw = data["trial"]
    _unknown("trial", trial_raw, ("outcome_sort", "model"), lenient, lines, path)
    sort = str(_need(trial_raw, "outcome_sort", "trial", lines, path))
    if sort not in vocabulary.sorts:
        raise ScenarioError(f"outcome sort {sort!r} is not declared", path, lines.find("trial.outcome_sort"))
    try:
        model = _model(_need(trial_raw, "model", "trial", lines, path), structure, sort, lenient, lines, path)
    except ImpugnError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"trial.model: {exc}", path, lines.find("trial.model")) from None

    fe = data["focal_event"]
    _unknown("focal_event", fe, ("formula", "free_variable", "probability"), lenient, lines, path)
    text = _need(fe, "formula", "focal_event", lines, path)
    var = fe.get("free_variable")
    if var is None:
        # infer the free variable: parse once without declarations
        probe = _formula(text, structure, None, "focal_event.formula", lines, path)
        names = list(free_vars(probe))
        if len(names) != 1:
            raise ScenarioError(f"focal formula must have one free variable, found {names}; "
                                f"set focal_event.free_variable", path, lines.find("focal_event.formula"))
        var = names[0]
    var = str(var)
    formula = _formula(text, structure, {var: sort}, "focal_event.formula", lines, path)
    try:
        spec = _event(fe.get("probability"), structure, formula, var, sort, lenient, lines, path)
    except ImpugnError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"focal_event.probability: {exc}", path,
                            lines.find("focal_event.probability")) from None

    try:
        actual = parse_element(structure, sort, data["actual_outcome"])
    except StructureIssue as exc:
        raise ScenarioError(f"actual_outcome: {exc.message}", path, lines.find("actual_outcome")) from None

    budget = data.get("complexity_budget")
    if budget is not None:
        budget = _as_int(budget, "complexity_budget", lines, path)
    s = Scenario(
        name=str(data["name"]),
        threshold=_rational(data["threshold"], "threshold", lines, path),
        structure=structure,
        trial=Trial(sort, model),
        focal=FocalEvent(formula, var, spec),
        actual_outcome=actual,
        complexity_budget=budget,
        background_notes=str(data.get("background_notes") or ""),
    )
    problems = scenario_problems(s)
    if problems:
        loc = "threshold" if problems[0].startswith("threshold") else "trial"
        raise ScenarioError("; ".join(problems), path, lines.find(loc))
    return s


def loads(text: str, *, lenient: bool = False, path: str | None = None,
          enum_limit: int | None = None) -> Scenario:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ScenarioError(f"parse error: {getattr(exc, 'problem', exc)}", path,
                            None if mark is None else mark.line + 1) from None
    return from_data(data, lenient=lenient, path=path, lines=_Lines(text), enum_limit=enum_limit)


def load(path: str | os.PathLike, *, lenient: bool = False, enum_limit: int | None = None) -> Scenario:
    path = os.fspath(path)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc.strerror}", path) from None
    except UnicodeDecodeError:
        raise ScenarioError("scenario files must be UTF-8", path) from None
    return loads(text, lenient=lenient, path=path, enum_limit=enum_limit)


# ---------------------------------------------------------------------------
# serialization


def _q(x: Fraction) -> str | int:
    return x.numerator if x.denominator == 1 else format_rational(x)


def _model_data(model, structure, sort) -> dict:
    if isinstance(model, WeightedCategorical):
        data: dict = {"kind": "weighted_categorical", "weights": {e: _q(w) for e, w in model.weights.items()}}
        if model.blocks:
            data["blocks"] = [{"prefix": b.prefix, "from": b.start, "to": b.stop, "weight": _q(b.weight)}
                              for b in model.blocks]
        return data
    if isinstance(model, UniformKSubset):
        data = {"kind": "uniform_k_subset", "population": model.population, "pool": model.pool,
                "marked": model.marked}
        if model.marked_sort is not None:
            data["marked_sort"] = model.marked_sort
        return data
    data = {"kind": "independent_binary", "positions": model.positions}
    if model.success_value is not None:
        data["success_value"] = model.success_value
    same = len(set(model.lo)) <= 1 and len(set(model.hi)) <= 1
    if model.is_point and same:
        data["prob"] = _q(model.lo[0]) if model.lo else 0
    elif same:
        data["lo"], data["hi"] = _q(model.lo[0]), _q(model.hi[0])
    else:
        data["lo"], data["hi"] = [_q(p) for p in model.lo], [_q(p) for p in model.hi]
    return data


def _event_data(spec, s: Scenario):
    if isinstance(spec, CountEvent):
        data = {"kind": "count", "comparator": spec.comparator, "k": spec.k}
        if spec.value is not None:
            data["value"] = spec.value
        return data
    if isinstance(spec, Extensional):
        if spec.formula == s.focal.formula and spec.free_var == s.focal.free_var:
            return {"kind": "formula"}
        return {"kind": "formula", "formula": pretty(spec.formula), "free_variable": spec.free_var}
    sort = s.trial.outcome_sort
    st = s.structure
    ordered = sorted(spec.elements, key=lambda e: st.index_of(sort, e) if isinstance(e, str) else str(e))
    return {"kind": "set", "elements": [encode_element(st, sort, e) for e in ordered]}


def to_data(s: Scenario) -> dict:
    data: dict = {"name": s.name, "threshold": format_rational(s.threshold)}
    if s.complexity_budget is not None:
        data["complexity_budget"] = s.complexity_budget
    data["vocabulary"] = s.structure.vocabulary.to_data()
    data["structure"] = s.structure.to_data()
    data["trial"] = {"outcome_sort": s.trial.outcome_sort,
                     "model": _model_data(s.trial.model, s.structure, s.trial.outcome_sort)}
    data["focal_event"] = {"formula": pretty(s.focal.formula), "free_variable": s.focal.free_var,
                           "probability": _event_data(s.focal.prob_spec, s)}
    data["actual_outcome"] = encode_element(s.structure, s.trial.outcome_sort, s.actual_outcome)
    if s.background_notes:
        data["background_notes"] = s.background_notes
    return data


def dumps(s: Scenario) -> str:
    return yaml.safe_dump(to_data(s), sort_keys=False, allow_unicode=True, width=100)


def dump(s: Scenario, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(s))
