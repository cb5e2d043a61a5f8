"""Impugning the null hypothesis of executed probabilistic trials."""

from .errors import ImpugnError
from .logic import defined_set, evaluate, formula_length, parse, pretty
from .probability import event_probability_sup
from .scenario import dump, dumps, load, loads
from .structure import Structure, Vocabulary, validate
from .synthesis import SynthesisBudget, description_complexity, enumerate_definable
from .verdict import CheckOptions, Report, Scenario, audit_description, check

__all__ = [
    "CheckOptions", "ImpugnError", "Report", "Scenario", "Structure", "SynthesisBudget", "Vocabulary",
    "audit_description", "check", "defined_set", "description_complexity", "dump", "dumps",
    "enumerate_definable", "evaluate", "event_probability_sup", "formula_length", "load", "loads",
    "parse", "pretty", "validate",
]
