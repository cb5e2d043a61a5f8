"""First-order formulas over multi-sorted vocabularies."""

from .parser import parse, tokenize
from .semantics import compile_formula, defined_set, evaluate
from .syntax import (
    And, Const, DottedExists, DottedForall, Eq, Exists, Forall, Formula, Iff, Implies, Neq, Not, Or,
    RelApp, Term, Var, desugar_dotted, dotted_exclusions, formula_length, free_vars, pretty,
    quantifier_depth, rename_free, variable_names,
)

eval_formula = evaluate

__all__ = [
    "parse", "tokenize", "evaluate", "eval_formula", "defined_set", "compile_formula",
    "Var", "Const", "Term", "RelApp", "Eq", "Neq", "Not", "And", "Or", "Implies", "Iff",
    "Exists", "Forall", "DottedExists", "DottedForall", "Formula",
    "formula_length", "quantifier_depth", "free_vars", "variable_names", "dotted_exclusions",
    "desugar_dotted", "rename_free", "pretty",
]
