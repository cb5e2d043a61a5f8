"""First-order formula AST, pretty-printer, length metric and desugaring."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class Var:
    name: str
    sort: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    name: str
    sort: str

    def __str__(self):
        return self.name


Term = Union[Var, Const]


@dataclass(frozen=True)
class RelApp:
    relation: str
    args: tuple


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Neq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    sort: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    sort: str
    body: "Formula"


@dataclass(frozen=True)
class DottedExists:
    var: str
    sort: str
    body: "Formula"


@dataclass(frozen=True)
class DottedForall:
    var: str
    sort: str
    body: "Formula"


Formula = Union[RelApp, Eq, Neq, Not, And, Or, Implies, Iff, Exists, Forall, DottedExists, DottedForall]

ATOMS = (RelApp, Eq, Neq)
BINARY = (And, Or, Implies, Iff)
QUANTIFIERS = (Exists, Forall, DottedExists, DottedForall)
DOTTED = (DottedExists, DottedForall)

# binding strength: higher binds tighter
_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}
_SYMBOL = {And: "&", Or: "|", Implies: "->", Iff: "<->"}
_QUANT = {Exists: "exists", Forall: "forall", DottedExists: "exists*", DottedForall: "forall*"}
RIGHT_ASSOC = (Implies,)


def formula_length(f: Formula) -> int:
    """Symbol count: relation, variable and constant names are one symbol each.

    ``R(t1..tk)`` costs 1+k, ``=``/``!=`` atoms 3, negation 1 plus its body,
    binary connectives 1 plus both sides, quantifiers (dotted or not) 2 plus
    the body.  Parentheses, commas, sort ascriptions and the dot are free.
    """
    if isinstance(f, RelApp):
        return 1 + len(f.args)
    if isinstance(f, (Eq, Neq)):
        return 3
    if isinstance(f, Not):
        return 1 + formula_length(f.body)
    if isinstance(f, BINARY):
        return 1 + formula_length(f.left) + formula_length(f.right)
    return 2 + formula_length(f.body)


def quantifier_depth(f: Formula) -> int:
    if isinstance(f, ATOMS):
        return 0
    if isinstance(f, Not):
        return quantifier_depth(f.body)
    if isinstance(f, BINARY):
        return max(quantifier_depth(f.left), quantifier_depth(f.right))
    return 1 + quantifier_depth(f.body)


def free_vars(f: Formula) -> dict[str, str]:
    """Free variables mapped to their sorts."""
    if isinstance(f, RelApp):
        return {t.name: t.sort for t in f.args if isinstance(t, Var)}
    if isinstance(f, (Eq, Neq)):
        return {t.name: t.sort for t in (f.left, f.right) if isinstance(t, Var)}
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, BINARY):
        out = free_vars(f.left)
        out.update(free_vars(f.right))
        return out
    out = free_vars(f.body)
    out.pop(f.var, None)
    return out


def variable_names(f: Formula) -> set[str]:
    """Every variable name occurring in ``f``, bound or free."""
    if isinstance(f, RelApp):
        return {t.name for t in f.args if isinstance(t, Var)}
    if isinstance(f, (Eq, Neq)):
        return {t.name for t in (f.left, f.right) if isinstance(t, Var)}
    if isinstance(f, Not):
        return variable_names(f.body)
    if isinstance(f, BINARY):
        return variable_names(f.left) | variable_names(f.right)
    return variable_names(f.body) | {f.var}


def dotted_exclusions(f: Formula) -> list[Var]:
    """Variables a dotted quantifier's witness must differ from.

    These are the free variables of the body other than the bound one.  Only
    variables of the bound variable's sort are kept: equality is sorted, so
    an element can only be compared with elements of its own sort.
    """
    fv = free_vars(f.body)
    return [Var(n, s) for n, s in sorted(fv.items()) if n != f.var and s == f.sort]


def desugar_dotted(f: Formula) -> Formula:
    """Replace dotted quantifiers by plain ones guarded with inequalities."""
    if isinstance(f, ATOMS):
        return f
    if isinstance(f, Not):
        return Not(desugar_dotted(f.body))
    if isinstance(f, BINARY):
        return type(f)(desugar_dotted(f.left), desugar_dotted(f.right))
    body = desugar_dotted(f.body)
    if not isinstance(f, DOTTED):
        return type(f)(f.var, f.sort, body)
    x = Var(f.var, f.sort)
    guards = [Neq(x, y) for y in dotted_exclusions(f)]
    if isinstance(f, DottedExists):
        for g in reversed(guards):
            body = And(g, body)
        return Exists(f.var, f.sort, body)
    if guards:
        cond = guards[0]
        for g in guards[1:]:
            cond = And(cond, g)
        body = Implies(cond, body)
    return Forall(f.var, f.sort, body)


def rename_free(f: Formula, old: str, new: str) -> Formula:
    """Rename free occurrences of variable ``old``; ``new`` must not occur in ``f``."""
    def term(t):
        return Var(new, t.sort) if isinstance(t, Var) and t.name == old else t

    if isinstance(f, RelApp):
        return RelApp(f.relation, tuple(term(t) for t in f.args))
    if isinstance(f, (Eq, Neq)):
        return type(f)(term(f.left), term(f.right))
    if isinstance(f, Not):
        return Not(rename_free(f.body, old, new))
    if isinstance(f, BINARY):
        return type(f)(rename_free(f.left, old, new), rename_free(f.right, old, new))
    if f.var == old:
        return f
    return type(f)(f.var, f.sort, rename_free(f.body, old, new))


# ---------------------------------------------------------------------------
# pretty-printing


def pretty(f: Formula) -> str:
    """Concrete syntax that parses back to exactly ``f``."""
    return _pp(f, tail=True)


def _pp(f: Formula, tail: bool) -> str:
    if isinstance(f, RelApp):
        return f"{f.relation}({','.join(str(t) for t in f.args)})"
    if isinstance(f, Eq):
        return f"{f.left} = {f.right}"
    if isinstance(f, Neq):
        return f"{f.left} != {f.right}"
    if isinstance(f, Not):
        b = f.body
        if isinstance(b, (RelApp, Not)):
            return "!" + _pp(b, tail)
        return "!(" + _pp(b, True) + ")"
    if isinstance(f, BINARY):
        p = _PREC[type(f)]
        right_assoc = isinstance(f, RIGHT_ASSOC)
        left = _operand(f.left, p, strict=right_assoc, tail=False)
        right = _operand(f.right, p, strict=not right_assoc, tail=tail)
        return f"{left} {_SYMBOL[type(f)]} {right}"
    text = f"{_QUANT[type(f)]} {f.var}:{f.sort}. {_pp(f.body, True)}"
    return text if tail else f"({text})"


def _operand(f: Formula, parent_prec: int, strict: bool, tail: bool) -> str:
    if isinstance(f, BINARY):
        p = _PREC[type(f)]
        if p < parent_prec or (strict and p == parent_prec):
            return "(" + _pp(f, True) + ")"
        return _pp(f, tail)
    return _pp(f, tail)


__all__ = [
    "Var", "Const", "Term", "RelApp", "Eq", "Neq", "Not", "And", "Or", "Implies", "Iff",
    "Exists", "Forall", "DottedExists", "DottedForall", "Formula",
    "formula_length", "quantifier_depth", "free_vars", "variable_names", "dotted_exclusions",
    "desugar_dotted", "rename_free", "pretty",
]
