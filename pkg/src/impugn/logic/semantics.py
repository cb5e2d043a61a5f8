"""Model checking: truth of a formula in a structure under a valuation."""

from __future__ import annotations

from typing import Callable, Mapping

from ..errors import ExtraFreeVariablesError, TypeMismatchError, UnboundVariableError
from ..structure import Structure
from .syntax import (
    And, Const, DottedExists, DottedForall, Eq, Exists, Forall, Formula, Iff, Implies, Neq, Not, Or,
    RelApp, Var, dotted_exclusions, free_vars,
)

Env = dict


def _term_getter(t, structure: Structure):
    if isinstance(t, Const):
        value = structure.constant(t.name)
        return lambda env: value
    name = t.name

    def get(env):
        try:
            return env[name]
        except KeyError:
            raise UnboundVariableError(name) from None

    return get


def compile_formula(structure: Structure, f: Formula) -> Callable[[Env], bool]:
    """Turn ``f`` into a predicate over valuations (dicts name -> element).

    Quantified sorts are materialized at compile time, so an over-limit sort
    raises :class:`SortTooLargeError` here.
    """
    if isinstance(f, RelApp):
        getters = [_term_getter(t, structure) for t in f.args]
        rel = f.relation
        b = structure.builtins.get(rel)
        if b is None:
            ext = structure.relations[rel]
            if len(getters) == 1:
                g0 = getters[0]
                return lambda env: (g0(env),) in ext
            if len(getters) == 2:
                g0, g1 = getters
                return lambda env: (g0(env), g1(env)) in ext
            return lambda env: tuple(g(env) for g in getters) in ext
        if b.kind == "member":
            gm, gs = getters
            return lambda env: gm(env) in gs(env)
        isort = structure.vocabulary.relations[rel][1]
        index_of = structure.index_of
        gf, gi = getters[0], getters[1]
        if len(getters) == 2:
            value = b.value
            return lambda env: gf(env)[index_of(isort, gi(env))] == value
        gv = getters[2]
        return lambda env: gf(env)[index_of(isort, gi(env))] == gv(env)
    if isinstance(f, (Eq, Neq)):
        gl = _term_getter(f.left, structure)
        gr = _term_getter(f.right, structure)
        if isinstance(f, Eq):
            return lambda env: gl(env) == gr(env)
        return lambda env: gl(env) != gr(env)
    if isinstance(f, Not):
        inner = compile_formula(structure, f.body)
        return lambda env: not inner(env)
    if isinstance(f, And):
        a, b_ = compile_formula(structure, f.left), compile_formula(structure, f.right)
        return lambda env: a(env) and b_(env)
    if isinstance(f, Or):
        a, b_ = compile_formula(structure, f.left), compile_formula(structure, f.right)
        return lambda env: a(env) or b_(env)
    if isinstance(f, Implies):
        a, b_ = compile_formula(structure, f.left), compile_formula(structure, f.right)
        return lambda env: (not a(env)) or b_(env)
    if isinstance(f, Iff):
        a, b_ = compile_formula(structure, f.left), compile_formula(structure, f.right)
        return lambda env: a(env) == b_(env)

    domain = structure.elements(f.sort)
    body = compile_formula(structure, f.body)
    v = f.var
    excluded = [y.name for y in dotted_exclusions(f)] if isinstance(f, (DottedExists, DottedForall)) else []

    def scoped(env, test, want):
        # rebinding v hides any outer value; restore it afterwards
        had = v in env
        old = env.get(v)
        try:
            for a in domain:
                env[v] = a
                if test(env) == want:
                    return True
            return False
        finally:
            if had:
                env[v] = old
            else:
                env.pop(v, None)

    if not excluded:
        if isinstance(f, (Exists, DottedExists)):
            return lambda env: scoped(env, body, True)
        return lambda env: not scoped(env, body, False)

    def guarded(env):
        avoid = [env[y] for y in excluded]
        return env[v] not in avoid

    if isinstance(f, DottedExists):
        return lambda env: scoped(env, lambda e: guarded(e) and body(e), True)
    return lambda env: not scoped(env, lambda e: guarded(e) and not body(e), True)


def _check_valuation(structure: Structure, f: Formula, valuation: Mapping) -> dict:
    env = dict(valuation)
    for name, sort in free_vars(f).items():
        if name not in env:
            raise UnboundVariableError(name)
        if not structure.contains(sort, env[name]):
            raise TypeMismatchError(f"value of {name} is not an element of {sort}: {env[name]!r}", name)
    return env


def evaluate(structure: Structure, f: Formula, valuation: Mapping | None = None) -> bool:
    """Tarskian truth value of ``f`` in ``structure`` under ``valuation``."""
    env = _check_valuation(structure, f, valuation or {})
    return compile_formula(structure, f)(env)


def defined_set(structure: Structure, f: Formula, free_var: str, sort: str | None = None) -> frozenset:
    """``{a : structure |= f[free_var := a]}`` over the free variable's sort.

    ``sort`` is only needed when ``free_var`` does not occur in ``f``.
    """
    fv = free_vars(f)
    extra = set(fv) - {free_var}
    if extra:
        raise ExtraFreeVariablesError(extra)
    if sort is None:
        if free_var not in fv:
            raise ValueError(f"{free_var!r} does not occur free; pass its sort explicitly")
        sort = fv[free_var]
    elif free_var in fv and fv[free_var] != sort:
        raise TypeMismatchError(f"{free_var} has sort {fv[free_var]}, not {sort}", free_var)
    domain = structure.elements(sort)
    pred = compile_formula(structure, f)
    env: dict = {}
    out = []
    for a in domain:
        env[free_var] = a
        if pred(env):
            out.append(a)
    return frozenset(out)
