"""Description complexity by cost-ordered bottom-up formula enumeration.

Formulas are built level by level in order of their length.  Each formula
is summarized by its *signature*: its typed free-variable context together
with its full truth table over all valuations of that context.  Two
formulas with the same signature are interchangeable inside any larger
formula, so only the cheapest one per signature is kept (and, because the
quantifier depth is budgeted too, a costlier one survives only if it is
strictly shallower).  The first level at which a signature with at most
the target variable free defines a set therefore gives that set's minimal
length within the grammar and budget.

Variables come from a fixed pool ``v1 .. vN``; ``v1`` plays the defining
free variable.  Only explicit sorts within the enumeration limit may be
quantified; an implicit target sort appears only as the sort of ``v1``.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import BudgetExplosionError, SortTooLargeError
from .logic.syntax import (
    And, Const, DottedExists, DottedForall, Eq, Exists, Forall, Formula, Iff, Implies, Neq, Not, Or,
    RelApp, Var, formula_length, pretty, rename_free,
)
from .structure import Explicit, Structure

log = logging.getLogger(__name__)

DEFAULT_CLASS_CAP = 10**6


@dataclass(frozen=True)
class SynthesisBudget:
    max_length: int
    max_vars: int = 3
    max_quantifier_depth: int = 3

    def __post_init__(self):
        if self.max_length < 2:
            raise ValueError("max_length must be at least 2")
        if self.max_vars < 1:
            raise ValueError("max_vars must be at least 1")
        if self.max_quantifier_depth < 0:
            raise ValueError("max_quantifier_depth must be nonnegative")

    @classmethod
    def parse(cls, text: str) -> "SynthesisBudget":
        """``"L"``, ``"L,V"`` or ``"L,V,D"``."""
        parts = [int(p) for p in text.split(",") if p.strip()]
        if not 1 <= len(parts) <= 3:
            raise ValueError(f"budget must be L[,V[,D]], got {text!r}")
        return cls(*parts)

    def describe(self) -> str:
        return (f"length <= {self.max_length}, at most {self.max_vars} variable name(s), "
                f"quantifier depth <= {self.max_quantifier_depth}")


@dataclass(frozen=True)
class SynthesisResult:
    formula: Formula | None
    length: int | None
    explored: int
    budget: SynthesisBudget

    @property
    def found(self) -> bool:
        return self.formula is not None

    @property
    def note(self) -> str:
        if self.found:
            return f"minimal among formulas with {self.budget.describe()}"
        return f"no definition with {self.budget.describe()}"


@dataclass
class _Entry:
    formula: Formula
    ctx: tuple
    table: np.ndarray
    depth: int
    text: str | None = None

    def pretty(self) -> str:
        if self.text is None:
            self.text = pretty(self.formula)
        return self.text


_COMMUTATIVE = (And, Or, Iff)
_OPS = {
    And: np.logical_and,
    Or: np.logical_or,
    Implies: lambda a, b: np.logical_or(np.logical_not(a), b),
    Iff: np.equal,
}


class _Search:
    def __init__(self, structure: Structure, sort: str, budget: SynthesisBudget,
                 class_cap: int = DEFAULT_CLASS_CAP):
        if not structure.enumerable(sort):
            raise SortTooLargeError(sort, structure.size(sort), structure.enum_limit)
        self.st = structure
        self.sort = sort
        self.budget = budget
        self.cap = class_cap
        voc = structure.vocabulary
        taken = set(voc.sorts) | set(voc.relations) | set(voc.constants)
        names, i = [], 1
        while len(names) < budget.max_vars:
            if f"v{i}" not in taken:
                names.append(f"v{i}")
            i += 1
        self.names = names
        self.target = names[0]
        self.quant_sorts = [
            s for s in voc.sorts
            if isinstance(structure.carriers[s], Explicit) and structure.enumerable(s)
        ]
        self.elements = {s: structure.elements(s) for s in set(self.quant_sorts) | {sort}}
        self.size = {s: len(e) for s, e in self.elements.items()}
        self.best_depth: dict = {}
        self.levels: dict[int, list[_Entry]] = {}
        self.definable: dict[frozenset, _Entry] = {}
        self.def_cost: dict[frozenset, int] = {}
        self.explored = 0
        self.atoms = self._atoms()

    # -- typing helpers --

    def var_sorts(self, name: str) -> list[str]:
        sorts = list(self.quant_sorts)
        if name == self.target and self.sort not in sorts:
            sorts.append(self.sort)
        return sorts

    def quantifiable(self, sort: str) -> bool:
        return sort in self.quant_sorts

    def terms_of(self, sort: str) -> list:
        out = [Const(c, s) for c, s in self.st.vocabulary.constants.items() if s == sort]
        for n in self.names:
            if sort in self.var_sorts(n):
                out.append(Var(n, sort))
        return out

    def shape(self, ctx) -> tuple:
        return tuple(self.size[s] for _, s in ctx)

    # -- atoms --

    def _table(self, ctx, pred) -> np.ndarray:
        shape = self.shape(ctx)
        domains = [self.elements[s] for _, s in ctx]
        names = [n for n, _ in ctx]
        flat = np.fromiter(
            (pred(dict(zip(names, vals))) for vals in itertools.product(*domains)),
            dtype=bool, count=int(np.prod(shape, dtype=np.int64)) if shape else 1,
        )
        return flat.reshape(shape)

    def _atoms(self) -> dict[int, list[_Entry]]:
        st = self.st
        out: dict[int, list[_Entry]] = {}

        def value(t, env):
            return st.constants[t.name] if isinstance(t, Const) else env[t.name]

        for rel, types in st.vocabulary.relations.items():
            choices = [self.terms_of(s) for s in types]
            if any(not c for c in choices):
                continue
            for args in itertools.product(*choices):
                ctx = _ctx_of(args)
                if ctx is None:
                    continue
                f = RelApp(rel, tuple(args))
                table = self._table(ctx, lambda env, a=args: st.holds_unchecked(rel, tuple(value(t, env) for t in a)))
                out.setdefault(1 + len(args), []).append(_Entry(f, ctx, table, 0))
        for s in st.vocabulary.sorts:
            terms = self.terms_of(s)
            for a, b in itertools.product(terms, repeat=2):
                ctx = _ctx_of((a, b))
                if ctx is None:
                    continue
                eq = self._table(ctx, lambda env, a=a, b=b: value(a, env) == value(b, env))
                out.setdefault(3, []).append(_Entry(Eq(a, b), ctx, eq, 0))
                out.setdefault(3, []).append(_Entry(Neq(a, b), ctx, ~eq, 0))
        return out

    # -- combinators --

    def lift(self, e: _Entry, ctx) -> np.ndarray:
        if e.ctx == ctx:
            return e.table
        have = dict(e.ctx)
        shape = [self.size[s] if n in have else 1 for n, s in ctx]
        return np.broadcast_to(e.table.reshape(shape), self.shape(ctx))

    def quantify(self, e: _Entry, kind, name: str, sort: str):
        ctx = e.ctx
        if (name, sort) not in ctx:
            ctx = tuple(sorted(ctx + ((name, sort),)))
        table = self.lift(e, ctx)
        axis = ctx.index((name, sort))
        if kind in (DottedExists, DottedForall):
            mask = np.ones(self.shape(ctx), dtype=bool)
            n = self.size[sort]
            for j, (other, s) in enumerate(ctx):
                if j == axis or s != sort:
                    continue
                shape = [1] * len(ctx)
                shape[axis] = n
                a = np.arange(n).reshape(shape)
                shape = [1] * len(ctx)
                shape[j] = n
                b = np.arange(n).reshape(shape)
                mask = mask & (a != b)
            if kind is DottedExists:
                result = np.any(table & mask, axis=axis)
            else:
                result = np.all(table | ~mask, axis=axis)
        elif kind is Exists:
            result = np.any(table, axis=axis)
        else:
            result = np.all(table, axis=axis)
        new_ctx = ctx[:axis] + ctx[axis + 1:]
        return new_ctx, np.ascontiguousarray(result)

    # -- level construction --

    def candidates(self, cost: int) -> Iterable[_Entry]:
        yield from self.atoms.get(cost, ())
        for e in self.levels.get(cost - 1, ()):
            if isinstance(e.formula, Not):
                continue
            yield _Entry(Not(e.formula), e.ctx, ~e.table, e.depth)
        for c1 in range(2, cost - 2):
            c2 = cost - 1 - c1
            left, right = self.levels.get(c1, ()), self.levels.get(c2, ())
            if not left or not right:
                continue
            for i, a in enumerate(left):
                for j, b in enumerate(right):
                    # a & a and a | a are just a; a -> a is kept since "true over
                    # this context" can be cheapest that way
                    same = c1 == c2 and i == j
                    ctx = _merge(a.ctx, b.ctx)
                    if ctx is None:
                        continue
                    ta, tb = self.lift(a, ctx), self.lift(b, ctx)
                    depth = max(a.depth, b.depth)
                    for op in ((Implies, Iff) if same else (And, Or, Implies, Iff)):
                        if op in _COMMUTATIVE and (c1 > c2 or (c1 == c2 and i > j)):
                            continue
                        yield _Entry(op(a.formula, b.formula), ctx, _OPS[op](ta, tb), depth)
        if cost - 2 >= 2:
            for e in self.levels.get(cost - 2, ()):
                if e.depth + 1 > self.budget.max_quantifier_depth:
                    continue
                bound = dict(e.ctx)
                for name in self.names:
                    if name in bound:
                        sort = bound[name]
                        if not self.quantifiable(sort):
                            continue
                        kinds = (Exists, Forall, DottedExists, DottedForall)
                        sorts = [sort]
                    else:
                        # plain quantifiers over an absent variable are vacuous; dotted
                        # ones only matter if another free variable shares the sort
                        kinds = (DottedExists, DottedForall)
                        sorts = [s for s in self.quant_sorts if s in bound.values()]
                    for sort in sorts:
                        for kind in kinds:
                            ctx, table = self.quantify(e, kind, name, sort)
                            yield _Entry(kind(name, sort, e.formula), ctx, table, e.depth + 1)

    def run_level(self, cost: int) -> list[_Entry]:
        fresh: dict = {}
        for cand in self.candidates(cost):
            key = (cand.ctx, cand.table.tobytes())
            prev_depth = self.best_depth.get(key)
            if prev_depth is not None and prev_depth <= cand.depth:
                continue
            cur = fresh.get(key)
            if cur is not None:
                if (cur.depth, cur.pretty()) <= (cand.depth, cand.pretty()):
                    continue
            fresh[key] = cand
        admitted = []
        for key, e in fresh.items():
            self.best_depth[key] = e.depth
            if not e.table.flags.c_contiguous or e.table.base is not None:
                e.table = np.array(e.table, copy=True)
            admitted.append(e)
        self.explored += len(admitted)
        if len(self.best_depth) > self.cap:
            raise BudgetExplosionError(len(self.best_depth), self.cap)
        self.levels[cost] = admitted
        self._record(cost, admitted)
        return admitted

    def _record(self, cost: int, entries: list[_Entry]) -> None:
        elems = self.elements[self.sort]
        full = frozenset(elems)
        hits: dict[frozenset, _Entry] = {}
        for e in entries:
            if e.ctx == ():
                s = full if bool(e.table) else frozenset()
            elif e.ctx == ((self.target, self.sort),):
                s = frozenset(elems[i] for i in np.flatnonzero(e.table))
            else:
                continue
            if s in self.definable:
                continue
            cur = hits.get(s)
            if cur is None or e.pretty() < cur.pretty():
                hits[s] = e
        for s, e in hits.items():
            self.definable[s] = e
            self.def_cost[s] = cost

    def run(self, stop=None) -> None:
        for cost in range(2, self.budget.max_length + 1):
            self.run_level(cost)
            log.debug("cost %d: %d new classes, %d total", cost, len(self.levels[cost]), self.explored)
            if stop is not None and stop():
                return

    def witness(self, s: frozenset, free_var: str | None) -> Formula:
        f = self.definable[s].formula
        if free_var and free_var != self.target:
            f = rename_free(f, self.target, free_var)
        return f


def _ctx_of(terms) -> tuple | None:
    ctx: dict[str, str] = {}
    for t in terms:
        if isinstance(t, Var):
            if ctx.get(t.name, t.sort) != t.sort:
                return None
            ctx[t.name] = t.sort
    return tuple(sorted(ctx.items()))


def _merge(a: tuple, b: tuple) -> tuple | None:
    if a == b:
        return a
    out = dict(a)
    for n, s in b:
        if out.get(n, s) != s:
            return None
        out[n] = s
    return tuple(sorted(out.items()))


def _free_name(structure: Structure, preferred: str) -> str:
    voc = structure.vocabulary
    taken = set(voc.sorts) | set(voc.relations) | set(voc.constants)
    if preferred not in taken:
        return preferred
    i = 0
    while f"{preferred}{i}" in taken:
        i += 1
    return f"{preferred}{i}"


def enumerate_definable(structure: Structure, sort: str, budget: SynthesisBudget,
                        free_var: str = "x", class_cap: int = DEFAULT_CLASS_CAP) -> dict:
    """Every subset of ``sort`` definable within ``budget``, with its minimal
    length and a witness formula in ``free_var``.
    """
    search = _Search(structure, sort, budget, class_cap)
    search.run()
    name = _free_name(structure, free_var)
    return {s: (search.def_cost[s], search.witness(s, name)) for s in search.definable}


def description_complexity(structure: Structure, target: Iterable, sort: str, budget: SynthesisBudget,
                           free_var: str = "x", class_cap: int = DEFAULT_CLASS_CAP) -> SynthesisResult:
    """Length of a shortest definition of ``target`` within ``budget``."""
    target = frozenset(target)
    stray = [e for e in target if not structure.contains(sort, e)]
    if stray:
        raise ValueError(f"target contains non-elements of {sort}: {stray[:3]}")
    search = _Search(structure, sort, budget, class_cap)
    search.run(stop=lambda: target in search.definable)
    if target not in search.definable:
        return SynthesisResult(None, None, search.explored, budget)
    f = search.witness(target, _free_name(structure, free_var))
    length = formula_length(f)
    assert length == search.def_cost[target]
    return SynthesisResult(f, length, search.explored, budget)
