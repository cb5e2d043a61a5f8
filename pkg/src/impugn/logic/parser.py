"""Recursive-descent parser for the concrete formula syntax.

Precedence, tightest first: ``!``, ``&``, ``|``, ``->`` (right associative),
``<->``.  ``&``, ``|`` and ``<->`` associate to the left.  Quantifiers
``exists v:S.``, ``forall v:S.`` and their dotted forms ``exists*`` /
``forall*`` extend as far right as possible.  The usual logical symbols
(``∃ ∀ ¬ ∧ ∨ → ↔ ≠``) are accepted as aliases.

Identifiers that name a vocabulary constant are constants unless a
quantifier (or the ``free_vars`` argument) binds the name; anything else
is a variable.  Sorts of free variables not given in ``free_vars`` are
inferred from the argument positions and equalities they occur in.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

from ..errors import FormulaArityError, FormulaSyntaxError, FormulaTypeError, UnknownSymbolError
from .syntax import (
    And, Const, DottedExists, DottedForall, Eq, Exists, Forall, Formula, Iff, Implies, Neq, Not, Or,
    RelApp, Var,
)

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<quant>(?:exists|forall)(?:\*|(?![A-Za-z0-9_]))|[∃∀]\*?)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<op><->|->|!=|[()!&|=,:.]|[¬∧∨→↔≠])
    """,
    re.VERBOSE,
)

_ALIASES = {"¬": "!", "∧": "&", "∨": "|", "→": "->", "↔": "<->", "≠": "!=",
            "∃": "exists", "∀": "forall", "∃*": "exists*", "∀*": "forall*"}
_QUANTS = {"exists": Exists, "forall": Forall, "exists*": DottedExists, "forall*": DottedForall}


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[_Tok]:
    toks = []
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[i]!r}", i)
        kind = m.lastgroup
        if kind != "ws":
            t = m.group()
            toks.append(_Tok(kind, _ALIASES.get(t, t), i))
        i = m.end()
    toks.append(_Tok("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text, vocabulary, free_vars):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.voc = vocabulary
        self.declared_free = dict(free_vars or {})
        self.scope: list[tuple[str, str]] = []
        # sort constraints on free variables whose sort is not yet known
        self.constraints: list[tuple[str, str, int]] = []
        self.links: list[tuple[str, str, int]] = []
        self.eq_checks: list[tuple[object, object, int, str]] = []

    # -- token helpers --

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        if self.tok.text != text or self.tok.kind == "ident":
            found = self.tok.text or "end of input"
            raise FormulaSyntaxError(f"expected {text!r}, found {found!r}", self.tok.pos)
        return self.advance()

    def ident(self, what: str) -> _Tok:
        if self.tok.kind != "ident":
            found = self.tok.text or "end of input"
            raise FormulaSyntaxError(f"expected {what}, found {found!r}", self.tok.pos)
        return self.advance()

    # -- grammar --

    def parse(self) -> Formula:
        f = self.iff()
        if self.tok.kind != "eof":
            raise FormulaSyntaxError(f"unexpected {self.tok.text!r}", self.tok.pos)
        return f

    def iff(self):
        f = self.implies()
        while self.tok.kind == "op" and self.tok.text == "<->":
            self.advance()
            f = Iff(f, self.implies())
        return f

    def implies(self):
        f = self.disj()
        if self.tok.kind == "op" and self.tok.text == "->":
            self.advance()
            return Implies(f, self.implies())
        return f

    def disj(self):
        f = self.conj()
        while self.tok.kind == "op" and self.tok.text == "|":
            self.advance()
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.tok.kind == "op" and self.tok.text == "&":
            self.advance()
            f = And(f, self.unary())
        return f

    def unary(self):
        t = self.tok
        if t.kind == "op" and t.text == "!":
            self.advance()
            return Not(self.unary())
        if t.kind == "quant":
            return self.quantifier()
        if t.kind == "op" and t.text == "(":
            self.advance()
            f = self.iff()
            self.expect(")")
            return f
        if t.kind == "ident":
            return self.atom()
        found = t.text or "end of input"
        raise FormulaSyntaxError(f"expected a formula, found {found!r}", t.pos)

    def quantifier(self):
        q = _QUANTS[self.advance().text]
        v = self.ident("a variable name")
        self.expect(":")
        s = self.ident("a sort name")
        if s.text not in self.voc.sorts:
            raise UnknownSymbolError(s.text, s.pos)
        if v.text in self.voc.sorts or v.text in self.voc.relations:
            raise FormulaTypeError(v.text, "a variable name", "a sort or relation name", v.pos)
        self.expect(".")
        self.scope.append((v.text, s.text))
        try:
            body = self.iff()
        finally:
            self.scope.pop()
        return q(v.text, s.text, body)

    def atom(self):
        t = self.tok
        nxt = self.toks[self.i + 1]
        if nxt.kind == "op" and nxt.text == "(":
            return self.relapp()
        left = self.term()
        op = self.tok
        if op.kind != "op" or op.text not in ("=", "!="):
            found = op.text or "end of input"
            raise FormulaSyntaxError(f"expected '=' or '!=' after {t.text!r}, found {found!r}", op.pos)
        self.advance()
        right = self.term()
        node = Eq(left, right) if op.text == "=" else Neq(left, right)
        self.eq_checks.append((left, right, op.pos, self.text[t.pos:self.tok.pos].strip()))
        if left.sort is None and right.sort is None:
            self.links.append((left.name, right.name, op.pos))
        elif left.sort is None:
            self.constraints.append((left.name, right.sort, t.pos))
        elif right.sort is None:
            self.constraints.append((right.name, left.sort, op.pos))
        return node

    def relapp(self):
        name = self.advance()
        if name.text not in self.voc.relations:
            raise UnknownSymbolError(name.text, name.pos)
        types = self.voc.relations[name.text]
        self.expect("(")
        args = []
        positions = []
        if not (self.tok.kind == "op" and self.tok.text == ")"):
            positions.append(self.tok.pos)
            args.append(self.term())
            while self.tok.kind == "op" and self.tok.text == ",":
                self.advance()
                positions.append(self.tok.pos)
                args.append(self.term())
        self.expect(")")
        if len(args) != len(types):
            raise FormulaArityError(name.text, len(types), len(args), name.pos)
        for a, s, p in zip(args, types, positions):
            if a.sort is None:
                self.constraints.append((a.name, s, p))
            elif a.sort != s:
                raise FormulaTypeError(f"{name.text}(...{a.name}...)", s, a.sort, p)
        return RelApp(name.text, tuple(args))

    def term(self):
        t = self.ident("a variable or constant")
        for v, s in reversed(self.scope):
            if v == t.text:
                return Var(v, s)
        if t.text in self.declared_free:
            return Var(t.text, self.declared_free[t.text])
        if t.text in self.voc.constants:
            return Const(t.text, self.voc.constants[t.text])
        if t.text in self.voc.relations or t.text in self.voc.sorts:
            raise FormulaTypeError(t.text, "a variable or constant", "a relation or sort name", t.pos)
        return Var(t.text, None)

    # -- free-variable sort inference --

    def solve(self, f: Formula) -> Formula:
        sorts: dict[str, str] = {}
        where: dict[str, int] = {}
        for name, sort, pos in self.constraints:
            if name in sorts and sorts[name] != sort:
                raise FormulaTypeError(name, sorts[name], sort, pos)
            sorts.setdefault(name, sort)
            where.setdefault(name, pos)
        changed = True
        while changed:
            changed = False
            for a, b, pos in self.links:
                if a in sorts and b in sorts:
                    if sorts[a] != sorts[b]:
                        raise FormulaTypeError(f"{a} = {b}", sorts[a], sorts[b], pos)
                elif a in sorts:
                    sorts[b] = sorts[a]
                    changed = True
                elif b in sorts:
                    sorts[a] = sorts[b]
                    changed = True
        for a, b, pos in self.links:
            for n in (a, b):
                if n not in sorts:
                    raise FormulaTypeError(n, "a sort for the free variable", "nothing to infer it from", pos)
        f = _fill(f, sorts)
        for left, right, pos, snippet in self.eq_checks:
            ls = left.sort or sorts.get(left.name)
            rs = right.sort or sorts.get(right.name)
            if ls != rs:
                raise FormulaTypeError(snippet, f"both sides of sort {ls}", f"{rs} on the right", pos)
        return f


def _fill(f, sorts):
    def term(t):
        if isinstance(t, Var) and t.sort is None:
            return Var(t.name, sorts[t.name])
        return t

    if isinstance(f, RelApp):
        return RelApp(f.relation, tuple(term(t) for t in f.args))
    if isinstance(f, (Eq, Neq)):
        return type(f)(term(f.left), term(f.right))
    if isinstance(f, Not):
        return Not(_fill(f.body, sorts))
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(_fill(f.left, sorts), _fill(f.right, sorts))
    return type(f)(f.var, f.sort, _fill(f.body, sorts))


def parse(text: str, vocabulary, free_vars: Mapping[str, str] | None = None) -> Formula:
    """Parse and type-check ``text`` against ``vocabulary``.

    ``free_vars`` optionally fixes the sorts of free variables, e.g.
    ``{"f": "Outcome"}``; other free variables get inferred sorts.
    """
    if free_vars:
        for name, sort in free_vars.items():
            if sort not in vocabulary.sorts:
                raise UnknownSymbolError(sort)
    p = _Parser(text, vocabulary, free_vars)
    f = p.parse()
    return p.solve(f)
