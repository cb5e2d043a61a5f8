"""Finite multi-sorted relational structures.

A structure interprets a :class:`Vocabulary`: every sort gets a carrier,
every relation an extension, every constant an element.  Carriers come in
three flavours:

* :class:`Explicit` -- listed element identifiers, optionally with compact
  integer ranges (``p1 .. p1000000``) so that large populations need not be
  spelled out;
* :class:`ImplicitFunctions` -- all functions from an index sort to a value
  sort, e.g. the 2**41 ballot outcomes of a sequence of drawings;
* :class:`ImplicitKSubsets` -- all k-element subsets of a base sort, e.g.
  every possible jury pool.

Implicit sorts are never materialized eagerly.  They are reached through two
builtin relation schemas only: subset membership (``member``) and function
application (``apply``).

Element encodings are canonical, so equality of elements is syntactic:
explicit elements are strings, function elements are tuples of value
identifiers ordered like the index sort, subset elements are tuples of base
identifiers in base-sort order.
"""

from __future__ import annotations

import itertools
import math
import os
import re
from dataclasses import dataclass, field
from typing import Any, Iterator, Mapping, Sequence, Union

from .errors import (
    ArityMismatchError,
    DuplicateElementError,
    DuplicateNameError,
    SortTooLargeError,
    StructureIssue,
    StructureValidationError,
    TypeMismatchError,
    UnknownRelationError,
    UnknownSortError,
    UnvaluedConstantError,
)

DEFAULT_ENUM_LIMIT = 2**20
ENUM_LIMIT_ENV = "RA_ENUM_LIMIT"

_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")

Element = Union[str, tuple]


def default_enum_limit() -> int:
    raw = os.environ.get(ENUM_LIMIT_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_ENUM_LIMIT
    value = int(raw)
    if value < 1:
        raise ValueError(f"{ENUM_LIMIT_ENV} must be positive, got {raw!r}")
    return value


class InvalidCarrierError(StructureIssue):
    kind = "InvalidCarrier"


# ---------------------------------------------------------------------------
# vocabulary


@dataclass(frozen=True)
class Vocabulary:
    sorts: tuple[str, ...]
    relations: Mapping[str, tuple[str, ...]]
    constants: Mapping[str, str]

    @classmethod
    def from_data(cls, data: Mapping[str, Any]) -> "Vocabulary":
        """Build a vocabulary from its document form, reporting every issue."""
        issues: list[StructureIssue] = []
        sorts = tuple(str(s) for s in data.get("sorts", ()))
        raw_rel = data.get("relations", {}) or {}
        raw_const = data.get("constants", {}) or {}
        if isinstance(raw_rel, Mapping):
            rel_items = list(raw_rel.items())
        else:
            rel_items = [(r[0], r[1]) for r in raw_rel]
        if isinstance(raw_const, Mapping):
            const_items = list(raw_const.items())
        else:
            const_items = [(c[0], c[1]) for c in raw_const]
        relations = {str(name): tuple(str(s) for s in types) for name, types in rel_items}
        constants = {str(name): str(sort) for name, sort in const_items}

        seen: set[str] = set()
        all_names = list(sorts) + [n for n, _ in rel_items] + [n for n, _ in const_items]
        for name in all_names:
            name = str(name)
            if not _IDENT.match(name):
                issues.append(DuplicateNameError(f"{name!r} is not a valid identifier", name, "vocabulary"))
            if name in seen:
                issues.append(DuplicateNameError(f"name {name!r} declared twice", name, "vocabulary"))
            seen.add(name)
        declared = set(sorts)
        for name, types in relations.items():
            if not types:
                issues.append(ArityMismatchError(f"relation {name} needs at least one argument", name,
                                                 f"vocabulary.relations.{name}"))
            for i, s in enumerate(types):
                if s not in declared:
                    issues.append(UnknownSortError(f"relation {name} uses undeclared sort {s!r}", s,
                                                   f"vocabulary.relations.{name}[{i}]"))
        for name, s in constants.items():
            if s not in declared:
                issues.append(UnknownSortError(f"constant {name} has undeclared sort {s!r}", s,
                                               f"vocabulary.constants.{name}"))
        if issues:
            raise StructureValidationError(issues)
        return cls(sorts, relations, constants)

    def to_data(self) -> dict:
        return {
            "sorts": list(self.sorts),
            "relations": {name: list(types) for name, types in self.relations.items()},
            "constants": dict(self.constants),
        }


# ---------------------------------------------------------------------------
# carriers


@dataclass(frozen=True)
class IdRange:
    """Identifiers ``prefix + str(i)`` for ``start <= i <= stop``."""

    prefix: str
    start: int
    stop: int

    def __len__(self) -> int:
        return self.stop - self.start + 1

    def offset(self, element: str) -> int | None:
        if not isinstance(element, str) or not element.startswith(self.prefix):
            return None
        digits = element[len(self.prefix):]
        if not digits.isdigit() or (len(digits) > 1 and digits[0] == "0"):
            return None
        i = int(digits)
        if self.start <= i <= self.stop:
            return i - self.start
        return None

    def __contains__(self, element) -> bool:
        return self.offset(element) is not None

    def __getitem__(self, i: int) -> str:
        return f"{self.prefix}{self.start + i}"

    def __iter__(self) -> Iterator[str]:
        p = self.prefix
        return (f"{p}{i}" for i in range(self.start, self.stop + 1))

    def to_data(self) -> dict:
        return {"prefix": self.prefix, "from": self.start, "to": self.stop}


@dataclass(frozen=True)
class Explicit:
    segments: tuple[Union[tuple[str, ...], IdRange], ...]
    _listed: dict = field(init=False, repr=False, compare=False)
    _offsets: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        listed: dict[str, int] = {}
        offsets = []
        pos = 0
        for seg in self.segments:
            offsets.append(pos)
            if isinstance(seg, tuple):
                for j, e in enumerate(seg):
                    listed.setdefault(e, pos + j)
            pos += len(seg)
        object.__setattr__(self, "_listed", listed)
        object.__setattr__(self, "_offsets", tuple(offsets))

    @classmethod
    def of(cls, elements: Sequence[str]) -> "Explicit":
        return cls((tuple(elements),))

    @property
    def size(self) -> int:
        return sum(len(s) for s in self.segments)

    def index(self, element) -> int | None:
        if isinstance(element, str):
            hit = self._listed.get(element)
            if hit is not None:
                return hit
            for seg, off in zip(self.segments, self._offsets):
                if isinstance(seg, IdRange):
                    o = seg.offset(element)
                    if o is not None:
                        return off + o
        return None

    def __contains__(self, element) -> bool:
        return self.index(element) is not None

    def __iter__(self) -> Iterator[str]:
        return itertools.chain.from_iterable(self.segments)

    def element_at(self, i: int) -> str:
        for seg, off in zip(self.segments, self._offsets):
            if i < off + len(seg):
                return seg[i - off]
        raise IndexError(i)

    def to_data(self) -> list:
        out: list = []
        for seg in self.segments:
            if isinstance(seg, IdRange):
                out.append(seg.to_data())
            else:
                out.extend(seg)
        return out


@dataclass(frozen=True)
class ImplicitFunctions:
    index: str
    value: str

    def to_data(self) -> dict:
        return {"functions": {"index": self.index, "value": self.value}}


@dataclass(frozen=True)
class ImplicitKSubsets:
    base: str
    k: int

    def to_data(self) -> dict:
        return {"subsets": {"base": self.base, "k": self.k}}


Carrier = Union[Explicit, ImplicitFunctions, ImplicitKSubsets]


@dataclass(frozen=True)
class Builtin:
    """Builtin semantics of a relation over implicit sorts.

    ``member``: ``In(m, S)`` iff ``m`` is in the subset ``S``.
    ``apply``: ternary ``R(f, i, v)`` iff ``f(i) = v``; binary ``R(f, i)``
    iff ``f(i) = value``.
    """

    kind: str
    value: str | None = None

    def to_data(self) -> dict:
        data = {"builtin": self.kind}
        if self.value is not None:
            data["value"] = self.value
        return data


@dataclass(frozen=True)
class SortSize:
    size: int
    over_limit: bool

    def __int__(self) -> int:
        return self.size


# ---------------------------------------------------------------------------
# structure


@dataclass(frozen=True, eq=False)
class Structure:
    vocabulary: Vocabulary
    carriers: Mapping[str, Carrier]
    relations: Mapping[str, frozenset]
    builtins: Mapping[str, Builtin]
    constants: Mapping[str, Element]
    enum_limit: int = DEFAULT_ENUM_LIMIT
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __eq__(self, other):
        if not isinstance(other, Structure):
            return NotImplemented
        return (
            self.vocabulary == other.vocabulary
            and dict(self.carriers) == dict(other.carriers)
            and dict(self.relations) == dict(other.relations)
            and dict(self.builtins) == dict(other.builtins)
            and dict(self.constants) == dict(other.constants)
            and self.enum_limit == other.enum_limit
        )

    __hash__ = None

    # -- sorts --

    def _carrier(self, sort: str) -> Carrier:
        try:
            return self.carriers[sort]
        except KeyError:
            raise UnknownSortError(f"sort {sort!r} is not declared", sort) from None

    def is_implicit(self, sort: str) -> bool:
        return not isinstance(self._carrier(sort), Explicit)

    def size(self, sort: str) -> int:
        key = ("size", sort)
        if key not in self._cache:
            c = self._carrier(sort)
            if isinstance(c, Explicit):
                n = c.size
            elif isinstance(c, ImplicitFunctions):
                n = self.size(c.value) ** self.size(c.index)
            else:
                n = math.comb(self.size(c.base), c.k)
            self._cache[key] = n
        return self._cache[key]

    def enumerable(self, sort: str) -> bool:
        return self.size(sort) <= self.enum_limit

    def elements(self, sort: str) -> list:
        """All elements of ``sort`` in canonical order.

        Raises :class:`SortTooLargeError` above the enumeration limit.
        """
        key = ("elements", sort)
        if key in self._cache:
            return self._cache[key]
        n = self.size(sort)
        if n > self.enum_limit:
            raise SortTooLargeError(sort, n, self.enum_limit)
        self._cache[key] = list(self.iter_elements(sort))
        return self._cache[key]

    def iter_elements(self, sort: str) -> Iterator[Element]:
        """Lazy canonical-order iteration, without the enumeration limit."""
        c = self._carrier(sort)
        if isinstance(c, Explicit):
            return iter(c)
        if isinstance(c, ImplicitFunctions):
            values = list(self._carrier(c.value))
            return itertools.product(values, repeat=self.size(c.index))
        return itertools.combinations(list(self._carrier(c.base)), c.k)

    def index_of(self, sort: str, element) -> int | None:
        """Position of ``element`` in an explicit sort, or None."""
        c = self._carrier(sort)
        if not isinstance(c, Explicit):
            raise TypeError(f"index_of needs an explicit sort, {sort!r} is implicit")
        key = ("index", sort)
        table = self._cache.get(key)
        if table is None and c.size <= 4096:
            table = {e: i for i, e in enumerate(c)}
            self._cache[key] = table
        if table is not None:
            return table.get(element)
        return c.index(element)

    def contains(self, sort: str, element) -> bool:
        c = self._carrier(sort)
        if isinstance(c, Explicit):
            return isinstance(element, str) and element in c
        if not isinstance(element, tuple):
            return False
        if isinstance(c, ImplicitFunctions):
            values = self._carrier(c.value)
            return len(element) == self.size(c.index) and all(
                isinstance(v, str) and v in values for v in element
            )
        if len(element) != c.k:
            return False
        last = -1
        for e in element:
            i = self.index_of(c.base, e) if isinstance(e, str) else None
            if i is None or i <= last:
                return False
            last = i
        return True

    # -- relations --

    def relation_type(self, relation: str) -> tuple[str, ...]:
        try:
            return self.vocabulary.relations[relation]
        except KeyError:
            raise UnknownRelationError(f"relation {relation!r} is not declared", relation) from None

    def holds(self, relation: str, args: Sequence[Element]) -> bool:
        types = self.relation_type(relation)
        if len(args) != len(types):
            raise ArityMismatchError(
                f"{relation} takes {len(types)} argument(s), got {len(args)}", relation
            )
        for i, (a, s) in enumerate(zip(args, types)):
            if not self.contains(s, a):
                raise TypeMismatchError(f"argument {i + 1} of {relation} is not an element of {s}: {a!r}",
                                        relation)
        return self.holds_unchecked(relation, tuple(args))

    def holds_unchecked(self, relation: str, args: tuple) -> bool:
        b = self.builtins.get(relation)
        if b is None:
            return args in self.relations[relation]
        types = self.vocabulary.relations[relation]
        if b.kind == "member":
            return args[0] in args[1]
        i = self.index_of(types[1], args[1])
        target = b.value if len(args) == 2 else args[2]
        return i is not None and args[0][i] == target

    # -- misc --

    def constant(self, name: str) -> Element:
        return self.constants[name]

    def to_data(self) -> dict:
        rel: dict[str, Any] = {}
        for name in self.vocabulary.relations:
            if name in self.builtins:
                rel[name] = self.builtins[name].to_data()
            else:
                types = self.vocabulary.relations[name]
                order = [self._sort_key(s) for s in types]
                tuples = sorted(self.relations[name], key=lambda t: tuple(k(e) for k, e in zip(order, t)))
                rel[name] = [list(t) for t in tuples]
        return {
            "carriers": {s: _carrier_to_data(c) for s, c in self.carriers.items()},
            "relations": rel,
            "constants": {
                n: encode_element(self, self.vocabulary.constants[n], v) for n, v in self.constants.items()
            },
        }

    def _sort_key(self, sort):
        return lambda e: self.index_of(sort, e)


def _carrier_to_data(c: Carrier):
    return c.to_data()


# ---------------------------------------------------------------------------
# element encodings


def parse_element(structure: Structure, sort: str, raw) -> Element:
    """Decode a document-level element into its canonical encoding.

    Function elements accept a list of value identifiers, a comma-separated
    string, or a compact string when every value identifier is one
    character.  Subset elements accept a list or comma-separated string in
    any order and are returned sorted in base order.
    """
    c = structure._carrier(sort)
    if isinstance(c, Explicit):
        e = str(raw)
        if e not in c:
            raise TypeMismatchError(f"{e!r} is not an element of {sort}", e)
        return e
    if isinstance(raw, str):
        if "," in raw:
            items = [t.strip() for t in raw.split(",") if t.strip()]
        elif isinstance(c, ImplicitFunctions) and all(len(v) == 1 for v in structure._carrier(c.value)):
            items = list(raw.strip())
        else:
            items = raw.split()
    else:
        items = [str(v) for v in raw]
    if isinstance(c, ImplicitFunctions):
        element = tuple(items)
    else:
        if len(set(items)) != len(items):
            raise DuplicateElementError(f"subset element for {sort} repeats a member", str(raw))
        missing = [e for e in items if structure.index_of(c.base, e) is None]
        if missing:
            raise TypeMismatchError(f"{missing[0]!r} is not an element of {c.base}", missing[0])
        element = tuple(sorted(items, key=lambda e: structure.index_of(c.base, e)))
    if not structure.contains(sort, element):
        raise TypeMismatchError(f"{raw!r} is not an element of {sort}", str(raw))
    return element


def encode_element(structure: Structure, sort: str, element: Element):
    if isinstance(element, tuple):
        return list(element)
    return element


def format_element(element: Element) -> str:
    if isinstance(element, tuple):
        if all(len(v) == 1 for v in element):
            return "".join(element)
        return "{" + ",".join(element) + "}"
    return element


# ---------------------------------------------------------------------------
# validation


def _parse_carrier(sort: str, raw, issues: list, where: str) -> Carrier | None:
    if isinstance(raw, Mapping):
        if "functions" in raw:
            spec = raw["functions"]
            if isinstance(spec, Mapping):
                return ImplicitFunctions(str(spec.get("index")), str(spec.get("value")))
            return ImplicitFunctions(str(spec[0]), str(spec[1]))
        if "subsets" in raw:
            spec = raw["subsets"]
            if isinstance(spec, Mapping):
                base, k = spec.get("base"), spec.get("k")
            else:
                base, k = spec
            if not isinstance(k, int) or isinstance(k, bool) or k < 1:
                issues.append(InvalidCarrierError(f"subset size k must be a positive integer, got {k!r}",
                                                  sort, where))
                return None
            return ImplicitKSubsets(str(base), k)
        items = [raw]
    elif isinstance(raw, (list, tuple)):
        items = list(raw)
    else:
        issues.append(InvalidCarrierError(f"cannot read carrier of {sort}", sort, where))
        return None

    segments: list = []
    run: list[str] = []
    for item in items:
        if isinstance(item, Mapping):
            if "range" in item:
                lo, hi = item["range"]
            else:
                lo, hi = item.get("from"), item.get("to")
            prefix = str(item.get("prefix", ""))
            if not all(isinstance(v, int) and not isinstance(v, bool) for v in (lo, hi)) or lo > hi or lo < 0:
                issues.append(InvalidCarrierError(f"bad range {lo!r}..{hi!r}", sort, where))
                continue
            if run:
                segments.append(tuple(run))
                run = []
            segments.append(IdRange(prefix, lo, hi))
        else:
            run.append(str(item))
    if run:
        segments.append(tuple(run))
    carrier = Explicit(tuple(segments))
    if carrier.size == 0:
        issues.append(InvalidCarrierError(f"sort {sort} is empty", sort, where))
        return None

    # duplicates: within listed ids, listed ids against ranges, ranges against ranges
    seen: set[str] = set()
    ranges = [s for s in segments if isinstance(s, IdRange)]
    for seg in segments:
        if isinstance(seg, tuple):
            for e in seg:
                if e in seen or any(e in r for r in ranges):
                    issues.append(DuplicateElementError(f"element {e!r} appears twice in {sort}", e, where))
                seen.add(e)
    for a, b in itertools.combinations(ranges, 2):
        if a.prefix == b.prefix:
            if a.start <= b.stop and b.start <= a.stop:
                issues.append(DuplicateElementError(f"ranges {a.prefix}{a.start}.. overlap in {sort}",
                                                    a.prefix, where))
        elif a.prefix.startswith(b.prefix) or b.prefix.startswith(a.prefix):
            issues.append(DuplicateElementError(
                f"range prefixes {a.prefix!r} and {b.prefix!r} may produce equal identifiers in {sort}",
                a.prefix, where))
    return carrier


def validate(vocabulary: Vocabulary, data: Mapping[str, Any], enum_limit: int | None = None) -> Structure:
    """Build a :class:`Structure` from its document form.

    Every violation is collected; if any exist a
    :class:`StructureValidationError` carrying all of them is raised.
    """
    if enum_limit is None:
        enum_limit = default_enum_limit()
    issues: list[StructureIssue] = []
    raw_carriers = data.get("carriers", data.get("sorts", {})) or {}
    carriers: dict[str, Carrier] = {}
    for sort, raw in raw_carriers.items():
        where = f"structure.carriers.{sort}"
        if sort not in vocabulary.sorts:
            issues.append(UnknownSortError(f"carrier given for undeclared sort {sort!r}", sort, where))
            continue
        c = _parse_carrier(sort, raw, issues, where)
        if c is not None:
            carriers[sort] = c
    for sort in vocabulary.sorts:
        if sort not in raw_carriers:
            issues.append(UnknownSortError(f"sort {sort!r} has no carrier", sort, "structure.carriers"))

    for sort, c in list(carriers.items()):
        where = f"structure.carriers.{sort}"
        refs = (c.index, c.value) if isinstance(c, ImplicitFunctions) else (
            (c.base,) if isinstance(c, ImplicitKSubsets) else ())
        for ref in refs:
            if ref not in vocabulary.sorts:
                issues.append(UnknownSortError(f"carrier of {sort} references undeclared sort {ref!r}",
                                               ref, where))
                carriers.pop(sort, None)
            elif ref in carriers and not isinstance(carriers[ref], Explicit):
                issues.append(InvalidCarrierError(f"carrier of {sort} must reference an explicit sort, "
                                                  f"{ref!r} is implicit", ref, where))
                carriers.pop(sort, None)
        if isinstance(c, ImplicitKSubsets) and isinstance(carriers.get(c.base), Explicit):
            if c.k > carriers[c.base].size:
                issues.append(InvalidCarrierError(f"k={c.k} exceeds |{c.base}|", sort, where))
                carriers.pop(sort, None)

    structure = Structure(vocabulary, carriers, {}, {}, {}, enum_limit)
    complete = set(carriers) == set(vocabulary.sorts)

    relations: dict[str, frozenset] = {}
    builtins: dict[str, Builtin] = {}
    raw_rel = data.get("relations", {}) or {}
    for name in raw_rel:
        if name not in vocabulary.relations:
            issues.append(UnknownRelationError(f"extension given for undeclared relation {name!r}", name,
                                               f"structure.relations.{name}"))
    for name, types in vocabulary.relations.items():
        where = f"structure.relations.{name}"
        raw = raw_rel.get(name, [])
        known = all(s in carriers for s in types)
        if isinstance(raw, Mapping) and "builtin" in raw:
            b = Builtin(str(raw["builtin"]), None if raw.get("value") is None else str(raw["value"]))
            if known:
                _check_builtin(structure, name, types, b, issues, where)
            builtins[name] = b
            continue
        if known and any(not isinstance(carriers[s], Explicit) for s in types):
            issues.append(TypeMismatchError(
                f"relation {name} mentions an implicit sort; declare it as a builtin", name, where))
            continue
        tuples = set()
        for i, row in enumerate(raw):
            loc = f"{where}[{i}]"
            row = [row] if isinstance(row, (str, int)) else list(row)
            if len(row) != len(types):
                issues.append(ArityMismatchError(f"{name} takes {len(types)} argument(s), got {len(row)}",
                                                 name, loc))
                continue
            row = tuple(str(e) for e in row)
            ok = True
            for j, (e, s) in enumerate(zip(row, types)):
                if s in carriers and e not in carriers[s]:
                    issues.append(TypeMismatchError(f"{e!r} (argument {j + 1}) is not an element of {s}",
                                                    e, loc))
                    ok = False
            if ok:
                tuples.add(row)
        relations[name] = frozenset(tuples)

    structure = Structure(vocabulary, carriers, relations, builtins, {}, enum_limit)
    constants: dict[str, Element] = {}
    raw_const = data.get("constants", {}) or {}
    for name in raw_const:
        if name not in vocabulary.constants:
            issues.append(UnknownRelationError(f"value given for undeclared constant {name!r}", name,
                                               f"structure.constants.{name}"))
    for name, sort in vocabulary.constants.items():
        where = f"structure.constants.{name}"
        if name not in raw_const:
            issues.append(UnvaluedConstantError(f"constant {name} has no value", name, where))
            continue
        if sort not in carriers:
            continue
        try:
            constants[name] = parse_element(structure, sort, raw_const[name])
        except StructureIssue as exc:
            issues.append(TypeMismatchError(f"constant {name} must denote an element of {sort}: "
                                            f"{exc.message}", name, where))
    if issues or not complete:
        raise StructureValidationError(issues)
    return Structure(vocabulary, carriers, relations, builtins, constants, enum_limit)


def _check_builtin(structure, name, types, b: Builtin, issues, where):
    carriers = structure.carriers
    if b.kind == "member":
        if len(types) != 2:
            issues.append(ArityMismatchError(f"member builtin {name} must be binary", name, where))
            return
        elem_sort, set_sort = types
        c = carriers[set_sort]
        if not isinstance(c, ImplicitKSubsets) or not isinstance(carriers[elem_sort], Explicit):
            issues.append(TypeMismatchError(
                f"member builtin {name} needs type (explicit sort, subset sort)", name, where))
            return
        base = carriers[c.base]
        elems = carriers[elem_sort]
        if elems.size <= structure.enum_limit:
            stray = next((e for e in elems if e not in base), None)
            if stray is not None:
                issues.append(TypeMismatchError(
                    f"element {stray!r} of {elem_sort} is not in {c.base}, the base of {set_sort}", stray, where))
        return
    if b.kind != "apply":
        issues.append(TypeMismatchError(f"unknown builtin kind {b.kind!r}", name, where))
        return
    if len(types) not in (2, 3):
        issues.append(ArityMismatchError(f"apply builtin {name} must have 2 or 3 arguments", name, where))
        return
    c = carriers[types[0]]
    if not isinstance(c, ImplicitFunctions) or types[1] != c.index:
        issues.append(TypeMismatchError(
            f"apply builtin {name} needs type (function sort, its index sort[, its value sort])", name, where))
        return
    if len(types) == 3:
        if types[2] != c.value:
            issues.append(TypeMismatchError(f"third argument of {name} must be {c.value}", name, where))
        if b.value is not None:
            issues.append(TypeMismatchError(f"ternary builtin {name} takes no fixed value", name, where))
    elif b.value is None or b.value not in carriers[c.value]:
        issues.append(TypeMismatchError(
            f"binary apply builtin {name} needs a 'value' from {c.value}", name, where))


def sort_size(structure: Structure, sort: str) -> SortSize:
    n = structure.size(sort)
    return SortSize(n, n > structure.enum_limit)


def holds(structure: Structure, relation: str, args: Sequence[Element]) -> bool:
    return structure.holds(relation, args)


# ---------------------------------------------------------------------------
# anonymous-element reduction


@dataclass(frozen=True)
class AnonymousClass:
    """Elements of one sort that occur in no relation tuple and name no constant.

    Any permutation of them is an automorphism, and with at most ``k``
    variables a formula cannot tell apart ``k`` such elements from more.
    """

    sort: str
    count: int
    representatives: tuple[str, ...]
    named: frozenset


def mentioned_elements(structure: Structure, sort: str) -> set:
    out = set()
    for name, types in structure.vocabulary.relations.items():
        if name in structure.builtins:
            if sort in types:
                return None  # reached through a builtin: elements are not interchangeable
            continue
        for j, s in enumerate(types):
            if s == sort:
                out.update(t[j] for t in structure.relations[name])
    for name, s in structure.vocabulary.constants.items():
        if s == sort:
            out.add(structure.constants[name])
    return out


def reducible_sorts(structure: Structure) -> list[str]:
    referenced = set()
    for c in structure.carriers.values():
        if isinstance(c, ImplicitFunctions):
            referenced.update((c.index, c.value))
        elif isinstance(c, ImplicitKSubsets):
            referenced.add(c.base)
    out = []
    for sort, c in structure.carriers.items():
        if isinstance(c, Explicit) and sort not in referenced and mentioned_elements(structure, sort) is not None:
            out.append(sort)
    return out


def reduce_anonymous(structure: Structure, keep: int, sorts: Sequence[str] | None = None):
    """Shrink every reducible sort to its named elements plus ``keep`` anonymous ones.

    Returns ``(reduced_structure, classes)`` where ``classes`` maps each
    shrunk sort to its :class:`AnonymousClass`.  Formulas with at most
    ``keep`` distinct variable names have the same truth value on named
    elements, and a representative stands for every anonymous element.
    """
    if keep < 1:
        raise ValueError("keep must be at least 1")
    reducible = reducible_sorts(structure)
    targets = reducible if sorts is None else [s for s in sorts if s in reducible]
    carriers = dict(structure.carriers)
    classes: dict[str, AnonymousClass] = {}
    for sort in targets:
        c = structure.carriers[sort]
        named = mentioned_elements(structure, sort)
        count = c.size - len(named)
        if count <= keep:
            continue
        reps = []
        for e in c:
            if e not in named:
                reps.append(e)
                if len(reps) == keep:
                    break
        kept = sorted(list(named) + reps, key=c.index)
        carriers[sort] = Explicit.of(kept)
        classes[sort] = AnonymousClass(sort, count, tuple(reps), frozenset(named))
    reduced = Structure(structure.vocabulary, carriers, structure.relations, structure.builtins,
                        structure.constants, structure.enum_limit)
    return reduced, classes
