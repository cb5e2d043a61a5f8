"""Exception hierarchy shared by every part of the package."""

from __future__ import annotations


class ImpugnError(Exception):
    """Base class for all errors raised by this package."""


# -- structure validation ---------------------------------------------------

class StructureIssue(ImpugnError):
    """A single violation found while validating a vocabulary or structure.

    ``name`` is the offending symbol or element and ``location`` a dotted
    path into the raw document (``"relations.Owns[3]"``).
    """

    kind = "StructureIssue"

    def __init__(self, message: str, name: str | None = None, location: str | None = None):
        self.name = name
        self.location = location
        where = f" at {location}" if location else ""
        super().__init__(f"{self.kind}: {message}{where}")
        self.message = message


class UnknownSortError(StructureIssue):
    kind = "UnknownSort"


class UnknownRelationError(StructureIssue):
    kind = "UnknownRelation"


class ArityMismatchError(StructureIssue):
    kind = "ArityMismatch"


class TypeMismatchError(StructureIssue):
    kind = "TypeMismatch"


class DuplicateElementError(StructureIssue):
    kind = "DuplicateElement"


class DuplicateNameError(StructureIssue):
    kind = "DuplicateName"


class UnvaluedConstantError(StructureIssue):
    kind = "UnvaluedConstant"


class StructureValidationError(ImpugnError):
    """Raised by :func:`impugn.structure.validate` with every issue found."""

    def __init__(self, issues: list[StructureIssue]):
        self.issues = list(issues)
        lines = "\n".join(f"  - {issue}" for issue in self.issues)
        super().__init__(f"{len(self.issues)} validation error(s):\n{lines}")


class SortTooLargeError(ImpugnError):
    def __init__(self, sort: str, size: int, limit: int):
        self.sort = sort
        self.size = size
        self.limit = limit
        shown = str(size) if size < 10**12 else f"{size:.3e}"
        super().__init__(f"sort {sort!r} has {shown} elements, above the enumeration limit {limit}")


# -- formulas ---------------------------------------------------------------

class FormulaError(ImpugnError):
    """Base for parse and type errors; ``position`` is a 0-based column."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        at = f" (column {position + 1})" if position is not None else ""
        super().__init__(message + at)


class FormulaSyntaxError(FormulaError):
    pass


class UnknownSymbolError(FormulaError):
    def __init__(self, name: str, position: int | None = None):
        self.name = name
        super().__init__(f"unknown symbol {name!r}", position)


class FormulaTypeError(FormulaError):
    def __init__(self, subformula: str, expected: str, actual: str, position: int | None = None):
        self.subformula = subformula
        self.expected = expected
        self.actual = actual
        super().__init__(f"type error in {subformula!r}: expected {expected}, got {actual}", position)


class FormulaArityError(FormulaError, ArityMismatchError):
    def __init__(self, relation: str, expected: int, actual: int, position: int | None = None):
        self.relation = relation
        self.expected = expected
        self.actual = actual
        FormulaError.__init__(
            self, f"{relation} takes {expected} argument(s), got {actual}", position
        )
        self.name = relation
        self.location = None


class UnboundVariableError(ImpugnError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"variable {name!r} has no value in the valuation")


class ExtraFreeVariablesError(ImpugnError):
    def __init__(self, names):
        self.names = sorted(names)
        super().__init__(f"formula has free variables besides the defining one: {self.names}")


# -- synthesis --------------------------------------------------------------

class BudgetExplosionError(ImpugnError):
    def __init__(self, classes: int, cap: int):
        self.classes = classes
        self.cap = cap
        super().__init__(f"synthesis stored {classes} equivalence classes, above the cap {cap}")


# -- probability ------------------------------------------------------------

class ProbabilityError(ImpugnError):
    pass


class ZeroTotalWeightError(ProbabilityError):
    pass


class ParameterOutOfRangeError(ProbabilityError):
    pass


class UnsupportedSupremumError(ProbabilityError):
    pass


class NondegenerateParametersError(ProbabilityError):
    pass


# -- scenario files ---------------------------------------------------------

class ScenarioError(ImpugnError):
    """Problem in a scenario document; ``line`` is 1-based when known."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path:
            where = f"{path}:{line}: " if line else f"{path}: "
        elif line:
            where = f"line {line}: "
        super().__init__(where + message)
