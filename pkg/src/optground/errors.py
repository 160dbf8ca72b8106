"""Exception types shared across the package."""

from __future__ import annotations


class OptgroundError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(OptgroundError):
    """Malformed program or fact-set text; carries the offending source span."""

    def __init__(self, message: str, span=None):
        super().__init__(message if span is None else f"{message} (at {span})")
        self.span = span


class NonGroundFactError(ParseError):
    """A fact file contained a variable."""


class SafetyError(OptgroundError):
    """One or more rules have variables not bound by the positive body."""

    def __init__(self, violations):
        self.violations = list(violations)
        detail = "; ".join(f"variable {v} unsafe in: {r}" for v, r in self.violations)
        super().__init__(f"unsafe rule(s): {detail}")


class ArityError(OptgroundError):
    """The same predicate name was used with two different arities."""


class SubstitutionError(OptgroundError):
    """A substitution does not cover every variable of the rule."""


class InstanceBoundExceeded(OptgroundError):
    """A grounding operation would produce more ground rules than allowed."""


class AtomBoundExceeded(OptgroundError):
    """Answer-set enumeration was asked for on a program with too many atoms."""
