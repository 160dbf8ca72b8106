"""Terms, atoms, rules and programs for function-free logic programs.

Everything here is an immutable value object: rules compare and hash
structurally (head set, positive body set, negative body set), which is what
lets the rest of the package recognise "the same rule" across simplification
states without a separate id scheme.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Mapping

from .errors import ArityError, SafetyError, SubstitutionError

__all__ = [
    "Term",
    "Atom",
    "Literal",
    "Rule",
    "Program",
    "FactSet",
    "check_safety",
    "apply_substitution",
    "ground_instances",
    "fact_rule",
]


@dataclass(frozen=True, order=True)
class Term:
    """A constant or a variable.

    The two lexical classes are disjoint: variables start with an uppercase
    letter, anything else is a constant.
    """

    name: str

    @property
    def is_variable(self) -> bool:
        return self.name[:1].isupper()

    @property
    def kind(self) -> str:
        return "variable" if self.is_variable else "constant"

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, order=True)
class Atom:
    """A predicate applied to a (possibly empty) tuple of terms."""

    predicate: str
    args: tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def is_ground(self) -> bool:
        return all(not t.is_variable for t in self.args)

    def variables(self) -> set[str]:
        return {t.name for t in self.args if t.is_variable}

    def constants(self) -> set[str]:
        return {t.name for t in self.args if not t.is_variable}

    def substitute(self, sub: Mapping[str, Term]) -> "Atom":
        return Atom(self.predicate, tuple(sub.get(t.name, t) if t.is_variable else t for t in self.args))

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({','.join(t.name for t in self.args)})"


def atom(predicate: str, *args: str) -> Atom:
    """Convenience constructor: ``atom("e", "X", "a")``."""
    return Atom(predicate, tuple(Term(a) for a in args))


@dataclass(frozen=True, order=True)
class Literal:
    """An atom or its default negation."""

    atom: Atom
    negated: bool = False

    def __str__(self) -> str:
        return f"not {self.atom}" if self.negated else str(self.atom)


@dataclass(frozen=True)
class Rule:
    """A disjunctive rule: head atoms, positive body atoms, negated body atoms.

    A rule with an empty head is a constraint; a rule with an empty body and a
    single head atom is a fact.
    """

    head: frozenset[Atom]
    pos_body: frozenset[Atom]
    neg_body: frozenset[Atom]

    @staticmethod
    def make(head: Iterable[Atom] = (), pos: Iterable[Atom] = (), neg: Iterable[Atom] = ()) -> "Rule":
        return Rule(frozenset(head), frozenset(pos), frozenset(neg))

    @property
    def is_fact(self) -> bool:
        return len(self.head) == 1 and not self.pos_body and not self.neg_body

    @property
    def is_constraint(self) -> bool:
        return not self.head

    @property
    def is_ground(self) -> bool:
        return all(a.is_ground for a in self.all_atoms())

    def all_atoms(self) -> Iterator[Atom]:
        yield from self.head
        yield from self.pos_body
        yield from self.neg_body

    def variables(self) -> set[str]:
        out: set[str] = set()
        for a in self.all_atoms():
            out |= a.variables()
        return out

    def constants(self) -> set[str]:
        out: set[str] = set()
        for a in self.all_atoms():
            out |= a.constants()
        return out

    def sort_key(self) -> tuple:
        return (tuple(sorted(a.predicate for a in self.head)), str(self))

    def __str__(self) -> str:
        head = " | ".join(str(a) for a in sorted(self.head))
        body = [str(a) for a in sorted(self.pos_body)] + [f"not {a}" for a in sorted(self.neg_body)]
        if not body:
            return f"{head}." if head else ":-."
        joined = ", ".join(body)
        return f"{head} :- {joined}." if head else f":- {joined}."


def fact_rule(a: Atom) -> Rule:
    """The bodiless rule whose single head atom is ``a``."""
    return Rule.make(head=(a,))


def check_safety(rule: Rule) -> list[str]:
    """Unsafe variables of ``rule`` (empty list means the rule is safe).

    A variable is safe iff it occurs in some positive body atom.
    """
    bound: set[str] = set()
    for a in rule.pos_body:
        bound |= a.variables()
    return sorted(rule.variables() - bound)


def apply_substitution(rule: Rule, sub: Mapping[str, str]) -> Rule:
    """Replace every variable of ``rule`` using ``sub`` (variable name to constant name).

    Raises SubstitutionError unless every variable is covered. Duplicate atoms
    produced by the substitution collapse because heads and bodies are sets.
    """
    missing = rule.variables() - set(sub)
    if missing:
        raise SubstitutionError(f"substitution misses variables {sorted(missing)} of: {rule}")
    terms = {v: Term(c) for v, c in sub.items()}
    return Rule(
        frozenset(a.substitute(terms) for a in rule.head),
        frozenset(a.substitute(terms) for a in rule.pos_body),
        frozenset(a.substitute(terms) for a in rule.neg_body),
    )


def ground_instances(rule: Rule, universe: Iterable[str]) -> set[Rule]:
    """All ground instances of ``rule``, substituting variables from ``universe``.

    Enumerates |universe| ** k substitutions for k distinct variables; the
    returned set collapses substitutions that yield identical rules.
    """
    variables = sorted(rule.variables())
    consts = sorted(set(universe))
    if not variables:
        return {rule}
    out: set[Rule] = set()
    for combo in product(consts, repeat=len(variables)):
        out.add(apply_substitution(rule, dict(zip(variables, combo))))
    return out


def _check_arities(atoms: Iterable[Atom], arities: dict[str, int], context: str) -> None:
    for a in atoms:
        seen = arities.setdefault(a.predicate, a.arity)
        if seen != a.arity:
            raise ArityError(f"predicate {a.predicate} used with arity {a.arity} and {seen} in {context}")


@dataclass(frozen=True)
class Program:
    """A set of safe rules over an explicit finite constant universe."""

    rules: tuple[Rule, ...]
    universe: frozenset[str]

    @staticmethod
    def of(rules: Iterable[Rule], extra_constants: Iterable[str] = ()) -> "Program":
        """Build a program, deduplicating rules and collecting the universe.

        Raises SafetyError for unsafe rules and ArityError for inconsistent
        predicate arities.
        """
        unique: dict[Rule, None] = {}
        for r in rules:
            unique.setdefault(r)
        ordered = tuple(unique)
        violations = [(v, str(r)) for r in ordered for v in check_safety(r)]
        if violations:
            raise SafetyError(violations)
        arities: dict[str, int] = {}
        for r in ordered:
            _check_arities(r.all_atoms(), arities, str(r))
        universe: set[str] = set(extra_constants)
        for r in ordered:
            universe |= r.constants()
        return Program(ordered, frozenset(universe))

    def predicate_arities(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.rules:
            for a in r.all_atoms():
                out.setdefault(a.predicate, a.arity)
        return out

    def __iter__(self) -> Iterator[Rule]:
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)


@dataclass(frozen=True)
class FactSet:
    """A set of ground atoms used as one shot of input."""

    atoms: frozenset[Atom]

    @staticmethod
    def of(atoms: Iterable[Atom]) -> "FactSet":
        fs = frozenset(atoms)
        bad = sorted(str(a) for a in fs if not a.is_ground)
        if bad:
            raise ValueError(f"fact set contains non-ground atoms: {bad}")
        return FactSet(fs)

    def constants(self) -> set[str]:
        out: set[str] = set()
        for a in self.atoms:
            out |= a.constants()
        return out

    def as_rules(self) -> set[Rule]:
        return {fact_rule(a) for a in self.atoms}

    def __iter__(self) -> Iterator[Atom]:
        return iter(self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)

    def __contains__(self, a: Atom) -> bool:
        return a in self.atoms
