"""Simplified ground rules and the relations between simplified programs.

A simplified rule keeps a reference to its ``hom`` (the full rule it was
derived from), the body atoms still present, the removed atoms, and a
justification for each removal: the ground atoms whose truth licensed it.
Rule sets built from such rules are compared with the simplified-subset
relation and combined with the simplified intersection.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .core import Atom, FactSet, Program, Rule, fact_rule, ground_instances
from .errors import InstanceBoundExceeded

__all__ = [
    "SimplifiedRule",
    "DeletedRule",
    "GroundProgram",
    "simplified",
    "heads_of",
    "facts_of",
    "grounded_facts_of",
    "is_simplified_subset",
    "simplified_intersection",
    "EmbedReport",
    "embeds",
    "TailorReport",
    "tailors",
    "TEReport",
    "verify_tailored_embedding",
    "verify_embedding",
]

SIMPL_DELETE_NEG_FACT = 1  # a negated body atom is certainly true
SIMPL_DELETE_UNDERIVABLE = 2  # a positive body atom can never become true
SIMPL_REMOVE_TRUE_ATOM = 3  # a positive body atom is certainly true


@dataclass(frozen=True)
class SimplifiedRule:
    """A ground rule annotated with the atoms removed from its full body.

    Invariants: ``pos_body`` and ``removed`` partition the positive body of
    ``hom``; the negative body is never touched; every removed atom carries a
    non-empty justification (it defaults to the atom itself, whose truth is
    exactly what licensed the removal).
    """

    hom: Rule
    pos_body: frozenset[Atom]
    neg_body: frozenset[Atom]
    removed: frozenset[Atom]
    justifications: Mapping[Atom, frozenset[Atom]] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.pos_body | self.removed != self.hom.pos_body or self.pos_body & self.removed:
            raise ValueError(f"body/removed do not partition the full body of {self.hom}")
        if self.neg_body != self.hom.neg_body:
            raise ValueError("negative bodies of simplified rules never change")
        if set(self.justifications) - set(self.removed):
            raise ValueError("justification for an atom that was not removed")
        missing = {a: frozenset((a,)) for a in self.removed if not self.justifications.get(a)}
        if missing:
            object.__setattr__(self, "justifications", {**self.justifications, **missing})

    @property
    def head(self) -> frozenset[Atom]:
        return self.hom.head

    @property
    def body_empty(self) -> bool:
        return not self.pos_body and not self.neg_body

    @property
    def is_fact_like(self) -> bool:
        """True when the current body is empty and the head is a single atom."""
        return self.body_empty and len(self.head) == 1

    @property
    def is_unsimplified(self) -> bool:
        return not self.removed

    def as_rule(self) -> Rule:
        """The rule as it currently reads (simplified body)."""
        return Rule(self.hom.head, self.pos_body, self.neg_body)

    def restore(self, atoms: Iterable[Atom]) -> "SimplifiedRule":
        """Move ``atoms`` back from the removed set into the body."""
        back = frozenset(atoms) & self.removed
        just = {a: j for a, j in self.justifications.items() if a not in back}
        return SimplifiedRule(self.hom, self.pos_body | back, self.neg_body, self.removed - back, just)

    def remove(self, atoms: Iterable[Atom]) -> "SimplifiedRule":
        """Move currently present body ``atoms`` into the removed set."""
        gone = frozenset(atoms) & self.pos_body
        return SimplifiedRule(self.hom, self.pos_body - gone, self.neg_body, self.removed | gone,
                              dict(self.justifications))

    def __str__(self) -> str:
        return str(self.as_rule())


def simplified(rule: Rule) -> SimplifiedRule:
    """Wrap a plain ground rule as its own unsimplified version."""
    return SimplifiedRule(rule, rule.pos_body, rule.neg_body, frozenset())


def _as_simplified(rules: Iterable[Rule | SimplifiedRule]) -> list[SimplifiedRule]:
    return [r if isinstance(r, SimplifiedRule) else simplified(r) for r in rules]


@dataclass(frozen=True)
class DeletedRule:
    """A deleted rule stored in full form together with why it was deleted."""

    hom: Rule
    simpl_type: int  # SIMPL_DELETE_NEG_FACT or SIMPL_DELETE_UNDERIVABLE
    licensed_by: frozenset[Atom]


def heads_of(rules: Iterable[Rule | SimplifiedRule]) -> set[Atom]:
    out: set[Atom] = set()
    for r in rules:
        out |= r.head
    return out


def facts_of(rules: Iterable[Rule | SimplifiedRule]) -> set[Atom]:
    """Atoms derived by a rule whose current body is empty and head is a singleton.

    A rule whose body was emptied by simplification counts as a fact, exactly
    like an input fact rule.
    """
    out: set[Atom] = set()
    for r in rules:
        if isinstance(r, SimplifiedRule):
            if r.is_fact_like:
                out |= r.head
        elif r.is_fact:
            out |= r.head
    return out


def grounded_facts_of(rules: Iterable[Rule | SimplifiedRule],
                      base: Iterable[Atom] = ()) -> set[Atom]:
    """The facts view restricted to well-founded support.

    An emptied rule certainly derives its head only when every atom removed
    from its body is itself certainly true; without this, a rule whose body
    was simplified away can end up justifying its own simplification (for
    instance ``p <- p, r`` emptied while ``p`` was an input fact keeps "deriving"
    ``p`` after the input fact is gone). The recursion is grounded in ``base``
    and in rules whose full body was empty to begin with.
    """
    certain = set(base)
    pending = [r if isinstance(r, SimplifiedRule) else simplified(r) for r in rules]
    pending = [s for s in pending if s.is_fact_like]
    changed = True
    while changed:
        changed = False
        for s in pending:
            if s.head <= certain:
                continue
            if s.removed <= certain:
                certain |= s.head
                changed = True
    return certain


class GroundProgram:
    """The live simplified rules, indexed by their full (hom) rule.

    Single writer: mutation happens through add/replace only, which keep the
    heads view, facts view and body indexes in sync.
    """

    def __init__(self, rules: Iterable[SimplifiedRule] = ()):
        self._live: dict[Rule, SimplifiedRule] = {}
        self._heads: set[Atom] = set()
        self._fact_counts: Counter[Atom] = Counter()
        self._body_index: dict[Atom, set[Rule]] = {}
        self._removed_index: dict[Atom, set[Rule]] = {}
        for s in rules:
            self.add(s)

    def __len__(self) -> int:
        return len(self._live)

    def __contains__(self, hom: Rule) -> bool:
        return hom in self._live

    def get(self, hom: Rule) -> SimplifiedRule | None:
        return self._live.get(hom)

    def simplified_rules(self) -> list[SimplifiedRule]:
        return list(self._live.values())

    def __iter__(self) -> Iterator[SimplifiedRule]:
        return iter(self._live.values())

    def hom_rules(self) -> set[Rule]:
        return set(self._live)

    def heads(self) -> set[Atom]:
        return set(self._heads)

    def derived_facts(self) -> set[Atom]:
        return {a for a, n in self._fact_counts.items() if n > 0}

    def rules_with_removed(self, a: Atom) -> set[Rule]:
        return set(self._removed_index.get(a, ()))

    def rules_with_body_atom(self, a: Atom) -> set[Rule]:
        return set(self._body_index.get(a, ()))

    def add(self, s: SimplifiedRule) -> None:
        if s.hom in self._live:
            raise ValueError(f"rule already live: {s.hom}")
        self._live[s.hom] = s
        self._index(s)

    def replace(self, s: SimplifiedRule) -> None:
        old = self._live.get(s.hom)
        if old is None:
            raise KeyError(f"rule not live: {s.hom}")
        self._unindex(old)
        self._live[s.hom] = s
        self._index(s)

    def _index(self, s: SimplifiedRule) -> None:
        self._heads |= s.head
        if s.is_fact_like:
            self._fact_counts.update(s.head)
        for a in s.pos_body:
            self._body_index.setdefault(a, set()).add(s.hom)
        for a in s.removed:
            self._removed_index.setdefault(a, set()).add(s.hom)

    def _unindex(self, s: SimplifiedRule) -> None:
        # heads never shrink: rules are only ever replaced by versions with the same head
        if s.is_fact_like:
            self._fact_counts.subtract(s.head)
        for a in s.pos_body:
            self._body_index.get(a, set()).discard(s.hom)
        for a in s.removed:
            self._removed_index.get(a, set()).discard(s.hom)

    def snapshot(self) -> frozenset[SimplifiedRule]:
        return frozenset(self._live.values())

    def validate(self) -> None:
        """Recompute every view from the live rules and compare."""
        assert self._heads == heads_of(self._live.values())
        assert self.derived_facts() == facts_of(self._live.values())
        body_index: dict[Atom, set[Rule]] = {}
        removed_index: dict[Atom, set[Rule]] = {}
        for s in self._live.values():
            for a in s.pos_body:
                body_index.setdefault(a, set()).add(s.hom)
            for a in s.removed:
                removed_index.setdefault(a, set()).add(s.hom)
        assert body_index == {a: v for a, v in self._body_index.items() if v}
        assert removed_index == {a: v for a, v in self._removed_index.items() if v}


def is_simplified_subset(smaller: Iterable[Rule | SimplifiedRule],
                         larger: Iterable[Rule | SimplifiedRule]) -> bool:
    """The simplified-subset relation: every rule of ``smaller`` has a mate in
    ``larger`` with the same hom and a superset body."""
    by_hom = {r.hom: r for r in _as_simplified(larger)}
    for s in _as_simplified(smaller):
        mate = by_hom.get(s.hom)
        if mate is None or not (s.pos_body <= mate.pos_body and s.neg_body <= mate.neg_body):
            return False
    return True


def simplified_intersection(left: Iterable[Rule | SimplifiedRule],
                            right: Iterable[Rule | SimplifiedRule]) -> set[SimplifiedRule]:
    """Rule-wise intersection: common homs keep the common body atoms and pool
    both removed sets, merging justifications."""
    by_hom = {r.hom: r for r in _as_simplified(right)}
    out: set[SimplifiedRule] = set()
    for r in _as_simplified(left):
        q = by_hom.get(r.hom)
        if q is None:
            continue
        just: dict[Atom, frozenset[Atom]] = {}
        for side in (r, q):
            for a, lic in side.justifications.items():
                just[a] = just.get(a, frozenset()) | lic
        out.add(SimplifiedRule(r.hom, r.pos_body & q.pos_body, r.neg_body,
                               r.removed | q.removed, just))
    return out


@dataclass(frozen=True)
class EmbedReport:
    by_body: bool
    by_head: bool

    @property
    def embeds(self) -> bool:
        return not self.by_body or self.by_head


def embeds(rules: Iterable[Rule | SimplifiedRule], r: Rule) -> EmbedReport:
    """Embedding test for one ground rule.

    ``by_body``: every positive body atom of ``r`` is the head of some rule.
    ``by_head``: ``r`` itself (with its full body) is a member.
    ``embeds``: not by_body, or by_head.
    """
    members = _as_simplified(rules)
    heads = heads_of(members)
    by_body = all(a in heads for a in r.pos_body)
    by_head = any(s.hom == r and s.is_unsimplified for s in members)
    return EmbedReport(by_body, by_head)


@dataclass(frozen=True)
class TailorReport:
    tailors: bool
    case: int | None


def tailors(rules: Iterable[Rule | SimplifiedRule], r: Rule) -> TailorReport:
    """Tailoring test for one ground rule; reports the lowest applicable case.

    Case 1: the set embeds ``r``. Case 2: a simplified version of ``r`` is a
    member and every removed positive atom is itself available as a fact.
    Case 3: some negated body atom of ``r`` is available as a fact. The facts
    view is the well-founded one: a self-supporting emptied rule licenses
    nothing (equivalence would not survive it).
    """
    members = _as_simplified(rules)
    if embeds(members, r).embeds:
        return TailorReport(True, 1)
    facts = grounded_facts_of(members)
    for s in members:
        if s.hom == r and all(a in facts for a in r.pos_body - s.pos_body):
            return TailorReport(True, 2)
    if any(a in facts for a in r.neg_body):
        return TailorReport(True, 3)
    return TailorReport(False, None)


@dataclass(frozen=True)
class TEReport:
    is_te: bool
    witnesses: tuple[Rule, ...]

    def __bool__(self) -> bool:
        return self.is_te


def _enumerate_theoretical(program: Program, facts: FactSet,
                           extra_constants: Iterable[str],
                           max_rules: int) -> list[Rule]:
    universe = set(program.universe) | facts.constants() | set(extra_constants)
    total = len(facts)
    for rule in program:
        total += max(1, len(universe)) ** len(rule.variables())
        if total > max_rules:
            raise InstanceBoundExceeded(f"theoretical grounding exceeds {max_rules} rules")
    out: list[Rule] = []
    seen: set[Rule] = set()
    for rule in program:
        for g in sorted(ground_instances(rule, universe), key=Rule.sort_key):
            if g not in seen:
                seen.add(g)
                out.append(g)
    for a in sorted(facts):
        g = fact_rule(a)
        if g not in seen:
            seen.add(g)
            out.append(g)
    return out


def verify_tailored_embedding(candidate: Iterable[Rule | SimplifiedRule],
                              program: Program,
                              facts: FactSet,
                              *,
                              max_rules: int = 10**6,
                              max_witnesses: int = 20) -> TEReport:
    """Check the candidate against every theoretical rule of the program plus facts.

    The candidate must already contain the fact rules it relies on; the input
    facts are unioned in for convenience. The universe is taken from the
    program, the facts and the candidate itself.
    """
    members = _as_simplified(candidate)
    member_homs = {s.hom for s in members}
    for a in facts:
        if fact_rule(a) not in member_homs:
            members.append(simplified(fact_rule(a)))
    extra: set[str] = set()
    for s in members:
        extra |= s.hom.constants()
    witnesses: list[Rule] = []
    for r in _enumerate_theoretical(program, facts, extra, max_rules):
        if not tailors(members, r).tailors:
            witnesses.append(r)
            if len(witnesses) >= max_witnesses:
                break
    return TEReport(not witnesses, tuple(witnesses))


def verify_embedding(candidate: Iterable[Rule | SimplifiedRule],
                     program: Program,
                     facts: FactSet,
                     *,
                     max_rules: int = 10**6,
                     max_witnesses: int = 20) -> TEReport:
    """Check the plain embedding property (every theoretical rule is embedded)."""
    members = _as_simplified(candidate)
    member_homs = {s.hom for s in members}
    for a in facts:
        if fact_rule(a) not in member_homs:
            members.append(simplified(fact_rule(a)))
    extra: set[str] = set()
    for s in members:
        extra |= s.hom.constants()
    witnesses: list[Rule] = []
    for r in _enumerate_theoretical(program, facts, extra, max_rules):
        if not embeds(members, r).embeds:
            witnesses.append(r)
            if len(witnesses) >= max_witnesses:
                break
    return TEReport(not witnesses, tuple(witnesses))
