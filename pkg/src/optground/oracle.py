"""Reference semantics: theoretical grounding, instantiation and
simplification fixpoints, and brute-force answer-set enumeration.

Everything here is deliberately literal and exponential; the point is to be
obviously correct on bounded instances so the incremental engine can be
checked against it.
"""

from __future__ import annotations

from itertools import chain, combinations
from typing import Iterable

from .core import Atom, FactSet, Program, Rule, fact_rule, ground_instances
from .errors import AtomBoundExceeded, InstanceBoundExceeded
from .ground import (
    SIMPL_DELETE_NEG_FACT,
    SIMPL_DELETE_UNDERIVABLE,
    DeletedRule,
    SimplifiedRule,
    facts_of,
    heads_of,
    simplified,
)

__all__ = [
    "theoretical_grounding",
    "inst_step",
    "inst_fixpoint",
    "simplify_rule",
    "simpl",
    "simpl13",
    "simpl_fixpoint",
    "least_tailored_embedding",
    "flp_reduct",
    "answer_sets_bruteforce",
    "is_answer_set",
]

GroundRules = Iterable[Rule | SimplifiedRule]


def _current_rules(rules: GroundRules) -> list[Rule]:
    out = []
    for r in rules:
        out.append(r.as_rule() if isinstance(r, SimplifiedRule) else r)
    return out


def _guard_grounding_size(program: Program, universe: set[str], max_rules: int) -> None:
    total = 0
    for rule in program:
        total += max(1, len(universe)) ** len(rule.variables())
        if total > max_rules:
            raise InstanceBoundExceeded(
                f"grounding would exceed {max_rules} rules for universe of {len(universe)}")


def theoretical_grounding(program: Program, facts: FactSet, *, max_rules: int = 10**6) -> set[Rule]:
    """All ground instances of the program plus the facts as bodiless rules."""
    universe = set(program.universe) | facts.constants()
    _guard_grounding_size(program, universe, max_rules)
    out: set[Rule] = set(facts.as_rules())
    for rule in program:
        out |= ground_instances(rule, universe)
    return out


def inst_step(program: Program, supporting: GroundRules, *,
              universe: Iterable[str] = (), max_rules: int = 10**6) -> set[Rule]:
    """One instantiation step: the ground instances whose positive bodies are
    covered by the heads of ``supporting``."""
    support = _current_rules(supporting)
    heads = heads_of(support)
    full_universe = set(program.universe) | set(universe)
    for r in support:
        full_universe |= r.constants()
    _guard_grounding_size(program, full_universe, max_rules)
    out: set[Rule] = set()
    for rule in program:
        for g in ground_instances(rule, full_universe):
            if g.pos_body <= heads:
                out.add(g)
    return out


def inst_fixpoint(program: Program, facts: FactSet, *, max_rules: int = 10**6) -> set[Rule]:
    """Least fixpoint of the instantiation operator seeded with the facts.

    Returns the program-side instances only; callers union the facts back in
    when feeding answer-set checks.
    """
    universe = set(program.universe) | facts.constants()
    current: set[Rule] = set()
    while True:
        step = inst_step(program, current | facts.as_rules(), universe=universe, max_rules=max_rules)
        if step <= current:
            return current
        current |= step


def simplify_rule(s: SimplifiedRule, *, certain: set[Atom], possible: set[Atom] | None,
                  types: tuple[int, ...] = (1, 2, 3)):
    """Apply the simplification types to one rule against a fixed context.

    ``certain`` holds atoms taken as certainly true, ``possible`` the atoms that
    may ever become true (ignored unless type 2 is enabled). Returns
    ``("deleted", DeletedRule)`` or ``("kept", SimplifiedRule)``.
    """
    if 1 in types:
        licensed = s.hom.neg_body & certain
        if licensed:
            return "deleted", DeletedRule(s.hom, SIMPL_DELETE_NEG_FACT, frozenset(licensed))
    if 2 in types:
        assert possible is not None
        unreachable = s.hom.pos_body - possible
        if unreachable:
            return "deleted", DeletedRule(s.hom, SIMPL_DELETE_UNDERIVABLE, frozenset(unreachable))
    if 3 in types:
        movable = s.pos_body & certain
        if movable:
            return "kept", s.remove(movable)
    return "kept", s


def simpl(rules: GroundRules, context: GroundRules | None = None, *,
          types: tuple[int, ...] = (1, 2, 3)) -> set[SimplifiedRule]:
    """One simplification pass over ``rules`` against ``context`` (default: itself).

    Type 1 deletes rules with a certainly-true negated atom, type 2 deletes
    rules with an underivable positive atom, type 3 removes certainly-true
    positive atoms from bodies.
    """
    members = [r if isinstance(r, SimplifiedRule) else simplified(r) for r in rules]
    ctx = members if context is None else [
        r if isinstance(r, SimplifiedRule) else simplified(r) for r in context]
    certain = facts_of(ctx)
    possible = heads_of(ctx) if 2 in types else None
    out: set[SimplifiedRule] = set()
    for s in members:
        verdict, value = simplify_rule(s, certain=certain, possible=possible, types=types)
        if verdict == "kept":
            out.add(value)
    return out


def simpl13(rules: GroundRules, context: GroundRules | None = None) -> set[SimplifiedRule]:
    """Simplification restricted to types 1 and 3 (no underivability deletions)."""
    return simpl(rules, context, types=(1, 3))


def simpl_fixpoint(rules: GroundRules) -> set[SimplifiedRule]:
    """Iterate one-argument simplification until the rule set is stable."""
    current = {(r if isinstance(r, SimplifiedRule) else simplified(r)) for r in rules}
    while True:
        step = simpl(current)
        if step == current:
            return current
        current = step


def least_tailored_embedding(program: Program, facts: FactSet, *,
                             max_rules: int = 10**6) -> set[SimplifiedRule]:
    """The smallest equivalence-preserving simplified program: the
    simplification fixpoint of the instantiation fixpoint plus the facts."""
    base = inst_fixpoint(program, facts, max_rules=max_rules) | facts.as_rules()
    return simpl_fixpoint(base)


def _models_body(rule: Rule, interpretation: frozenset[Atom]) -> bool:
    return rule.pos_body <= interpretation and not (rule.neg_body & interpretation)


def flp_reduct(rules: GroundRules, interpretation: Iterable[Atom]) -> list[Rule | SimplifiedRule]:
    """The rules whose current bodies the interpretation satisfies."""
    atoms = frozenset(interpretation)
    out = []
    for r in rules:
        body = r.as_rule() if isinstance(r, SimplifiedRule) else r
        if _models_body(body, atoms):
            out.append(r)
    return out


def _reachable(rules: list[Rule]) -> list[Rule]:
    """Rules whose positive bodies can ever be derived; sound for answer sets
    because instantiation-unreachable rules can never fire."""
    kept: list[Rule] = []
    pending = list(rules)
    heads: set[Atom] = set()
    changed = True
    while changed:
        changed = False
        remaining = []
        for r in pending:
            if r.pos_body <= heads:
                kept.append(r)
                if not (r.head <= heads):
                    heads |= r.head
                changed = True
            else:
                remaining.append(r)
        pending = remaining
    return kept


def answer_sets_bruteforce(rules: GroundRules, *, max_atoms: int = 20,
                           prune: bool = True) -> set[frozenset[Atom]]:
    """All answer sets of a ground program, by enumerating candidates.

    Candidates range over the head atoms and must contain the facts; each one
    is accepted when it is a minimal model of its own reduct. With ``prune``
    the program is first restricted to its instantiation-reachable part, which
    keeps accumulated overgrounded programs within the atom bound.
    """
    ground = _current_rules(rules)
    if any(not r.is_ground for r in ground):
        raise ValueError("answer-set enumeration needs a ground program")
    if prune:
        ground = _reachable(ground)
    atoms = sorted(heads_of(ground))
    if len(atoms) > max_atoms:
        raise AtomBoundExceeded(f"{len(atoms)} atoms exceed the enumeration bound {max_atoms}")
    bit = {a: 1 << i for i, a in enumerate(atoms)}
    atom_set = set(atoms)

    masked = []
    facts_mask = 0
    for r in ground:
        if r.pos_body - atom_set:
            continue  # a positive atom nothing derives: the body can never hold
        head_m = sum(bit[a] for a in r.head)
        pos_m = sum(bit[a] for a in r.pos_body)
        neg_m = sum(bit[a] for a in r.neg_body if a in atom_set)
        masked.append((head_m, pos_m, neg_m))
        if r.is_fact:
            facts_mask |= head_m

    def is_model(m: int, reduct) -> bool:
        for head_m, pos_m, neg_m in reduct:
            if pos_m & ~m == 0 and neg_m & m == 0 and head_m & m == 0:
                return False
        return True

    results: set[frozenset[Atom]] = set()
    candidates = [facts_mask]
    for a in atoms:
        b = bit[a]
        if not (b & facts_mask):
            candidates += [c | b for c in candidates]
    for candidate in candidates:
        reduct = [r for r in masked if r[1] & ~candidate == 0 and r[2] & candidate == 0]
        if not is_model(candidate, reduct):
            continue
        free = candidate & ~facts_mask
        minimal = True
        sub = free
        while sub:
            sub = (sub - 1) & free
            if is_model(facts_mask | sub, reduct):
                minimal = False
                break
        if minimal:
            results.add(frozenset(a for a in atoms if bit[a] & candidate))
    return results


def is_answer_set(rules: GroundRules, interpretation: Iterable[Atom], *,
                  max_atoms: int = 22) -> bool:
    """Membership test straight from the definition: the interpretation must be
    a minimal model of its reduct. Kept independent of the enumerator above."""
    ground = _current_rules(rules)
    candidate = frozenset(interpretation)
    reduct = [r for r in ground if _models_body(r, candidate)]

    def models(m: frozenset[Atom]) -> bool:
        return all(not _models_body(r, m) or (r.head & m) for r in reduct)

    if not models(candidate):
        return False
    forced = facts_of(ground)
    if not (forced <= candidate):
        return False
    optional = sorted(candidate - forced)
    if len(optional) > max_atoms:
        raise AtomBoundExceeded(f"{len(optional)} free atoms exceed the bound {max_atoms}")
    for smaller in chain.from_iterable(combinations(optional, k) for k in range(len(optional))):
        if models(forced | frozenset(smaller)):
            return False
    return True
