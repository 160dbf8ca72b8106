"""Incremental maintenance of an overgrounded program across fact-set shots.

A session keeps one growing ground program. Each shot alternates two steps
until nothing changes: a desimplification step that undoes simplifications
whose licensing atoms are no longer certainly true (restoring deleted rules
and removed body atoms, with cascading), and a delta-instantiation step that
grounds new rule instances reachable through newly available atoms. New rules
are simplified on the fly (deletion types excluded) and once more, with all
simplification types, when the shot is finalized.

Restored rules rejoin the program in full form and are never re-simplified;
only rules generated in the current shot pass through the final
simplification. Together with the fact that live rules are never dropped,
this keeps the maintained program monotonically growing under the
simplified-subset order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .core import Atom, FactSet, Program, Rule, apply_substitution, check_safety
from .errors import ArityError, InstanceBoundExceeded, SafetyError
from .ground import (
    SIMPL_DELETE_NEG_FACT,
    DeletedRule,
    GroundProgram,
    SimplifiedRule,
    facts_of,
    grounded_facts_of,
    heads_of,
    simplified,
)
from .oracle import least_tailored_embedding, simplify_rule

__all__ = ["Session", "ShotOutcome", "get_instances", "MODES"]

MODES = ("tailored", "plain", "scratch")


@dataclass(frozen=True)
class ShotOutcome:
    """What one shot did to the session, plus a frozen program snapshot."""

    shot_index: int
    rules_added: int
    rules_restored: int
    rules_deleted: int
    atoms_removed_type3: int
    atoms_restored_type3: int
    live_rule_count: int
    deleted_rule_count: int
    snapshot: frozenset[SimplifiedRule]
    restored: tuple[Rule, ...]
    added: tuple[Rule, ...]
    of_atoms: frozenset[Atom]
    nf_atoms: frozenset[Atom]


@dataclass
class _ShotWork:
    """Per-shot working sets: new facts, outdated atoms, new rules."""

    f_atoms: set[Atom]
    nf: set[Atom]
    of: set[Atom]
    certain_inputs: set[Atom]
    nr: dict[Rule, SimplifiedRule] = field(default_factory=dict)
    nr_heads: set[Atom] = field(default_factory=set)
    nr_facts: set[Atom] = field(default_factory=set)
    restored: list[Rule] = field(default_factory=list)
    generated: list[Rule] = field(default_factory=list)
    rules_deleted: int = 0
    atoms_removed: int = 0
    atoms_restored: int = 0

    def put(self, s: SimplifiedRule, *, restored: bool) -> None:
        self.nr[s.hom] = s
        self.nr_heads |= s.head
        if s.is_fact_like:
            self.nr_facts |= s.head
        (self.restored if restored else self.generated).append(s.hom)


def get_instances(rule: Rule, available: set[Atom], delta: set[Atom],
                  exclude: Iterable[Rule] = frozenset()) -> list[Rule]:
    """Semi-naive matching: ground instances of ``rule`` whose positive body is
    covered by ``available`` and touches at least one ``delta`` atom, skipping
    instances whose full rule is in ``exclude``.

    Rules without a positive body never touch a delta and are never returned.
    """
    if not rule.pos_body:
        return []
    excluded = exclude if isinstance(exclude, (set, frozenset)) else set(exclude)
    by_pred: dict[tuple[str, int], list[Atom]] = {}
    for a in available:
        by_pred.setdefault((a.predicate, a.arity), []).append(a)
    for candidates in by_pred.values():
        candidates.sort()
    body = sorted(rule.pos_body)
    results: dict[Rule, None] = {}

    def unify(pattern: Atom, ground_atom: Atom, sub: dict[str, str]) -> dict[str, str] | None:
        out = sub
        for t, g in zip(pattern.args, ground_atom.args):
            if t.is_variable:
                bound = out.get(t.name)
                if bound is None:
                    if out is sub:
                        out = dict(sub)
                    out[t.name] = g.name
                elif bound != g.name:
                    return None
            elif t.name != g.name:
                return None
        return out

    def extend(i: int, sub: dict[str, str]) -> None:
        if i == len(body):
            g = apply_substitution(rule, sub)
            if g not in excluded and g not in results and g.pos_body & delta:
                results[g] = None
            return
        pattern = body[i]
        for cand in by_pred.get((pattern.predicate, pattern.arity), ()):
            nxt = unify(pattern, cand, sub)
            if nxt is not None:
                extend(i + 1, nxt)

    extend(0, {})
    return sorted(results, key=Rule.sort_key)


class Session:
    """One multi-shot grounding session over a fixed program.

    Modes: ``tailored`` maintains the simplified overgrounded program,
    ``plain`` maintains the same program without any simplification, and
    ``scratch`` regrounds from scratch on every shot. A session is
    single-threaded during a shot; snapshots are immutable values.
    """

    def __init__(self, program: Program, mode: str = "tailored", *,
                 simplify_against: str = "current-f", max_rules: int = 1_000_000):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}, expected one of {MODES}")
        if simplify_against not in ("current-f", "pf"):
            raise ValueError(f"unknown simplify-against value {simplify_against!r}")
        violations = [(v, str(r)) for r in program for v in check_safety(r)]
        if violations:
            raise SafetyError(violations)
        self.program = program
        self.mode = mode
        self.simplify_against = simplify_against
        self.max_rules = max_rules
        self.dg = GroundProgram()
        self.deleted: dict[Rule, DeletedRule] = {}
        self.af: set[Atom] = set()
        self.pf: set[Atom] = set()
        self.shot_index = 0
        self.universe: set[str] = set(program.universe)
        self._arities = program.predicate_arities()
        self._seeded_bodiless = False

    # -- convenience views -------------------------------------------------

    def simplified_rules(self) -> list[SimplifiedRule]:
        return self.dg.simplified_rules()

    def deleted_rules(self) -> list[DeletedRule]:
        return sorted(self.deleted.values(), key=lambda d: d.hom.sort_key())

    def snapshot(self) -> frozenset[SimplifiedRule]:
        return self.dg.snapshot()

    # -- shots --------------------------------------------------------------

    def run_shot(self, facts: FactSet) -> ShotOutcome:
        self._absorb_vocabulary(facts)
        if self.mode == "scratch":
            return self._run_scratch(facts)
        return self._run_incremental(facts, tailor=self.mode == "tailored")

    def _absorb_vocabulary(self, facts: FactSet) -> None:
        for a in facts:
            seen = self._arities.setdefault(a.predicate, a.arity)
            if seen != a.arity:
                raise ArityError(
                    f"fact {a} uses predicate {a.predicate} with arity {a.arity}, program uses {seen}")
        self.universe |= facts.constants()

    def _bookkeep(self, f_atoms: set[Atom]) -> set[Atom]:
        nf = f_atoms - self.af
        self.af |= f_atoms
        self.pf = set(f_atoms) if self.shot_index == 0 else self.pf & f_atoms
        self.shot_index += 1
        return nf

    def _run_scratch(self, facts: FactSet) -> ShotOutcome:
        f_atoms = set(facts.atoms)
        nf = self._bookkeep(f_atoms)
        fresh = least_tailored_embedding(self.program, facts, max_rules=self.max_rules)
        fact_homs = facts.as_rules()
        self.dg = GroundProgram(
            sorted((s for s in fresh if s.hom not in fact_homs), key=lambda s: s.hom.sort_key()))
        self.deleted = {}
        return ShotOutcome(
            shot_index=self.shot_index,
            rules_added=len(self.dg),
            rules_restored=0,
            rules_deleted=0,
            atoms_removed_type3=sum(len(s.removed) for s in self.dg),
            atoms_restored_type3=0,
            live_rule_count=len(self.dg),
            deleted_rule_count=0,
            snapshot=self.dg.snapshot(),
            restored=(),
            added=tuple(s.hom for s in self.dg),
            of_atoms=frozenset(),
            nf_atoms=frozenset(nf),
        )

    def _run_incremental(self, facts: FactSet, *, tailor: bool) -> ShotOutcome:
        f_atoms = set(facts.atoms)
        nf = self._bookkeep(f_atoms)
        if tailor:
            certain_inputs = set(self.pf) if self.simplify_against == "pf" else set(f_atoms)
            of = self._outdated_atoms(f_atoms)
        else:
            certain_inputs = set()
            of = set()
        work = _ShotWork(f_atoms=f_atoms, nf=nf, of=of, certain_inputs=certain_inputs)

        while True:
            # nothing outdated and nothing new means neither step can fire, so a
            # converged program makes later shots near-free
            desimplified = (self._desimpl_step(work)
                            if tailor and (work.of or work.nf or work.nr) else False)
            may_generate = (work.nf or work.nr
                            or (self.shot_index == 1 and not self._seeded_bodiless))
            instantiated = self._delta_inst_step(work, tailor) if may_generate else False
            if not (desimplified or instantiated):
                break

        survivors = self._finalize_shot(work, tailor)
        restored_set = set(work.restored)
        for hom, s in work.nr.items():
            if hom in restored_set:
                self.dg.add(s)
            elif hom in survivors:
                self.dg.add(survivors[hom])
        if __debug__:
            self.dg.validate()
            assert not (self.dg.hom_rules() & set(self.deleted))

        return ShotOutcome(
            shot_index=self.shot_index,
            rules_added=len(survivors),
            rules_restored=len(work.restored),
            rules_deleted=work.rules_deleted,
            atoms_removed_type3=work.atoms_removed,
            atoms_restored_type3=work.atoms_restored,
            live_rule_count=len(self.dg),
            deleted_rule_count=len(self.deleted),
            snapshot=self.dg.snapshot(),
            restored=tuple(work.restored),
            added=tuple(h for h in work.generated if h in survivors),
            of_atoms=frozenset(work.of),
            nf_atoms=frozenset(nf),
        )

    # -- desimplification ----------------------------------------------------

    def _outdated_atoms(self, f_atoms: set[Atom]) -> set[Atom]:
        """Licensing atoms that are no longer certainly true under the new facts.

        Certainty must be well-founded: an emptied rule does not vouch for the
        very atoms its own simplification depends on, or a stale simplification
        could keep justifying itself forever.
        """
        certain_now = grounded_facts_of(self.dg, base=f_atoms)
        seeds: set[Atom] = set()
        for s in self.dg:
            for licensed in s.justifications.values():
                seeds |= licensed - certain_now
        for d in self.deleted.values():
            if d.simpl_type == SIMPL_DELETE_NEG_FACT:
                seeds |= d.licensed_by - certain_now
        return seeds

    def _desimpl_step(self, work: _ShotWork) -> bool:
        """Restore deleted rules whose deletion no longer holds and move no
        longer certainly true atoms back into live bodies, cascading through
        derived facts that stop being facts."""
        changed_any = False
        while True:
            changed = False
            possible = self.dg.heads() | work.nr_heads | work.nf | self.af
            for hom in sorted(self.deleted, key=Rule.sort_key):
                entry = self.deleted[hom]
                if entry.simpl_type == SIMPL_DELETE_NEG_FACT:
                    fire = bool(entry.licensed_by & work.of)
                else:
                    fire = entry.licensed_by <= possible
                if fire:
                    del self.deleted[hom]
                    work.put(simplified(hom), restored=True)
                    possible |= hom.head
                    changed = True
            for a in sorted(work.of):
                for hom in sorted(self.dg.rules_with_removed(a), key=Rule.sort_key):
                    s = self.dg.get(hom)
                    back = s.removed & work.of
                    if not back:
                        continue
                    if s.is_fact_like:
                        work.of |= s.head
                    self.dg.replace(s.restore(back))
                    work.atoms_restored += len(back)
                    changed = True
            if not changed:
                return changed_any
            changed_any = True

    # -- delta instantiation --------------------------------------------------

    def _capacity_check(self, work: _ShotWork) -> None:
        total = len(self.dg) + len(self.deleted) + len(work.nr)
        if total >= self.max_rules:
            raise InstanceBoundExceeded(
                f"live plus deleted rules would exceed the cap of {self.max_rules}")

    def _admit(self, g: Rule, work: _ShotWork, tailor: bool) -> bool:
        """Route one fresh ground instance through on-the-fly simplification.
        Returns True when the rule joined the new-rule set."""
        self._capacity_check(work)
        if not tailor:
            work.put(simplified(g), restored=False)
            return True
        certain = work.nr_facts | work.certain_inputs
        verdict, value = simplify_rule(simplified(g), certain=certain, possible=None, types=(1, 3))
        if verdict == "deleted":
            self.deleted[g] = value
            work.rules_deleted += 1
            return False
        work.atoms_removed += len(value.removed)
        work.put(value, restored=False)
        return True

    def _delta_inst_step(self, work: _ShotWork, tailor: bool) -> bool:
        added_any = False
        if self.shot_index == 1 and not self._seeded_bodiless:
            # rules without a positive body are ground (safety) and can never
            # touch a delta, so they enter once, on the first shot
            self._seeded_bodiless = True
            for rule in self.program:
                if not rule.pos_body and rule not in work.nr:
                    if self._admit(rule, work, tailor):
                        added_any = True
        while True:
            additions = 0
            available = self.dg.heads() | work.nr_heads | work.nf | self.af
            delta = work.nr_heads | work.nf
            exclude = self.dg.hom_rules() | set(self.deleted) | set(work.nr)
            for rule in self.program:
                for g in get_instances(rule, available, delta, exclude):
                    exclude.add(g)
                    if self._admit(g, work, tailor):
                        additions += 1
            if additions == 0:
                return added_any
            added_any = True

    # -- final simplification ---------------------------------------------------

    def _finalize_shot(self, work: _ShotWork, tailor: bool) -> dict[Rule, SimplifiedRule]:
        """Run the full simplification fixpoint over the rules generated this
        shot, recomputing the context as deletions shrink it. Restored rules
        stay as they are."""
        survivors = {hom: work.nr[hom] for hom in work.generated if hom in work.nr}
        if not tailor:
            return survivors
        restored_rules = [work.nr[hom] for hom in work.restored]
        while True:
            context = self.dg.simplified_rules() + restored_rules + list(survivors.values())
            certain = facts_of(context) | work.certain_inputs
            possible = heads_of(context) | self.af
            changed = False
            for hom in sorted(survivors, key=Rule.sort_key):
                s = survivors[hom]
                verdict, value = simplify_rule(s, certain=certain, possible=possible)
                if verdict == "deleted":
                    del survivors[hom]
                    self.deleted[hom] = value
                    work.rules_deleted += 1
                    changed = True
                elif value != s:
                    work.atoms_removed += len(value.removed - s.removed)
                    survivors[hom] = value
                    changed = True
            if not changed:
                return survivors
