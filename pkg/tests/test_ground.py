"""Simplified-rule model, subset/intersection operators, embedding and tailoring."""

from __future__ import annotations

import random

import pytest

from optground import (
    FactSet,
    embeds,
    facts_of,
    heads_of,
    is_simplified_subset,
    simplified,
    simplified_intersection,
    tailors,
    verify_embedding,
    verify_tailored_embedding,
)
from optground.core import atom, fact_rule
from optground.ground import GroundProgram, SimplifiedRule
from optground.oracle import simpl

import generators
from conftest import G1, R1, R2, R3, R1P, R2P, TG1, TG3, rule, srule


def with_facts(rules, facts: FactSet):
    return list(rules) + [simplified(fact_rule(a)) for a in facts]


def test_simplified_rule_partition_invariants():
    with pytest.raises(ValueError):
        SimplifiedRule(R1, R1.pos_body, R1.neg_body, frozenset({atom("e", "a", "b")}))
    with pytest.raises(ValueError):
        SimplifiedRule(R1, R1.pos_body, frozenset(), frozenset())
    s = srule(R1, [atom("e", "a", "b")])
    assert s.justifications[atom("e", "a", "b")] == frozenset({atom("e", "a", "b")})
    assert s.head == R1.head


def test_heads_views(f1):
    assert heads_of(G1) == {atom("r", "a", "b"), atom("r", "c", "b"),
                            atom("s", "c", "b"), atom("r", "c", "a")}
    assert heads_of(TG1) == {atom("r", "a", "b"), atom("r", "c", "b"), atom("s", "c", "b")}
    assert heads_of([]) == set()


def test_derived_facts_views():
    assert facts_of(TG1) == set()
    assert facts_of([rule([atom("a")])]) == {atom("a")}
    emptied = srule(rule([atom("p", "a")], [atom("e", "a", "b")]), [atom("e", "a", "b")])
    assert facts_of([emptied]) == {atom("p", "a")}
    constraint = simplified(rule([], [atom("q", "a")]))
    assert facts_of([constraint]) == set()


def test_derived_facts_matches_oracle_simpl():
    base = rule([atom("p", "a")], [atom("e", "a", "b")])
    context = [simplified(base), simplified(fact_rule(atom("e", "a", "b")))]
    (s,) = [x for x in simpl([base], context) if x.hom == base]
    assert s.is_fact_like and facts_of([s]) == {atom("p", "a")}


def test_simplified_subset_examples():
    assert is_simplified_subset(TG1, TG3)
    assert is_simplified_subset([], TG3)
    assert not is_simplified_subset(TG3, TG1)


def test_simplified_subset_antisymmetry_on_bodies():
    a = [R1P]
    b = [simplified(R1)]
    assert is_simplified_subset(a, b)
    assert not is_simplified_subset(b, a)


def test_mutual_simplified_subsets_have_identical_bodies():
    rng = random.Random(47)
    for _ in range(40):
        _, _, ground = generators.tiny_ground_instance(rng)
        a = generators.partial_simplification(rng, ground)
        b = generators.partial_simplification(rng, ground)
        if is_simplified_subset(a, b) and is_simplified_subset(b, a):
            assert ({(s.hom, s.pos_body, s.neg_body) for s in a}
                    == {(s.hom, s.pos_body, s.neg_body) for s in b})


def test_simplified_intersection_example():
    t0 = [simplified(R1), R2P]
    result = simplified_intersection(t0, TG1)
    assert result == {R1P, R2P}


def test_simplified_intersection_algebra():
    rng = random.Random(3)
    for _ in range(30):
        _, _, ground = generators.tiny_ground_instance(rng)
        a = generators.partial_simplification(rng, ground)
        b = generators.partial_simplification(rng, ground)
        c = generators.partial_simplification(rng, ground)
        assert simplified_intersection(a, a) == set(map(_strip, a))
        assert simplified_intersection(a, b) == simplified_intersection(b, a)
        ab_c = simplified_intersection(simplified_intersection(a, b), c)
        a_bc = simplified_intersection(a, simplified_intersection(b, c))
        assert ab_c == a_bc
    assert simplified_intersection(TG1, []) == set()


def _strip(s: SimplifiedRule) -> SimplifiedRule:
    return SimplifiedRule(s.hom, s.pos_body, s.neg_body, s.removed)


def test_embeds_examples(f1):
    g1f1 = with_facts([simplified(r) for r in G1], f1)
    rep = embeds(g1f1, R3)
    assert rep.by_body and rep.by_head and rep.embeds

    tg1f1 = with_facts(TG1, f1)
    rep = embeds(tg1f1, R3)
    assert rep.by_body and not rep.by_head and not rep.embeds

    rep = embeds([], R1)
    assert not rep.by_body and rep.embeds


def test_embeds_by_head_requires_unsimplified_member():
    rep = embeds([R1P], R1)
    assert not rep.by_head


def test_tailors_examples(f1):
    t = with_facts(TG3, f1)
    rep = tailors(t, R2)
    assert rep.tailors and rep.case == 2
    rep = tailors(t, R1)
    assert rep.tailors and rep.case == 1
    rep = tailors([], R1)
    assert rep.tailors and rep.case == 1


def test_tailors_case3():
    r = rule([atom("p", "a")], neg=[atom("b")])
    rep = tailors([simplified(fact_rule(atom("b"))), simplified(fact_rule(atom("p", "a")))], r)
    # p(a) is derivable, so the rule is not vacuously embedded; the fact b licenses case 3
    # (its head feeds nothing: r has no positive body, hence by-body holds trivially)
    assert rep.tailors and rep.case == 3


def test_verify_tailored_embedding_examples(p0, f1, f2):
    assert verify_tailored_embedding(with_facts(TG3, f1), p0, f1).is_te
    assert verify_tailored_embedding(with_facts([simplified(r) for r in G1], f1), p0, f1).is_te
    rep = verify_tailored_embedding(with_facts(TG1, f2), p0, f2)
    assert not rep.is_te
    assert R3 in rep.witnesses


def test_fact_rules_can_only_be_tailored_by_membership():
    # an input fact is embedded by body vacuously, so it must be a member itself
    rep = tailors(list(TG3), fact_rule(atom("ab", "c")))
    assert not rep.tailors
    rep = tailors(list(TG3) + [simplified(fact_rule(atom("ab", "c")))], fact_rule(atom("ab", "c")))
    assert rep.tailors and rep.case == 1


def test_embedding_implies_tailored_on_random_instances():
    rng = random.Random(11)
    checked = 0
    for _ in range(60):
        program, facts, ground = generators.tiny_ground_instance(rng)
        members = [simplified(r) for r in ground if rng.random() < 0.7]
        if verify_embedding(members, program, facts).is_te:
            assert verify_tailored_embedding(members, program, facts).is_te
            checked += 1
    assert checked >= 10


def test_intersection_of_tailored_embeddings_is_tailored():
    rng = random.Random(13)
    checked = 0
    for _ in range(80):
        program, facts, ground = generators.tiny_ground_instance(rng)
        e1 = generators.partial_simplification(rng, ground)
        e2 = generators.partial_simplification(rng, ground)
        if not verify_tailored_embedding(e1, program, facts).is_te:
            continue
        if not verify_tailored_embedding(e2, program, facts).is_te:
            continue
        meet = simplified_intersection(e1, e2)
        assert verify_tailored_embedding(meet, program, facts).is_te
        checked += 1
    assert checked >= 10


def test_ground_program_views_stay_consistent():
    g = GroundProgram()
    g.add(R1P)
    g.add(R2P)
    g.validate()
    assert g.heads() == heads_of(TG1)
    assert g.derived_facts() == set()
    assert g.rules_with_removed(atom("e", "c", "a")) == {R2}
    assert g.rules_with_body_atom(atom("r", "a", "b")) == {R2}
    g.replace(g.get(R1).restore([atom("e", "a", "b")]))
    g.validate()
    assert g.get(R1).removed == frozenset()
    assert g.rules_with_body_atom(atom("e", "a", "b")) == {R1}


def test_ground_program_tracks_fact_view_through_mutation():
    base = rule([atom("p", "a")], [atom("e", "a", "b")])
    g = GroundProgram([srule(base, [atom("e", "a", "b")])])
    assert g.derived_facts() == {atom("p", "a")}
    g.replace(g.get(base).restore([atom("e", "a", "b")]))
    assert g.derived_facts() == set()
    g.validate()
