"""Reference semantics: grounding, fixpoints, simplification, answer sets."""

from __future__ import annotations

import random

import pytest

from optground import (
    FactSet,
    Program,
    answer_sets_bruteforce,
    fact_rule,
    flp_reduct,
    inst_fixpoint,
    inst_step,
    is_answer_set,
    is_simplified_subset,
    least_tailored_embedding,
    simpl,
    simpl13,
    simpl_fixpoint,
    simplified,
    theoretical_grounding,
    verify_tailored_embedding,
)
from optground.core import atom
from optground.errors import AtomBoundExceeded, InstanceBoundExceeded

import generators
from conftest import G1, R1, R2, R3, R5, R1P, R2P, R5P, rule, srule


def test_theoretical_grounding_counts(p0, f1):
    ground = theoretical_grounding(p0, f1)
    plain = [r for r in ground if len(r.head) == 1 and not r.is_fact]
    disjunctive = [r for r in ground if len(r.head) == 2]
    facts = [r for r in ground if r.is_fact]
    assert (len(plain), len(disjunctive), len(facts)) == (9, 27, 3)


def test_theoretical_grounding_trivial_and_larger_universe(p0, f2):
    empty = Program.of([])
    got = theoretical_grounding(empty, FactSet.of([atom("a")]))
    assert got == {fact_rule(atom("a"))}
    # four constants: 16 + 64 instances (|U| ** k per rule)
    ground = theoretical_grounding(p0, FactSet.of([atom("e", "a", "b"), atom("e", "c", "d")]))
    assert len([r for r in ground if not r.is_fact]) == 16 + 64


def test_theoretical_grounding_bound(p0, f1):
    with pytest.raises(InstanceBoundExceeded):
        theoretical_grounding(p0, f1, max_rules=10)


def test_inst_step_examples(p0, f1):
    step = inst_step(p0, f1.as_rules())
    assert step == {R1, R3}
    assert inst_step(p0, set()) == set()
    assert inst_step(Program.of([]), f1.as_rules()) == set()


def test_inst_step_empty_support_keeps_bodiless_rules():
    p = Program.of([rule([atom("p", "a")]), rule([atom("q", "X")], [atom("e", "X")])])
    assert inst_step(p, set()) == {rule([atom("p", "a")])}


def test_inst_fixpoint_examples(p0, f1, f2):
    assert inst_fixpoint(p0, f1) == {R1, R2, R3}
    # all positive bodies over fresh predicates: nothing derivable
    p = Program.of([rule([atom("p", "X")], [atom("q", "X")])], extra_constants=("a",))
    assert inst_fixpoint(p, FactSet.of([])) == set()
    # second shot vocabulary: the chain through r(a,d)
    got = inst_fixpoint(p0, f2)
    r4 = rule([atom("r", "c", "d"), atom("s", "c", "d")],
              [atom("e", "c", "a"), atom("r", "a", "d")])
    r3 = R3
    assert got == {r3, R5, r4}
    for r in got:
        assert r.pos_body <= {a for g in got for a in g.head} | f2.atoms


def test_simpl_examples(f1):
    context = [simplified(r) for r in G1] + [simplified(fact_rule(a)) for a in f1]
    assert simpl([R3], context) == set()
    (got,) = simpl([R1], context)
    assert got == R1P
    # underivable positive body atom deletes the rule
    p_rule = rule([atom("p", "x")], [atom("q", "x")])
    assert simpl([p_rule], [simplified(fact_rule(atom("z")))]) == set()


def test_simpl13_examples(f1, f2):
    ctx2 = [simplified(fact_rule(a)) for a in f2]
    (got,) = simpl13([R5], ctx2)
    assert got == R5P
    ctx1 = [simplified(fact_rule(a)) for a in f1]
    assert simpl13([R3], ctx1) == set()
    p_rule = rule([atom("p", "x")], [atom("q", "x")])
    assert simpl13([p_rule], [simplified(fact_rule(atom("z")))]) == {simplified(p_rule)}


def test_simpl_fixpoint_golden(f1):
    base = set(G1) | f1.as_rules()
    got = simpl_fixpoint(base)
    expected = {R1P, R2P} | {simplified(fact_rule(a)) for a in f1}
    assert got == expected
    assert simpl_fixpoint(set()) == set()


def test_simpl_fixpoint_two_step_cascade():
    a, b, c = atom("a"), atom("b"), atom("c")
    rules = {fact_rule(a), rule([b], [a]), rule([c], [b], [a])}
    got = simpl_fixpoint(rules)
    assert got == {simplified(fact_rule(a)), srule(rule([b], [a]), [a])}


def test_simpl_chain_is_descending():
    rng = random.Random(5)
    for _ in range(25):
        _, facts, ground = generators.tiny_ground_instance(rng)
        current = {simplified(r) for r in ground}
        for _ in range(6):
            step = simpl(current)
            assert is_simplified_subset(step, current)
            if step == current:
                break
            current = step


def test_least_tailored_embedding_golden(p0, f1):
    got = least_tailored_embedding(p0, f1)
    expected = {R1P, R2P} | {simplified(fact_rule(a)) for a in f1}
    assert got == expected


def test_least_tailored_embedding_trivial():
    facts = FactSet.of([atom("p", "a")])
    got = least_tailored_embedding(Program.of([]), facts)
    assert got == {simplified(fact_rule(atom("p", "a")))}


def test_flp_reduct_examples(f1):
    a, b = atom("a"), atom("b")
    assert flp_reduct([rule([a], neg=[b])], {a}) == [rule([a], neg=[b])]
    assert flp_reduct([rule([a], [b])], {a}) == []
    interp = set(f1.atoms) | {atom("r", "a", "b"), atom("r", "c", "b")}
    got = set(flp_reduct(list(G1) + sorted(f1.as_rules(), key=lambda r: r.sort_key()), interp))
    assert R1 in got and R2 in got and R3 not in got
    assert f1.as_rules() <= got


def test_answer_sets_golden(p0, f1):
    models = answer_sets_bruteforce(set(G1) | f1.as_rules())
    base = frozenset(f1.atoms)
    expected = {
        base | {atom("r", "a", "b"), atom("r", "c", "b")},
        base | {atom("r", "a", "b"), atom("s", "c", "b")},
    }
    assert models == expected


def test_answer_sets_trivial_cases():
    a = atom("a")
    assert answer_sets_bruteforce([fact_rule(a)]) == {frozenset({a})}
    assert answer_sets_bruteforce([rule([], [])]) == set()
    assert answer_sets_bruteforce([]) == {frozenset()}


def test_answer_sets_respects_bound():
    rules = [fact_rule(atom(f"p{i}")) for i in range(25)]
    with pytest.raises(AtomBoundExceeded):
        answer_sets_bruteforce(rules, max_atoms=20)


def test_is_answer_set_examples(f1):
    a = atom("a")
    assert not is_answer_set([rule([a], neg=[a])], set())
    assert is_answer_set([fact_rule(a)], {a})
    interp = set(f1.atoms) | {atom("r", "a", "b"), atom("r", "c", "b"), atom("s", "c", "b")}
    assert not is_answer_set(set(G1) | f1.as_rules(), interp)


def test_is_answer_set_agrees_with_enumerator():
    rng = random.Random(17)
    for _ in range(40):
        _, facts, ground = generators.tiny_ground_instance(rng)
        program = set(ground)
        models = answer_sets_bruteforce(program, prune=False)
        atoms = sorted({a for r in ground for a in r.head} | set(facts.atoms))
        # every enumerated model passes the direct test; a few non-models fail it
        for m in models:
            assert is_answer_set(program, m)
        for _ in range(5):
            candidate = frozenset(a for a in atoms if rng.random() < 0.5)
            assert is_answer_set(program, candidate) == (candidate in models)


def test_prop_a_b_facts_and_heads_bound_answer_sets():
    rng = random.Random(23)
    for _ in range(30):
        _, _, ground = generators.tiny_ground_instance(rng)
        program = set(ground)
        heads = {a for r in program for a in r.head}
        facts = {a for r in program if r.is_fact for a in r.head}
        for m in answer_sets_bruteforce(program, prune=False):
            assert facts <= m <= heads


def test_theorem1_fixpoint_equivalence_without_pruning():
    rng = random.Random(29)
    for _ in range(40):
        program, facts, _ = generators.tiny_ground_instance(rng)
        theory = theoretical_grounding(program, facts)
        fix = inst_fixpoint(program, facts) | facts.as_rules()
        assert (answer_sets_bruteforce(theory, prune=False)
                == answer_sets_bruteforce(fix, prune=False))


def test_pruning_preserves_answer_sets():
    rng = random.Random(31)
    for _ in range(40):
        program, facts, _ = generators.tiny_ground_instance(rng)
        theory = theoretical_grounding(program, facts)
        assert (answer_sets_bruteforce(theory, prune=False)
                == answer_sets_bruteforce(theory, prune=True))


def test_least_tailored_embedding_verifies():
    rng = random.Random(37)
    for _ in range(25):
        program, facts, _ = generators.tiny_ground_instance(rng)
        lte = least_tailored_embedding(program, facts)
        assert verify_tailored_embedding(lte, program, facts).is_te
