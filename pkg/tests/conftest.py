"""Shared fixtures: the running example program and its golden shot results."""

from __future__ import annotations

import pytest

from optground import FactSet, Rule, SimplifiedRule, parse_fact_set, parse_program
from optground.core import atom

P0_TEXT = """\
r(X,Y) :- e(X,Y), not ab(X).
r(X,Z) | s(X,Z) :- e(X,Y), r(Y,Z).
"""

F1_TEXT = "e(c,a). e(a,b). ab(c)."
F2_TEXT = "e(c,a). e(a,d)."
F4_TEXT = "e(a,d). e(c,a). e(a,b)."


@pytest.fixture(scope="session")
def p0():
    return parse_program(P0_TEXT)


@pytest.fixture(scope="session")
def f1() -> FactSet:
    return parse_fact_set(F1_TEXT)


@pytest.fixture(scope="session")
def f2() -> FactSet:
    return parse_fact_set(F2_TEXT)


@pytest.fixture(scope="session")
def f3() -> FactSet:
    return parse_fact_set(F1_TEXT)


@pytest.fixture(scope="session")
def f4() -> FactSet:
    return parse_fact_set(F4_TEXT)


def rule(head, pos=(), neg=()) -> Rule:
    return Rule.make(head, pos, neg)


def srule(hom: Rule, removed=()) -> SimplifiedRule:
    """Simplified version of ``hom`` with the given positive atoms removed."""
    gone = frozenset(removed)
    return SimplifiedRule(hom, hom.pos_body - gone, hom.neg_body, gone)


# ground rules of the running example
R1 = rule([atom("r", "a", "b")], [atom("e", "a", "b")], [atom("ab", "a")])
R2 = rule([atom("r", "c", "b"), atom("s", "c", "b")], [atom("e", "c", "a"), atom("r", "a", "b")])
R3 = rule([atom("r", "c", "a")], [atom("e", "c", "a")], [atom("ab", "c")])
R4 = rule([atom("r", "c", "d"), atom("s", "c", "d")], [atom("e", "c", "a"), atom("r", "a", "d")])
R5 = rule([atom("r", "a", "d")], [atom("e", "a", "d")], [atom("ab", "a")])

R1P = srule(R1, [atom("e", "a", "b")])
R2P = srule(R2, [atom("e", "c", "a")])
R4P = srule(R4, [atom("e", "c", "a")])
R5P = srule(R5, [atom("e", "a", "d")])

TG1 = frozenset({R1P, R2P})
TG2 = frozenset({srule(R1), R2P, srule(R3), R4P, R5P})
TG3 = frozenset({srule(R1), R2P, srule(R3), R4P, srule(R5)})
G1 = frozenset({R1, R2, R3})
