"""optground: incremental grounding of answer set programs.

The engine maintains one monotonically growing, simplified ground program
across a sequence of input fact sets; the oracle module provides literal,
bounded reference semantics to check it against.
"""

from .core import (
    Atom,
    FactSet,
    Literal,
    Program,
    Rule,
    Term,
    apply_substitution,
    check_safety,
    fact_rule,
    ground_instances,
)
from .engine import Session, ShotOutcome, get_instances
from .ground import (
    DeletedRule,
    GroundProgram,
    SimplifiedRule,
    embeds,
    facts_of,
    grounded_facts_of,
    heads_of,
    is_simplified_subset,
    simplified,
    simplified_intersection,
    tailors,
    verify_embedding,
    verify_tailored_embedding,
)
from .oracle import (
    answer_sets_bruteforce,
    flp_reduct,
    inst_fixpoint,
    inst_step,
    is_answer_set,
    least_tailored_embedding,
    simpl,
    simpl13,
    simpl_fixpoint,
    theoretical_grounding,
)
from .textio import parse_fact_set, parse_program, render_ground_program

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "DeletedRule",
    "FactSet",
    "GroundProgram",
    "Literal",
    "Program",
    "Rule",
    "Session",
    "ShotOutcome",
    "SimplifiedRule",
    "Term",
    "answer_sets_bruteforce",
    "apply_substitution",
    "check_safety",
    "embeds",
    "fact_rule",
    "facts_of",
    "flp_reduct",
    "get_instances",
    "grounded_facts_of",
    "ground_instances",
    "heads_of",
    "inst_fixpoint",
    "inst_step",
    "is_answer_set",
    "is_simplified_subset",
    "least_tailored_embedding",
    "parse_fact_set",
    "parse_program",
    "render_ground_program",
    "simpl",
    "simpl13",
    "simpl_fixpoint",
    "simplified",
    "simplified_intersection",
    "tailors",
    "theoretical_grounding",
    "verify_embedding",
    "verify_tailored_embedding",
]
