"""Parsing and rendering of programs, fact sets and ground programs.

Surface syntax: statements end with ``.``, ``:-`` separates head from body,
``|`` separates head atoms, ``not`` marks default negation, ``%`` starts a
line comment. Whitespace and newlines are insignificant.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .core import Atom, FactSet, Literal, Program, Rule, Term
from .errors import NonGroundFactError, ParseError

__all__ = [
    "SourceSpan",
    "parse_program",
    "parse_fact_set",
    "render_rule",
    "render_ground_program",
]


@dataclass(frozen=True)
class SourceSpan:
    """1-based position of a token in the input text."""

    line: int
    column: int
    length: int = 1

    def __str__(self) -> str:
        return f"line {self.line}, column {self.column}"


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*)
  | (?P<if>:-)
  | (?P<var>[A-Z][A-Za-z0-9_]*)
  | (?P<ident>[a-z0-9_][A-Za-z0-9_]*)
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<comma>,)
  | (?P<pipe>\|)
  | (?P<dot>\.)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    span: SourceSpan


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", SourceSpan(line, col))
        kind = m.lastgroup or ""
        lex = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, lex, SourceSpan(line, col, len(lex))))
        newlines = lex.count("\n")
        if newlines:
            line += newlines
            col = len(lex) - lex.rfind("\n")
        else:
            col += len(lex)
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> _Token:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1].span if self.tokens else SourceSpan(1, 1)
            raise ParseError("unexpected end of input", last)
        self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            raise ParseError(f"expected {kind}, found {tok.text!r}", tok.span)
        return tok

    def atom(self) -> Atom:
        name = self.next()
        if name.kind != "ident":
            raise ParseError(f"expected a predicate name, found {name.text!r}", name.span)
        args: list[Term] = []
        tok = self.peek()
        if tok is not None and tok.kind == "lparen":
            self.next()
            while True:
                t = self.next()
                if t.kind not in ("ident", "var"):
                    raise ParseError(f"expected a term, found {t.text!r}", t.span)
                args.append(Term(t.text))
                t = self.next()
                if t.kind == "rparen":
                    break
                if t.kind != "comma":
                    raise ParseError(f"expected ',' or ')', found {t.text!r}", t.span)
        return Atom(name.text, tuple(args))

    def literal(self) -> Literal:
        tok = self.peek()
        if tok is not None and tok.kind == "ident" and tok.text == "not":
            self.next()
            return Literal(self.atom(), negated=True)
        return Literal(self.atom(), negated=False)

    def statement(self) -> tuple[Rule, SourceSpan]:
        start = self.peek()
        assert start is not None
        head: list[Atom] = []
        if start.kind != "if":
            head.append(self.atom())
            while True:
                tok = self.peek()
                if tok is not None and tok.kind == "pipe":
                    self.next()
                    head.append(self.atom())
                else:
                    break
        pos_body: list[Atom] = []
        neg_body: list[Atom] = []
        tok = self.peek()
        if tok is not None and tok.kind == "if":
            self.next()
            tok = self.peek()
            if tok is not None and tok.kind != "dot":
                while True:
                    lit = self.literal()
                    (neg_body if lit.negated else pos_body).append(lit.atom)
                    tok = self.peek()
                    if tok is not None and tok.kind == "comma":
                        self.next()
                    else:
                        break
        self.expect("dot")
        return Rule.make(head, pos_body, neg_body), start.span

    def statements(self) -> list[tuple[Rule, SourceSpan]]:
        out = []
        while self.peek() is not None:
            out.append(self.statement())
        return out


def parse_program(text: str) -> Program:
    """Parse rule statements into a Program.

    Raises ParseError on malformed input, SafetyError on unsafe rules and
    ArityError on inconsistent predicate arities.
    """
    rules = [r for r, _ in _Parser(text).statements()]
    return Program.of(rules)


def parse_fact_set(text: str) -> FactSet:
    """Parse ground facts (``p(c1,...,cn).`` statements) into a FactSet."""
    atoms: list[Atom] = []
    for rule, span in _Parser(text).statements():
        if rule.pos_body or rule.neg_body or len(rule.head) != 1:
            raise ParseError(f"not a fact: {rule}", span)
        (a,) = rule.head
        if not a.is_ground:
            raise NonGroundFactError(f"fact contains variables: {a}", span)
        atoms.append(a)
    return FactSet.of(atoms)


def render_atom(a: Atom) -> str:
    return str(a)


def render_rule(head: Iterable[Atom], pos: Iterable[Atom], neg: Iterable[Atom]) -> str:
    """Canonical one-line form of a rule; head and body atoms are sorted."""
    return str(Rule.make(head, pos, neg))


def render_ground_program(
    ground,
    *,
    bodies: str = "simplified",
    include_deleted: bool = False,
) -> str:
    """Deterministic text for a ground program.

    ``bodies="simplified"`` renders the current bodies; ``bodies="homologous"``
    restores each rule's full body, which round-trips through parse_program.
    With ``include_deleted`` the deleted rules appear as ``% deleted:`` comments.
    """
    if bodies not in ("simplified", "homologous"):
        raise ValueError(f"unknown bodies mode: {bodies!r}")
    lines = []
    for s in ground.simplified_rules() if hasattr(ground, "simplified_rules") else ground:
        if bodies == "homologous":
            rule = s.hom
        else:
            rule = Rule(s.hom.head, s.pos_body, s.neg_body)
        lines.append((rule.sort_key(), str(rule)))
    out = [text for _, text in sorted(lines)]
    if include_deleted and hasattr(ground, "deleted_rules"):
        deleted = sorted((d.hom.sort_key(), str(d.hom)) for d in ground.deleted_rules())
        out.extend(f"% deleted: {text}" for _, text in deleted)
    return "\n".join(out) + ("\n" if out else "")
