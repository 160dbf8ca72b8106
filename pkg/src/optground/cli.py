"""Command-line driver: load a program, replay fact-set shots, emit ground
programs, answer sets and per-shot statistics."""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .core import Atom, FactSet, Program, Rule, fact_rule
from .engine import MODES, Session
from .errors import (
    ArityError,
    AtomBoundExceeded,
    InstanceBoundExceeded,
    OptgroundError,
    ParseError,
    SafetyError,
)
from .ground import GroundProgram, SimplifiedRule
from .oracle import answer_sets_bruteforce
from .textio import parse_fact_set, parse_program, render_ground_program

__all__ = ["ShotReport", "run_session", "run_shots", "filter_relevant", "emit_stats", "main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SAFETY = 2
EXIT_BOUND = 3

STREAM_SHOT_TERMINATOR = "#endshot"


@dataclass(frozen=True)
class ShotReport:
    """Per-shot statistics; field names are the stable wire format."""

    shot_index: int
    rules_added: int
    rules_restored: int
    rules_deleted: int
    atoms_removed_type3: int
    live_rule_count: int
    deleted_rule_count: int
    grounding_time_ms: float
    solving_time_ms: float | None = None
    answer_set_count: int | None = None


def filter_relevant(ground: GroundProgram | Iterable[SimplifiedRule],
                    facts: FactSet) -> set[SimplifiedRule]:
    """Restrict a maintained program to the rules reachable from the facts:
    the least set whose members have every current positive body atom among
    the facts or the heads of other members. Dropped rules have underivable
    bodies under these facts, so answer sets are unchanged."""
    rules = list(ground.simplified_rules() if isinstance(ground, GroundProgram) else ground)
    atoms = set(facts.atoms)
    kept: dict[Rule, SimplifiedRule] = {}
    changed = True
    while changed:
        changed = False
        for s in rules:
            if s.hom not in kept and s.pos_body <= atoms:
                kept[s.hom] = s
                atoms |= s.head
                changed = True
    return set(kept.values())


def emit_stats(reports: Sequence[ShotReport], format: str = "jsonl") -> str:
    """Render reports as line-delimited JSON records or one JSON document."""
    if format == "jsonl":
        return "".join(json.dumps(asdict(r), sort_keys=True) + "\n" for r in reports)
    if format == "json":
        return json.dumps([asdict(r) for r in reports], indent=2, sort_keys=True) + "\n"
    raise ValueError(f"unknown stats format {format!r}")


def _solve(session: Session, facts: FactSet, *, filtered: bool,
           max_atoms: int) -> set[frozenset[Atom]]:
    if filtered:
        rules: Iterable[SimplifiedRule | Rule] = filter_relevant(session.dg, facts)
    else:
        rules = session.simplified_rules()
    program = list(rules) + [fact_rule(a) for a in facts]
    return answer_sets_bruteforce(program, max_atoms=max_atoms)


def run_session(program: Program,
                fact_sets: Iterable[FactSet],
                mode: str = "tailored",
                *,
                solve: bool = False,
                apply_filter: bool = False,
                emit_ground_dir: str | Path | None = None,
                max_rules: int = 1_000_000,
                max_solve_atoms: int = 20,
                simplify_against: str = "current-f",
                on_answer_sets=None) -> list[ShotReport]:
    """Drive one session over in-memory fact sets and collect shot reports."""
    session = Session(program, mode, simplify_against=simplify_against, max_rules=max_rules)
    reports: list[ShotReport] = []
    out_dir = Path(emit_ground_dir) if emit_ground_dir is not None else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
    for facts in fact_sets:
        started = time.perf_counter()
        outcome = session.run_shot(facts)
        grounding_ms = (time.perf_counter() - started) * 1000.0

        solving_ms = None
        answer_sets = None
        if solve:
            started = time.perf_counter()
            answer_sets = _solve(session, facts, filtered=apply_filter, max_atoms=max_solve_atoms)
            solving_ms = (time.perf_counter() - started) * 1000.0
            if on_answer_sets is not None:
                on_answer_sets(outcome.shot_index, answer_sets)

        if out_dir is not None:
            source = filter_relevant(session.dg, facts) if apply_filter else session
            text = render_ground_program(
                sorted(source, key=lambda s: s.hom.sort_key()) if apply_filter else source,
                include_deleted=not apply_filter)
            (out_dir / f"shot_{outcome.shot_index:03d}.lp").write_text(text, encoding="utf-8")

        reports.append(ShotReport(
            shot_index=outcome.shot_index,
            rules_added=outcome.rules_added,
            rules_restored=outcome.rules_restored,
            rules_deleted=outcome.rules_deleted,
            atoms_removed_type3=outcome.atoms_removed_type3,
            live_rule_count=outcome.live_rule_count,
            deleted_rule_count=outcome.deleted_rule_count,
            grounding_time_ms=grounding_ms,
            solving_time_ms=solving_ms,
            answer_set_count=None if answer_sets is None else len(answer_sets),
        ))
    return reports


def run_shots(program_path: str | Path,
              shot_paths: Sequence[str | Path],
              mode: str = "tailored",
              **options) -> list[ShotReport]:
    """File-based variant of run_session: one fact file per shot, in order."""
    program = parse_program(Path(program_path).read_text(encoding="utf-8"))
    fact_sets = [parse_fact_set(Path(p).read_text(encoding="utf-8")) for p in shot_paths]
    return run_session(program, fact_sets, mode, **options)


def read_stdin_shots(stream) -> Iterator[FactSet]:
    """Frame protocol on a text stream: one fact set per frame, each frame
    terminated by a line holding only ``#endshot``."""
    buffer: list[str] = []
    for line in stream:
        if line.strip() == STREAM_SHOT_TERMINATOR:
            yield parse_fact_set("".join(buffer))
            buffer = []
        else:
            buffer.append(line)
    if any(line.strip() for line in buffer):
        yield parse_fact_set("".join(buffer))


def _format_answer_set(atoms: frozenset[Atom]) -> str:
    return " ".join(str(a) for a in sorted(atoms))


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="optground",
        description="Incrementally ground a logic program against a sequence of fact-set shots.")
    parser.add_argument("--program", required=True, help="program file")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--shots", nargs="+", metavar="FACTS",
                        help="fact files, one shot each, in order")
    source.add_argument("--stdin", action="store_true",
                        help=f"read shots from stdin, each ended by a '{STREAM_SHOT_TERMINATOR}' line")
    parser.add_argument("--mode", choices=MODES, default="tailored")
    parser.add_argument("--solve", action="store_true",
                        help="enumerate answer sets per shot with the bounded oracle")
    parser.add_argument("--emit-ground", metavar="DIR",
                        help="write the ground program after each shot into DIR")
    parser.add_argument("--filter", action="store_true",
                        help="restrict emission and solving to rules relevant to the current facts")
    parser.add_argument("--stats", metavar="PATH", help="write per-shot statistics to PATH")
    parser.add_argument("--stats-format", choices=("jsonl", "json"), default="jsonl")
    parser.add_argument("--max-rules", type=int, default=1_000_000,
                        help="abort when live plus deleted rules exceed this cap")
    parser.add_argument("--max-solve-atoms", type=int, default=20,
                        help="atom cap for answer-set enumeration")
    parser.add_argument("--simplify-against", choices=("current-f", "pf"), default="current-f",
                        help="license simplifications by the current facts or only persistent ones")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_arg_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK

    def print_answer_sets(shot_index: int, answer_sets) -> None:
        print(f"% shot {shot_index}")
        for i, model in enumerate(sorted(answer_sets, key=_format_answer_set), start=1):
            print(f"ANSWER {i}: {_format_answer_set(model)}")
        if not answer_sets:
            print("UNSATISFIABLE")

    shot_index_hint = 0
    try:
        program = parse_program(Path(args.program).read_text(encoding="utf-8"))
        if args.stdin:
            fact_sets: Iterable[FactSet] = read_stdin_shots(sys.stdin)
        else:
            fact_sets = [parse_fact_set(Path(p).read_text(encoding="utf-8")) for p in args.shots]

        def counted(sets: Iterable[FactSet]) -> Iterator[FactSet]:
            nonlocal shot_index_hint
            for fs in sets:
                shot_index_hint += 1
                yield fs

        reports = run_session(
            program,
            counted(fact_sets),
            args.mode,
            solve=args.solve,
            apply_filter=args.filter,
            emit_ground_dir=args.emit_ground,
            max_rules=args.max_rules,
            max_solve_atoms=args.max_solve_atoms,
            simplify_against=args.simplify_against,
            on_answer_sets=print_answer_sets if args.solve else None,
        )
    except (ParseError, ArityError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SafetyError as exc:
        print(f"safety error: {exc}", file=sys.stderr)
        return EXIT_SAFETY
    except (InstanceBoundExceeded, AtomBoundExceeded) as exc:
        print(f"resource bound exceeded at shot {shot_index_hint}: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except OptgroundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.stats:
        Path(args.stats).write_text(emit_stats(reports, args.stats_format), encoding="utf-8")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
