"""Command-line front end for building and checking constrained tree automata.

Exit codes: 0 on success, 1 on a negative answer (REJECT, NONEMPTY, a
failed check), 2 on parse or solver errors, 3 when emptiness is UNKNOWN.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from typing import List, Optional

from .automaton import (
    CTA,
    Report,
    check_by_enumeration,
    check_complete_static,
    check_constraint_complete_static,
    check_deterministic_static,
    check_label_soundness,
    reachable_states,
)
from .builder import BuildError, build, prune_dead_rules, trim
from .fileformat import FormatError, Problem, parse_automaton, parse_problem, render_automaton
from .logic import LogicError
from .patterns import g_member
from .product import EMPTY, NONEMPTY, intersection_check, product
from .syntax import ParseError, parse_term
from .terms import TermError, enumerate_ground

ERRORS = (FormatError, ParseError, LogicError, BuildError, TermError, OSError, ValueError)


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".ctagen-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _is_automaton(text: str) -> bool:
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            return line == "cta"
    return False


def _load_any(path: str):
    text = _read(path)
    return parse_automaton(text) if _is_automaton(text) else parse_problem(text)


def _summary(A: CTA) -> str:
    return f"states: {len(A.states)}  final: {len(A.finals)}  rules: {len(A.rules)}"


def cmd_build(args) -> int:
    prob = parse_problem(_read(args.problem))
    A = build(prob.structure, prob.terms, prob.signature).cta
    if args.prune:
        A = prune_dead_rules(A)
    if not args.no_trim:
        A = trim(A)
    _write(args.output, render_automaton(A))
    print(_summary(A))
    return 0


def cmd_accept(args) -> int:
    A = parse_automaton(_read(args.automaton))
    resolve = lambda name, arity: next(
        (f for f in A.signature.funs if f.name == name and f.arity == arity), None
    )
    t = parse_term(args.term, resolve, variables=False)
    reached = sorted(reachable_states(A, t), key=lambda q: q.name)
    print("reachable: {" + ", ".join(q.name for q in reached) + "}")
    ok = any(q in A.finals for q in reached)
    print("ACCEPT" if ok else "REJECT")
    return 0 if ok else 1


def _print_reports(reports: List[Report]) -> bool:
    ok = True
    for rep in reports:
        print(rep)
        ok = ok and (rep.ok or rep.skipped is not None)
    return ok


def cmd_verify(args) -> int:
    obj = _load_any(args.path)
    oracle = None
    if isinstance(obj, Problem):
        A = build(obj.structure, obj.terms, obj.signature).cta
        terms = obj.terms
        oracle = lambda t: g_member(obj.structure, terms, t)
        print(_summary(A))
    else:
        A = obj
    reports = [check_constraint_complete_static(A)]
    reports.append(check_deterministic_static(A))
    reports.append(check_complete_static(A))
    reports.append(check_by_enumeration(A, args.depth, oracle))
    if A.labeled:
        reports.append(check_label_soundness(A, min(args.depth, 4)))
    return 0 if _print_reports(reports) else 1


def cmd_product(args) -> int:
    A = parse_automaton(_read(args.a))
    B = parse_automaton(_read(args.b))
    P = product(A, B)
    _write(args.output, render_automaton(P))
    print(_summary(P))
    return 0


def cmd_empty(args) -> int:
    pa = parse_problem(_read(args.a))
    pb = parse_problem(_read(args.b))
    if pa.structure != pb.structure:
        raise FormatError("problems use different structures")
    sig = pa.signature.union(pb.signature)
    verdict = intersection_check(pa.structure, pa.terms, pb.terms, args.depth, sig)
    print(verdict)
    if verdict.status == EMPTY:
        return 0
    return 1 if verdict.status == NONEMPTY else 3


def cmd_enum(args) -> int:
    obj = _load_any(args.path)
    if isinstance(obj, Problem):
        keep = (lambda t: g_member(obj.structure, obj.terms, t)) if args.members else None
        sig = obj.signature
    else:
        keep = (lambda t: bool(reachable_states(obj, t) & obj.finals)) if args.members else None
        sig = obj.signature
    for t in enumerate_ground(sig, args.depth):
        if keep is None or keep(t):
            print(repr(t))
    return 0


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ctagen", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build the automaton for a problem file")
    p.add_argument("problem")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--prune", action="store_true", help="delete rules that can never fire")
    p.add_argument("--no-trim", action="store_true", help="keep inaccessible states")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("accept", help="run an automaton on a ground term")
    p.add_argument("automaton")
    p.add_argument("term")
    p.set_defaults(func=cmd_accept)

    p = sub.add_parser("verify", help="run the static checks plus an enumeration check")
    p.add_argument("path", help="automaton or problem file")
    p.add_argument("--depth", type=int, default=4)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("product", help="product of two automata")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_product)

    p = sub.add_parser("empty", help="intersection emptiness of two problem files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--depth", type=int, default=4, help="witness search depth")
    p.set_defaults(func=cmd_empty)

    p = sub.add_parser("enum", help="list ground terms up to a depth")
    p.add_argument("path", help="automaton or problem file")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--members", action="store_true", help="only accepted terms / ground instances")
    p.set_defaults(func=cmd_enum)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
