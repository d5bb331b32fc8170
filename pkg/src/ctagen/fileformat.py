"""Text formats: problem files (constrained-term sets) and automaton files.

Problem file::

    structure nat
    fun f : 1            # uninterpreted
    term f(x) [ x <= 0 ]

Automaton file::

    cta
    structure nat
    fun f : 1
    state q0 label "#"
    state q3 label "@@" tilde final
    rule 0() -> q0
    rule f(q2) [ @1 <= 0 & @1.1 >= 0 ] -> q3

Interpreted symbols come from the structure.  In automaton files an
undeclared head symbol is taken to be uninterpreted with the arity it is
used at.
"""

from __future__ import annotations

import re
import shlex
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .automaton import CTA, State, TransitionRule
from .logic import TOP, Structure, get_structure, LogicError
from .patterns import ConstrainedTerm, LatticeError
from .syntax import ParseError, parse_constrained, parse_formula, parse_pattern, render_formula
from .terms import Signature, Symbol, TermError


class FormatError(ValueError):
    pass


def _strip_comment(line: str) -> str:
    # '#' is also the box wildcard, which only appears quoted or nested
    depth = 0
    quoted = False
    for i, ch in enumerate(line):
        if ch == '"':
            quoted = not quoted
        elif not quoted:
            if ch in "([":
                depth += 1
            elif ch in ")]":
                depth -= 1
            elif ch == "#" and depth <= 0:
                return line[:i].strip()
    return line.strip()


def _resolver(S: Structure, funs: Dict[str, Symbol], infer: bool = False):
    def resolve(name: str, arity: int) -> Optional[Symbol]:
        sym = S.symbol(name)
        if sym is not None:
            return sym if sym.arity == arity else None
        sym = funs.get(name)
        if sym is not None:
            return sym if sym.arity == arity else None
        if infer:
            sym = Symbol(name, arity, False)
            funs[name] = sym
            return sym
        return None

    return resolve


_FUN = re.compile(r"^fun\s+([A-Za-z0-9_']+)\s*:\s*(\d+)$")


@dataclass
class Problem:
    structure: Structure
    signature: Signature
    terms: List[ConstrainedTerm] = field(default_factory=list)


def parse_problem(text: str) -> Problem:
    S: Optional[Structure] = None
    funs: Dict[str, Symbol] = {}
    raw_terms: List[Tuple[int, str]] = []
    for n, line in enumerate(text.splitlines(), 1):
        line = _strip_comment(line)
        if not line:
            continue
        try:
            if line.startswith("structure"):
                parts = line.split()
                if len(parts) != 2 or S is not None:
                    raise FormatError("expected exactly one 'structure NAME' line")
                S = get_structure(parts[1])
            elif line.startswith("fun"):
                m = _FUN.match(line)
                if not m:
                    raise FormatError("expected 'fun NAME : ARITY'")
                name, arity = m.group(1), int(m.group(2))
                if name in funs:
                    raise FormatError(f"symbol {name} declared twice")
                funs[name] = Symbol(name, arity, False)
            elif line.startswith("term"):
                raw_terms.append((n, line[4:].strip()))
            else:
                raise FormatError(f"unknown declaration {line.split()[0]!r}")
        except (LogicError, FormatError) as e:
            raise FormatError(f"line {n}: {e}") from None
    if S is None:
        raise FormatError("missing 'structure NAME' declaration")
    for name in funs:
        if S.symbol(name) is not None:
            raise FormatError(f"{name} is an interpreted symbol of {S.name} and cannot be declared")
    resolve = _resolver(S, funs)
    terms = []
    for n, src in raw_terms:
        try:
            terms.append(ConstrainedTerm(*parse_constrained(src, resolve)))
        except (ParseError, LatticeError, TermError, LogicError) as e:
            raise FormatError(f"line {n}: {e}") from None
    sig = Signature(tuple(S.symbols) + tuple(funs.values()), S.name)
    return Problem(S, sig, terms)


# -- automata -------------------------------------------------------------------


def render_automaton(A: CTA) -> str:
    lines = ["cta", f"structure {A.structure.name}"]
    for f in A.signature.uninterpreted:
        lines.append(f"fun {f.name} : {f.arity}")
    for q in A.states:
        decl = f"state {q.name}"
        if q.label is not None:
            decl += f' label "{q.label!r}"'
        if q.tilde:
            decl += " tilde"
        if q in A.finals:
            decl += " final"
        lines.append(decl)
    for r in A.rules:
        c = "" if r.constraint == TOP else f" [ {render_formula(r.constraint)} ]"
        lines.append(f"rule {r.symbol.name}({', '.join(k.name for k in r.children)}){c} -> {r.target.name}")
    return "\n".join(lines) + "\n"


_RULE = re.compile(r"^rule\s+([A-Za-z0-9_']+)\s*\(([^)]*)\)\s*(?:\[(.*)\])?\s*->\s*(\S+)$")


def parse_automaton(text: str) -> CTA:
    S: Optional[Structure] = None
    funs: Dict[str, Symbol] = {}
    states: Dict[str, State] = {}
    finals = []
    raw_rules: List[Tuple[int, re.Match]] = []
    seen_header = False
    for n, line in enumerate(text.splitlines(), 1):
        line = _strip_comment(line)
        if not line:
            continue
        try:
            if not seen_header:
                if line != "cta":
                    raise FormatError("automaton files start with 'cta'")
                seen_header = True
            elif line.startswith("structure"):
                S = get_structure(line.split()[1])
            elif line.startswith("fun"):
                m = _FUN.match(line)
                if not m:
                    raise FormatError("expected 'fun NAME : ARITY'")
                funs[m.group(1)] = Symbol(m.group(1), int(m.group(2)), False)
            elif line.startswith("state"):
                if S is None:
                    raise FormatError("'structure' must precede states")
                words = shlex.split(line)
                name = words[1]
                label = None
                tilde = final = False
                i = 2
                while i < len(words):
                    w = words[i]
                    if w == "label":
                        label = parse_pattern(words[i + 1], _resolver(S, funs, infer=True))
                        i += 2
                        continue
                    if w == "tilde":
                        tilde = True
                    elif w == "final":
                        final = True
                    else:
                        raise FormatError(f"unknown state attribute {w!r}")
                    i += 1
                if name in states:
                    raise FormatError(f"state {name} declared twice")
                states[name] = State(name, label, tilde)
                if final:
                    finals.append(states[name])
            elif line.startswith("rule"):
                m = _RULE.match(line)
                if not m:
                    raise FormatError("expected 'rule f(q1, ..., qn) [ constraint ] -> q'")
                raw_rules.append((n, m))
            else:
                raise FormatError(f"unknown declaration {line.split()[0]!r}")
        except (ParseError, LogicError, TermError, IndexError, ValueError) as e:
            raise FormatError(f"line {n}: {e}") from None
    if S is None:
        raise FormatError("missing 'structure' declaration")
    resolve = _resolver(S, funs, infer=True)
    rules = []
    for n, m in raw_rules:
        try:
            head, kids_src, constraint, target = m.groups()
            kids = [k.strip() for k in kids_src.split(",")] if kids_src.strip() else []
            sym = resolve(head, len(kids))
            if sym is None:
                raise FormatError(f"symbol {head} used with arity {len(kids)}")
            phi = parse_formula(constraint, lambda name, a: S.symbol(name) if S.symbol(name) and S.symbol(name).arity == a else None) if constraint else TOP
            rules.append(TransitionRule(sym, tuple(states[k] for k in kids), phi, states[target]))
        except KeyError as e:
            raise FormatError(f"line {n}: unknown state {e}") from None
        except (ParseError, LogicError, ValueError) as e:
            raise FormatError(f"line {n}: {e}") from None
    sig = Signature(tuple(S.symbols) + tuple(funs.values()), S.name)
    try:
        return CTA(sig, S, tuple(states.values()), frozenset(finals), tuple(rules))
    except ValueError as e:
        raise FormatError(str(e)) from None
