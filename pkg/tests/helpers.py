"""Shared fixtures: parsing shortcuts and the corpus of constrained-term sets."""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Tuple

from ctagen.builder import build
from ctagen.fileformat import parse_automaton, parse_problem
from ctagen.logic import S_INT, S_NAT, Structure
from ctagen.patterns import ConstrainedPattern, ConstrainedTerm
from ctagen.syntax import parse_constrained, parse_formula, parse_pattern
from ctagen.terms import Signature, Symbol

ROOT = Path(__file__).resolve().parent.parent
PROBLEMS = ROOT / "problems"


def resolver(S: Structure, funs: Dict[str, int]):
    table = {name: Symbol(name, arity) for name, arity in funs.items()}

    def resolve(name, arity):
        sym = S.symbol(name) or table.get(name)
        return sym if sym is not None and sym.arity == arity else None

    return resolve


def ct(S: Structure, text: str, **funs) -> ConstrainedTerm:
    return ConstrainedTerm(*parse_constrained(text, resolver(S, funs)))


def cp(S: Structure, text: str, **funs) -> ConstrainedPattern:
    text = text.strip()
    if text.endswith("]"):
        i = text.rindex("[")
        return ConstrainedPattern(parse_pattern(text[:i], resolver(S, funs)), parse_formula(text[i + 1 : -1], resolver(S, funs)))
    return ConstrainedPattern(parse_pattern(text, resolver(S, funs)))


def signature(S: Structure, **funs) -> Signature:
    return Signature(tuple(S.symbols) + tuple(Symbol(n, a) for n, a in funs.items()), S.name)


def problem_text(name: str) -> str:
    return (PROBLEMS / name).read_text()


def load_problem(name: str):
    return parse_problem(problem_text(name))


def load_automaton(name: str):
    return parse_automaton(problem_text(name))


# -- corpus -------------------------------------------------------------------------


@dataclass(frozen=True)
class Case:
    name: str
    structure: Structure
    signature: Signature
    terms: Tuple[ConstrainedTerm, ...]


def _random_term(rng: random.Random, S: Structure, funs: Dict[str, int], depth: int, fresh: List[str]) -> str:
    if depth <= 1 or rng.random() < 0.3:
        if rng.random() < 0.75:
            name = f"x{len(fresh)}"
            fresh.append(name)
            return name
        return "0"
    unary_g = [s.name for s in S.symbols if s.arity == 1]
    heads = [(n, a) for n, a in funs.items()] + [(n, 1) for n in unary_g]
    name, arity = rng.choice(heads)
    args = [_random_term(rng, S, funs, depth - 1, fresh) for _ in range(arity)]
    return f"{name}({', '.join(args)})"


def _random_side(rng: random.Random, S: Structure, var: str) -> str:
    unary_g = [s.name for s in S.symbols if s.arity == 1]
    t = var
    for _ in range(rng.randint(0, 2)):
        t = f"{rng.choice(unary_g)}({t})"
    return t


def _random_constraint(rng: random.Random, S: Structure, vs: List[str]) -> str:
    if not vs or rng.random() < 0.2:
        return ""
    parts = []
    for _ in range(rng.randint(1, 2)):
        lhs = _random_side(rng, S, rng.choice(vs))
        rhs = _random_side(rng, S, rng.choice(vs) if len(vs) > 1 and rng.random() < 0.4 else "0")
        atom = f"{lhs} {rng.choice(['<=', '<', '=', '!=', '>=', '>'])} {rhs}"
        if rng.random() < 0.3:
            atom = f"!({atom})"
        parts.append(atom)
    return f" [ {rng.choice([' & ', ' | ']).join(parts)} ]"


def random_case(seed: int, S: Structure, funs: Dict[str, int]) -> Case:
    rng = random.Random(seed)
    terms = []
    for _ in range(rng.randint(1, 3)):
        fresh: List[str] = []
        body = _random_term(rng, S, funs, rng.randint(1, 3), fresh)
        terms.append(ct(S, body + _random_constraint(rng, S, fresh), **funs))
    return Case(f"random-{S.name}-{seed}", S, signature(S, **funs), tuple(terms))


def _from_problem(name: str) -> Case:
    p = load_problem(name)
    return Case(name.rsplit(".", 1)[0], p.structure, p.signature, tuple(p.terms))


def corpus() -> List[Case]:
    cases = [
        Case("empty-nat", S_NAT, signature(S_NAT, f=1), ()),
        Case("empty-int", S_INT, signature(S_INT, f=1), ()),
        Case("var-nat", S_NAT, signature(S_NAT, f=1), (ct(S_NAT, "x"),)),
        Case("var-int", S_INT, signature(S_INT, f=1), (ct(S_INT, "x"),)),
        _from_problem("example1.ctp"),
        _from_problem("example2.ctp"),
        _from_problem("example6.ctp"),
        _from_problem("example6_nat.ctp"),
        Case("unary-terms-int", S_INT, signature(S_INT, f=1), (ct(S_INT, "f(s(x)) [ x <= 0 ]", f=1), ct(S_INT, "s(x) [ x >= s(0) ]"))),
    ]
    for seed in range(8):
        cases.append(random_case(seed, S_INT, {"f": 1, "h": 1}))
    for seed in range(8):
        cases.append(random_case(100 + seed, S_NAT, {"g": 2}))
    return cases


CORPUS = corpus()


@functools.lru_cache(maxsize=None)
def built(name: str):
    case = next(c for c in CORPUS if c.name == name)
    return build(case.structure, list(case.terms), case.signature)


# -- the printed Example 6 table ----------------------------------------------------------

# states as (label, tilde); rules as (symbol, children, constraint, target)
BOXQ, BLACKQ, SBOXQ, TBLACKQ = ("#", False), ("@@", False), ("s(#)", False), ("@@", True)
EXAMPLE6_TABLE = [
    ("0", (), "", BOXQ),
    ("s", (BOXQ,), "", SBOXQ),
    ("s", (BLACKQ,), "", BLACKQ),
    ("s", (SBOXQ,), "", SBOXQ),
    ("s", (TBLACKQ,), "", BLACKQ),
    ("f", (BOXQ,), "@1 <= 0", TBLACKQ),
    ("f", (BOXQ,), "!(@1 <= 0)", BLACKQ),
    ("f", (BLACKQ,), "", BLACKQ),
    ("f", (TBLACKQ,), "", BLACKQ),
    ("f", (SBOXQ,), "@1 <= 0 & @1.1 >= 0", TBLACKQ),
    ("f", (SBOXQ,), "@1 <= 0 & !(@1.1 >= 0)", TBLACKQ),
    ("f", (SBOXQ,), "!(@1 <= 0) & @1.1 >= 0", TBLACKQ),
    ("f", (SBOXQ,), "!(@1 <= 0) & !(@1.1 >= 0)", BLACKQ),
]
EXAMPLE6_DEAD = ("f", (SBOXQ,), "!(@1 <= 0) & !(@1.1 >= 0)", BLACKQ)


def state_key(q):
    return (repr(q.label), q.tilde)


def match_table(A, table):
    """For each printed rule, the built rules matching it up to renaming and equivalence."""
    from ctagen.solver import equivalent_up_to_vars
    from ctagen.logic import TOP

    R = resolver(A.structure, {})
    out = []
    for sym, kids, text, target in table:
        phi = parse_formula(text, R) if text else TOP
        hits = [
            r
            for r in A.rules
            if r.symbol.name == sym
            and tuple(state_key(c) for c in r.children) == kids
            and state_key(r.target) == target
            and equivalent_up_to_vars(A.structure, r.constraint, phi)
        ]
        out.append(hits)
    return out


# criterion number -> "criterion N: PASS|FAIL  title  (detail)"
ACCEPTANCE: Dict[int, str] = {}


def record(n: int, title: str, ok: bool, detail: str = "") -> bool:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}"
    if detail:
        line += f"  ({detail})"
    ACCEPTANCE[n] = line
    print(line)
    return ok
