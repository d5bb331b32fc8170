"""Constrained terms, constrained patterns and the lattice built on them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .logic import TOP, Formula, Not, Structure, conj, eval_closed, free_vars, positional_free_vars, substitute
from .solver import entails, equivalent_up_to_vars, sat
from .terms import (
    BLACK,
    BOX,
    App,
    Term,
    Var,
    Wild,
    apply,
    has_position,
    is_interpreted_ground,
    is_linear,
    match_linear,
    positions,
    subterm,
    var_positions,
)


class LatticeError(ValueError):
    pass


# -- patterns -----------------------------------------------------------------


def is_pattern(u: Term) -> bool:
    if isinstance(u, Wild):
        return True
    if isinstance(u, App):
        return all(is_pattern(a) for a in u.args)
    return False


def in_tbox(u: Term) -> bool:
    """u is an interpretable pattern: only G symbols and boxes."""
    if isinstance(u, Wild):
        return u.interpretable
    if isinstance(u, App):
        return u.symbol.interpreted and all(in_tbox(a) for a in u.args)
    return False


def pattern_leq(u: Term, v: Term) -> bool:
    """u is more general than (or equal to) v."""
    if isinstance(u, Wild):
        return in_tbox(v) if u.interpretable else not in_tbox(v)
    if isinstance(u, App) and isinstance(v, App) and u.symbol == v.symbol:
        return all(pattern_leq(a, b) for a, b in zip(u.args, v.args))
    return False


def meet(u: Term, v: Term) -> Optional[Term]:
    """The partial meet; None when u and v have no common refinement."""
    if isinstance(u, Wild) and pattern_leq(u, v):
        return v
    if isinstance(v, Wild) and pattern_leq(v, u):
        return u
    if isinstance(u, App) and isinstance(v, App) and u.symbol == v.symbol:
        args = []
        for a, b in zip(u.args, v.args):
            m = meet(a, b)
            if m is None:
                return None
            args.append(m)
        return App(u.symbol, args)
    return None


def pattern_size(u: Term) -> int:
    return len(positions(u))


# -- constrained terms and patterns -------------------------------------------


@dataclass(frozen=True)
class ConstrainedTerm:
    term: Term
    constraint: Formula = TOP

    def __post_init__(self):
        if not is_linear(self.term):
            raise LatticeError(f"{self.term!r} is not linear")
        if any(isinstance(u, Wild) for u in map(lambda p: subterm(self.term, p), positions(self.term))):
            raise LatticeError("constrained terms may not contain wildcards")
        fv = free_vars(self.constraint)
        if any(v.positional for v in fv):
            raise LatticeError("constrained terms use named variables only")
        tv = set(var_positions(self.term))
        if not fv <= tv:
            raise LatticeError(f"constraint variables {sorted(map(repr, fv - tv))} do not occur in {self.term!r}")

    def __repr__(self):
        from .syntax import render_formula

        return f"{self.term!r} [{render_formula(self.constraint)}]"


def check_constrained_pattern(u: Term, phi: Formula) -> None:
    for pos in positional_free_vars(phi):
        if not has_position(u, pos) or not in_tbox(subterm(u, pos)):
            raise LatticeError(f"constraint position @{'.'.join(map(str, pos))} is not interpretable in {u!r}")


@dataclass(frozen=True)
class ConstrainedPattern:
    pattern: Term
    constraint: Formula = TOP

    def __post_init__(self):
        if not is_pattern(self.pattern):
            raise LatticeError(f"{self.pattern!r} is not a ground pattern")
        if any(not v.positional for v in free_vars(self.constraint)):
            raise LatticeError("constrained patterns use position variables only")
        check_constrained_pattern(self.pattern, self.constraint)

    def __repr__(self):
        from .syntax import render_formula

        return f"{self.pattern!r} [{render_formula(self.constraint)}]"


def g_member(S: Structure, T: Iterable[ConstrainedTerm], s: Term) -> bool:
    """Is ``s`` a ground instance of some element of ``T``?"""
    for ct in T:
        theta = match_linear(ct.term, s)
        if theta is None:
            continue
        fv = free_vars(ct.constraint)
        if not all(is_interpreted_ground(theta[v]) for v in fv):
            continue
        if eval_closed(S, substitute(ct.constraint, {v: theta[v] for v in fv})):
            return True
    return False


def replace(ct: ConstrainedTerm) -> List[ConstrainedPattern]:
    where = var_positions(ct.term)
    fv = free_vars(ct.constraint)
    free = [v for v in where if v not in fv]
    sigma = {x: Var(where[x]) for x in fv}
    phi = substitute(ct.constraint, sigma)
    out = []
    for choice in itertools.product((BOX, BLACK), repeat=len(free)):
        theta: Dict[Var, Term] = {x: BOX for x in fv}
        theta.update(zip(free, choice))
        out.append(ConstrainedPattern(apply(theta, ct.term), phi))
    return out


def replace_set(T: Iterable[ConstrainedTerm]) -> List[ConstrainedPattern]:
    out: List[ConstrainedPattern] = []
    for ct in T:
        for cp in replace(ct):
            if cp not in out:
                out.append(cp)
    return out


def proper_subpatterns(U: Iterable[ConstrainedPattern]) -> List[Term]:
    out: List[Term] = []
    for cp in U:
        for pos in positions(cp.pattern)[1:]:
            w = subterm(cp.pattern, pos)
            if not isinstance(w, Wild) and w not in out:
                out.append(w)
    return out


# -- orders ------------------------------------------------------------------


def formula_leq(S: Structure, phi: Formula, psi: Formula) -> bool:
    """phi is more general than psi: FV(phi) within FV(psi) and psi implies phi."""
    return free_vars(phi) <= free_vars(psi) and entails(S, psi, phi)


def cp_leq(S: Structure, a: ConstrainedPattern, b: ConstrainedPattern) -> bool:
    return pattern_leq(a.pattern, b.pattern) and formula_leq(S, a.constraint, b.constraint)


def cp_equiv(S: Structure, a: ConstrainedPattern, b: ConstrainedPattern) -> bool:
    return cp_leq(S, a, b) and cp_leq(S, b, a)


def cp_lt(S: Structure, a: ConstrainedPattern, b: ConstrainedPattern) -> bool:
    return cp_leq(S, a, b) and not cp_leq(S, b, a)


def dedup(S: Structure, U: Iterable[ConstrainedPattern]) -> List[ConstrainedPattern]:
    """Keep the first element of each equivalence class."""
    out: List[ConstrainedPattern] = []
    for cp in U:
        if not any(
            o.pattern == cp.pattern and equivalent_up_to_vars(S, o.constraint, cp.constraint) for o in out
        ):
            out.append(cp)
    return out


# -- LessGeneralized -------------------------------------------------------------

# A literal is (basis formula, polarity); label constraints are kept as sets
# of literals so syntactically identical conjunctions share one key.
Literal = Tuple[Formula, bool]


def _literal_formula(lit: Literal) -> Formula:
    phi, positive = lit
    return phi if positive else Not(phi)


def _literal_key(lit: Literal):
    from .syntax import render_formula

    return (render_formula(lit[0]), not lit[1])


def literals_formula(lits: FrozenSet[Literal]) -> Formula:
    return conj(*(_literal_formula(l) for l in sorted(lits, key=_literal_key)))


@dataclass
class _Closure:
    S: Structure
    members: List[Tuple[Term, FrozenSet[Literal]]] = field(default_factory=list)
    # every key ever produced maps to the index of its class representative
    seen: Dict[Tuple[Term, FrozenSet[Literal]], int] = field(default_factory=dict)
    by_pattern: Dict[Term, List[int]] = field(default_factory=dict)

    def add(self, pattern: Term, lits: FrozenSet[Literal]) -> bool:
        key = (pattern, lits)
        if key in self.seen:
            return False
        phi = literals_formula(lits)
        if lits and not sat(self.S, phi):
            self.seen[key] = -1
            return False
        for j in self.by_pattern.get(pattern, ()):
            other = literals_formula(self.members[j][1])
            if equivalent_up_to_vars(self.S, other, phi):
                self.seen[key] = j
                return False
        self.seen[key] = len(self.members)
        self.by_pattern.setdefault(pattern, []).append(len(self.members))
        self.members.append(key)
        return True


def less_generalized(S: Structure, U: Sequence[ConstrainedPattern]) -> List[ConstrainedPattern]:
    """Least set closed under the three generating clauses, up to equivalence."""
    closure = _Closure(S)
    seeds: List[Tuple[Term, FrozenSet[Literal]]] = [(BOX, frozenset()), (BLACK, frozenset())]
    seeds += [(w, frozenset()) for w in proper_subpatterns(U)]
    for cp in U:
        if cp.constraint == TOP:
            seeds.append((cp.pattern, frozenset()))
            continue
        seeds.append((cp.pattern, frozenset([(cp.constraint, True)])))
        seeds.append((cp.pattern, frozenset([(cp.constraint, False)])))
    for pattern, lits in seeds:
        closure.add(pattern, lits)

    done = 0
    while done < len(closure.members):
        pattern, lits = closure.members[done]
        # meet the new member with every member up to and including itself
        for j in range(done + 1):
            other_pattern, other_lits = closure.members[j]
            m = meet(pattern, other_pattern)
            if m is None:
                continue
            merged = lits | other_lits
            if any((phi, not pol) in merged for phi, pol in merged):
                continue
            closure.add(m, merged)
        done += 1

    out = []
    for pattern, lits in closure.members:
        phi = literals_formula(lits)
        # constraints only mention positions interpretable in both operands
        check_constrained_pattern(pattern, phi)
        out.append(ConstrainedPattern(pattern, phi))
    return out


def maximal_for(S: Structure, u: Term, U: Sequence[ConstrainedPattern], order=None) -> List[ConstrainedPattern]:
    """Least general members of ``U`` whose pattern is more general than ``u``.

    ``order`` may supply a precomputed ``cp_leq`` on pairs of indices.
    """
    leq = order or (lambda i, j: cp_leq(S, U[i], U[j]))
    below = [i for i, cp in enumerate(U) if pattern_leq(cp.pattern, u)]
    keep = []
    for i in below:
        strictly_above = any(leq(i, j) and not leq(j, i) for j in below if j != i)
        if not strictly_above:
            keep.append(i)
    return dedup(S, [U[i] for i in keep])
