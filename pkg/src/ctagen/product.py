"""Product automata and a sufficient intersection-emptiness check."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .automaton import CTA, AutomatonError, State, TransitionRule, accepts
from .builder import build, prune_dead_rules, signature_for, trim
from .logic import Structure, conj
from .patterns import ConstrainedTerm, meet
from .solver import sat
from .terms import Term, enumerate_ground

EMPTY = "Empty"
UNKNOWN = "Unknown"
NONEMPTY = "NonEmpty"


def product(A1: CTA, A2: CTA) -> CTA:
    """Automaton accepting exactly the terms both inputs accept.

    A product state is labeled with the meet of its components' labels
    when both are labeled; pairs whose labels have no meet cannot be
    reached by any term and are never produced.
    """
    if A1.structure != A2.structure:
        raise AutomatonError("automata over different structures")
    if A1.signature.funs != A2.signature.funs:
        raise AutomatonError("automata over different signatures")
    pairs: Dict[Tuple[State, State], State] = {}

    def pair(p: State, r: State) -> Optional[State]:
        key = (p, r)
        if key not in pairs:
            label = None
            if p.label is not None and r.label is not None:
                label = meet(p.label, r.label)
                if label is None:
                    pairs[key] = None
                    return None
            pairs[key] = State(f"{p.name}_{r.name}", label, p.tilde and r.tilde, (p, r))
        return pairs[key]

    rules: List[TransitionRule] = []
    for sym, rs1 in A1.by_symbol.items():
        for r1 in rs1:
            for r2 in A2.by_symbol.get(sym, ()):
                kids = [pair(a, b) for a, b in zip(r1.children, r2.children)]
                target = pair(r1.target, r2.target)
                if target is None or any(k is None for k in kids):
                    continue
                phi = conj(r1.constraint, r2.constraint)
                if not sat(A1.structure, phi).sat:
                    continue
                rules.append(TransitionRule(sym, tuple(kids), phi, target))
    states = tuple(q for q in pairs.values() if q is not None)
    finals = frozenset(q for q in states if q.left in A1.finals and q.right in A2.finals)
    return trim(CTA(A1.signature, A1.structure, states, finals, tuple(rules)))


def emptiness_sufficient(A: CTA) -> str:
    """``Empty`` when no final state survives trimming and pruning, else ``Unknown``."""
    A = trim(A)
    if A.labeled:
        A = prune_dead_rules(A)
    return EMPTY if not A.finals else UNKNOWN


@dataclass(frozen=True)
class Verdict:
    status: str
    witness: Optional[Term] = None

    def __str__(self):
        if self.status == NONEMPTY:
            return f"NONEMPTY({self.witness!r})"
        return self.status.upper()


def intersection_check(
    S: Structure,
    T1: Sequence[ConstrainedTerm],
    T2: Sequence[ConstrainedTerm],
    search_depth: int = 4,
    signature=None,
) -> Verdict:
    if signature is None:
        signature = signature_for(S, list(T1) + list(T2))
    A1 = build(S, T1, signature).cta
    A2 = build(S, T2, signature).cta
    P = product(A1, A2)
    if emptiness_sufficient(P) == EMPTY:
        return Verdict(EMPTY)
    for t in enumerate_ground(signature, search_depth):
        if accepts(P, t):
            return Verdict(NONEMPTY, t)
    return Verdict(UNKNOWN)
