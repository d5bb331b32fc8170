"""Satisfiability for quantifier-free difference-logic constraints.

Formulas are put in negation normal form with negations folded into the
comparison operator, then expanded into disjunctive normal form lazily.
Each conjunct is a set of bounds ``x - y <= k`` over the formula's
variables plus a zero node; it is satisfiable iff the constraint graph has
no negative cycle (Bellman-Ford).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Tuple

from .logic import (
    BOT,
    NEGATED_OP,
    TOP,
    And,
    Atom,
    Formula,
    Not,
    Or,
    Structure,
    _Const,
    conj,
    disj,
    free_vars,
    linearize,
)
from .terms import Var

# a bound (x, y, k) reads x - y <= k; None is the zero node
Bound = Tuple[Optional[Var], Optional[Var], int]


@dataclass(frozen=True)
class SatVerdict:
    sat: bool
    witness: Optional[Dict[Var, int]] = None

    def __bool__(self):
        return self.sat


def nnf(phi: Formula, negate: bool = False) -> Formula:
    """Negation normal form with negations absorbed into atoms."""
    if isinstance(phi, Atom):
        return Atom(NEGATED_OP[phi.op], phi.lhs, phi.rhs) if negate else phi
    if isinstance(phi, _Const):
        return (BOT if phi.value else TOP) if negate else phi
    if isinstance(phi, Not):
        return nnf(phi.arg, not negate)
    if isinstance(phi, And):
        parts = (nnf(phi.left, negate), nnf(phi.right, negate))
        return disj(*parts) if negate else conj(*parts)
    if isinstance(phi, Or):
        parts = (nnf(phi.left, negate), nnf(phi.right, negate))
        return conj(*parts) if negate else disj(*parts)
    raise TypeError(f"not a formula: {phi!r}")


def _atom_bounds(S: Structure, a: Atom) -> List[List[Bound]]:
    """The atom as a disjunction of conjunctions of bounds."""
    x, c = linearize(S, a.lhs)
    y, d = linearize(S, a.rhs)
    # lhs op rhs  <=>  x + c op y + d
    le = [(x, y, d - c)]  # x - y <= d - c
    ge = [(y, x, c - d)]
    lt = [(x, y, d - c - 1)]
    gt = [(y, x, c - d - 1)]
    return {
        "<=": [le],
        ">=": [ge],
        "<": [lt],
        ">": [gt],
        "=": [le + ge],
        "!=": [lt, gt],
    }[a.op]


def _dnf(S: Structure, phi: Formula) -> Iterator[List[Bound]]:
    if isinstance(phi, Atom):
        yield from _atom_bounds(S, phi)
    elif isinstance(phi, _Const):
        if phi.value:
            yield []
    elif isinstance(phi, Or):
        yield from _dnf(S, phi.left)
        yield from _dnf(S, phi.right)
    elif isinstance(phi, And):
        right = None
        for lhs in _dnf(S, phi.left):
            if right is None:
                right = list(_dnf(S, phi.right))
            for rhs in right:
                yield lhs + rhs
    else:
        raise TypeError(f"formula not in NNF: {phi!r}")


def solve_bounds(bounds: List[Bound], variables, natural: bool) -> Optional[Dict[Var, int]]:
    """Return an integer model of the bounds, or None on a negative cycle."""
    nodes: List[Optional[Var]] = [None] + sorted(
        set(variables), key=repr
    )
    index = {n: i for i, n in enumerate(nodes)}
    edges = []
    for x, y, k in bounds:
        # x - y <= k  is the edge y -> x with weight k
        edges.append((index[y], index[x], k))
    if natural:
        for v in nodes[1:]:
            edges.append((index[v], 0, 0))  # 0 - v <= 0
    dist = [0] * len(nodes)
    for _ in range(len(nodes)):
        changed = False
        for u, v, w in edges:
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                changed = True
        if not changed:
            break
    else:
        for u, v, w in edges:
            if dist[u] + w < dist[v]:
                return None
    base = dist[0]
    return {n: dist[i] - base for i, n in enumerate(nodes) if n is not None}


@lru_cache(maxsize=200_000)
def _sat_cached(S: Structure, phi: Formula) -> SatVerdict:
    vs = free_vars(phi)
    for bounds in _dnf(S, nnf(phi)):
        model = solve_bounds(bounds, vs, S.natural)
        if model is not None:
            return SatVerdict(True, model)
    return SatVerdict(False)


def sat(S: Structure, phi: Formula) -> SatVerdict:
    """Decide satisfiability, all variables ranging freely over the universe."""
    return _sat_cached(S, phi)


def valid(S: Structure, phi: Formula) -> bool:
    return not sat(S, Not(phi)).sat


def entails(S: Structure, phi: Formula, psi: Formula) -> bool:
    return not sat(S, And(phi, Not(psi))).sat


def equivalent(S: Structure, phi: Formula, psi: Formula) -> bool:
    return entails(S, phi, psi) and entails(S, psi, phi)


def equivalent_up_to_vars(S: Structure, phi: Formula, psi: Formula) -> bool:
    """Same variables and semantically equivalent (rule/label identity)."""
    return free_vars(phi) == free_vars(psi) and equivalent(S, phi, psi)
