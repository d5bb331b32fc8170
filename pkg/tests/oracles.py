"""Brute-force oracles kept separate from the library code they check."""

from __future__ import annotations

import itertools
import operator
import random
from typing import Tuple

import numpy as np

from ctagen.logic import TOP, And, Atom, Not, Or, Structure, conj
from ctagen.patterns import ConstrainedPattern, meet, proper_subpatterns
from ctagen.solver import equivalent_up_to_vars, sat
from ctagen.terms import BLACK, BOX, App, Var

VARS = ("x", "y", "z")
OPS = {
    "=": operator.eq,
    "!=": operator.ne,
    "<=": operator.le,
    "<": operator.lt,
    ">=": operator.ge,
    ">": operator.gt,
}

# A raw formula is a nested tuple:
#   ("atom", op, (var_or_None, offset), (var_or_None, offset)) | ("not", f)
#   | ("and", f, g) | ("or", f, g)


def random_raw(rng: random.Random, natural: bool, n_atoms: int = 3, max_offset: int = 3):
    def side():
        v = rng.choice(VARS + (None,))
        lo = 0 if natural else -max_offset
        return v, rng.randint(lo, max_offset)

    def atom():
        return ("atom", rng.choice(list(OPS)), side(), side())

    def grow(k):
        if k <= 1:
            f = atom()
        else:
            split = rng.randint(1, k - 1)
            f = (rng.choice(["and", "or"]), grow(split), grow(k - split))
        return ("not", f) if rng.random() < 0.3 else f

    return grow(rng.randint(1, n_atoms))


def _side_term(S: Structure, v, offset: int):
    up = S.symbol("s")
    down = S.symbol("p")
    if v is None:
        t = App(S.symbol("0"))
    else:
        t = Var(v)
    step = up if offset >= 0 else down
    if step is None:
        raise ValueError(f"offset {offset} not expressible in {S.name}")
    for _ in range(abs(offset)):
        t = App(step, [t])
    return t


def to_formula(S: Structure, raw):
    tag = raw[0]
    if tag == "atom":
        return Atom(raw[1], _side_term(S, *raw[2]), _side_term(S, *raw[3]))
    if tag == "not":
        return Not(to_formula(S, raw[1]))
    left, right = to_formula(S, raw[1]), to_formula(S, raw[2])
    return And(left, right) if tag == "and" else Or(left, right)


def _size(raw) -> Tuple[int, int]:
    if raw[0] == "atom":
        return 1, abs(raw[2][1]) + abs(raw[3][1])
    parts = [_size(r) for r in raw[1:]]
    return sum(p[0] for p in parts), sum(p[1] for p in parts)


def window(raw) -> int:
    """A radius that contains a model whenever one exists.

    Each atom contributes at most one difference bound per disjunct, and a
    shortest-path model stays within the sum of the bound weights.
    """
    atoms, offsets = _size(raw)
    return offsets + atoms + 2


def brute_force(raw, natural: bool) -> np.ndarray:
    """Truth table of ``raw`` over the cube [-W, W]^3 (or [0, W]^3)."""
    w = window(raw)
    axis = np.arange(0 if natural else -w, w + 1)
    grids = dict(zip(VARS, np.meshgrid(axis, axis, axis, indexing="ij")))

    def side(s):
        v, c = s
        return (grids[v] if v is not None else 0) + c

    def ev(r):
        tag = r[0]
        if tag == "atom":
            return np.broadcast_to(OPS[r[1]](side(r[2]), side(r[3])), grids["x"].shape)
        if tag == "not":
            return ~ev(r[1])
        a, b = ev(r[1]), ev(r[2])
        return (a & b) if tag == "and" else (a | b)

    return ev(raw)


def naive_less_generalized(S, U):
    """Direct fixpoint of the three generating clauses, quotiented by equivalence."""

    def equiv(a, b):
        return a[0] == b[0] and equivalent_up_to_vars(S, a[1], b[1])

    def add(out, item):
        if not any(equiv(item, o) for o in out):
            out.append(item)
            return True
        return False

    items = []
    for base in [BOX, BLACK] + proper_subpatterns(U):
        add(items, (base, TOP))
    for c in U:
        for phi in (c.constraint, ~c.constraint):
            if sat(S, phi):
                add(items, (c.pattern, phi))
    grew = True
    while grew:
        grew = False
        for a, b in itertools.product(list(items), repeat=2):
            m = meet(a[0], b[0])
            if m is None:
                continue
            phi = conj(a[1], b[1])
            if sat(S, phi) and add(items, (m, phi)):
                grew = True
    return [ConstrainedPattern(u, phi) for u, phi in items]
