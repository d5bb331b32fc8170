"""Constraint formulas, the built-in structures and their evaluation.

Atoms are binary comparisons between G-terms.  Every interpreted function
symbol is a constant or a unary offset ``x -> x + c``, which keeps every
atom inside difference logic (see :mod:`ctagen.solver`).
"""

from __future__ import annotations

import operator
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, Optional, Tuple

from .terms import (
    App,
    Position,
    Symbol,
    Term,
    Var,
    Wild,
    has_position,
    is_interpreted_ground,
    subterm,
)


class LogicError(ValueError):
    pass


class UnsupportedAtom(LogicError):
    pass


# -- formulas --------------------------------------------------------------------

COMPARISONS: Dict[str, Callable[[int, int], bool]] = {
    "=": operator.eq,
    "!=": operator.ne,
    "<=": operator.le,
    "<": operator.lt,
    ">=": operator.ge,
    ">": operator.gt,
}
NEGATED_OP = {"=": "!=", "!=": "=", "<=": ">", "<": ">=", ">=": "<", ">": "<="}


class Formula:
    __slots__ = ()

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __invert__(self) -> "Formula":
        return Not(self)


@dataclass(frozen=True, repr=False)
class Atom(Formula):
    op: str
    lhs: Term
    rhs: Term

    def __post_init__(self):
        if self.op not in COMPARISONS:
            raise LogicError(f"unknown predicate {self.op!r}")

    def __repr__(self):
        return f"{self.lhs!r} {self.op} {self.rhs!r}"


@dataclass(frozen=True, repr=False)
class _Const(Formula):
    value: bool

    def __repr__(self):
        return "true" if self.value else "false"


TOP = _Const(True)
BOT = _Const(False)


@dataclass(frozen=True, repr=False)
class Not(Formula):
    arg: Formula

    def __repr__(self):
        return f"!({self.arg!r})"


@dataclass(frozen=True, repr=False)
class And(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"({self.left!r} & {self.right!r})"


@dataclass(frozen=True, repr=False)
class Or(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"({self.left!r} | {self.right!r})"


def conj(*fs: Formula) -> Formula:
    fs = [f for f in fs if f != TOP]
    if not fs:
        return TOP
    out = fs[0]
    for f in fs[1:]:
        out = And(out, f)
    return out


def disj(*fs: Formula) -> Formula:
    fs = [f for f in fs if f != BOT]
    if not fs:
        return BOT
    out = fs[0]
    for f in fs[1:]:
        out = Or(out, f)
    return out


def atoms(phi: Formula) -> Iterable[Atom]:
    if isinstance(phi, Atom):
        yield phi
    elif isinstance(phi, Not):
        yield from atoms(phi.arg)
    elif isinstance(phi, (And, Or)):
        yield from atoms(phi.left)
        yield from atoms(phi.right)


def _term_vars(t: Term):
    if isinstance(t, Var):
        yield t
    elif isinstance(t, App):
        for a in t.args:
            yield from _term_vars(a)


def free_vars(phi: Formula) -> FrozenSet[Var]:
    """Var(phi); without quantifiers this is also FV(phi)."""
    return frozenset(v for a in atoms(phi) for side in (a.lhs, a.rhs) for v in _term_vars(side))


def map_terms(phi: Formula, fn: Callable[[Term], Term]) -> Formula:
    if isinstance(phi, Atom):
        return Atom(phi.op, fn(phi.lhs), fn(phi.rhs))
    if isinstance(phi, Not):
        return Not(map_terms(phi.arg, fn))
    if isinstance(phi, And):
        return And(map_terms(phi.left, fn), map_terms(phi.right, fn))
    if isinstance(phi, Or):
        return Or(map_terms(phi.left, fn), map_terms(phi.right, fn))
    return phi


def substitute(phi: Formula, theta: Dict[Var, Term]) -> Formula:
    from .terms import apply

    return map_terms(phi, lambda t: apply(theta, t))


# -- structures ---------------------------------------------------------------


@dataclass(frozen=True)
class Structure:
    """A built-in structure.

    ``offsets`` maps each unary G symbol to the constant it adds and
    ``constants`` maps each G constant to its value.  ``natural`` selects
    the universe N instead of Z.
    """

    name: str
    natural: bool
    constants: Tuple[Tuple[str, int], ...]
    offsets: Tuple[Tuple[str, int], ...]
    _by_name: Dict[str, Symbol] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        syms = {n: Symbol(n, 0, True) for n, _ in self.constants}
        syms.update({n: Symbol(n, 1, True) for n, _ in self.offsets})
        object.__setattr__(self, "_by_name", syms)

    @property
    def symbols(self) -> Tuple[Symbol, ...]:
        return tuple(self._by_name.values())

    def symbol(self, name: str) -> Optional[Symbol]:
        return self._by_name.get(name)

    @property
    def lower_bound(self) -> Optional[int]:
        return 0 if self.natural else None

    def __repr__(self):
        return f"Structure({self.name})"


S_INT = Structure("int", False, (("0", 0),), (("s", 1), ("p", -1)))
S_NAT = Structure("nat", True, (("0", 0),), (("s", 1),))
# zero and successor over the integers: ground terms denote naturals but
# the solver ranges over Z
S_INTSUCC = Structure("intsucc", False, (("0", 0),), (("s", 1),))

STRUCTURES: Dict[str, Structure] = {s.name: s for s in (S_INT, S_NAT, S_INTSUCC)}


def get_structure(name: str) -> Structure:
    try:
        return STRUCTURES[name]
    except KeyError:
        raise LogicError(f"unknown structure {name!r}; expected one of {sorted(STRUCTURES)}") from None


def linearize(S: Structure, t: Term) -> Tuple[Optional[Var], int]:
    """Fold a G-term into ``(variable or None, offset)``."""
    offset = 0
    offsets = dict(S.offsets)
    constants = dict(S.constants)
    while True:
        if isinstance(t, Var):
            return t, offset
        if isinstance(t, App) and t.symbol.interpreted:
            name = t.symbol.name
            if t.symbol.arity == 1 and name in offsets:
                offset += offsets[name]
                t = t.args[0]
                continue
            if t.symbol.arity == 0 and name in constants:
                return None, offset + constants[name]
        raise UnsupportedAtom(f"{t!r} is not a term over the symbols of {S.name}")


def eval_gterm(S: Structure, t: Term) -> int:
    if isinstance(t, Wild) or not is_interpreted_ground(t):
        raise LogicError(f"{t!r} is not a ground interpretable term")
    # accumulate inside-out so intermediate values are checked under N
    stack = []
    while isinstance(t, App) and t.args:
        stack.append(t.symbol.name)
        t = t.args[0]
    constants = dict(S.constants)
    offsets = dict(S.offsets)
    if t.symbol.name not in constants:
        raise LogicError(f"{t.symbol.name} is not a constant of {S.name}")
    value = constants[t.symbol.name]
    for name in reversed(stack):
        if name not in offsets:
            raise LogicError(f"{name} is not a unary symbol of {S.name}")
        value += offsets[name]
        if S.natural and value < 0:
            raise LogicError(f"term leaves the naturals under {S.name}")
    return value


def eval_closed(S: Structure, phi: Formula) -> bool:
    if isinstance(phi, Atom):
        return COMPARISONS[phi.op](eval_gterm(S, phi.lhs), eval_gterm(S, phi.rhs))
    if isinstance(phi, _Const):
        return phi.value
    if isinstance(phi, Not):
        return not eval_closed(S, phi.arg)
    if isinstance(phi, And):
        return eval_closed(S, phi.left) and eval_closed(S, phi.right)
    if isinstance(phi, Or):
        return eval_closed(S, phi.left) or eval_closed(S, phi.right)
    raise LogicError(f"not a formula: {phi!r}")


def evaluate(S: Structure, phi: Formula, env: Dict[Var, int]) -> bool:
    """Evaluate ``phi`` under an assignment of universe values to its variables."""
    if isinstance(phi, Atom):
        vals = []
        for side in (phi.lhs, phi.rhs):
            v, c = linearize(S, side)
            vals.append(c + (env[v] if v is not None else 0))
        return COMPARISONS[phi.op](*vals)
    if isinstance(phi, _Const):
        return phi.value
    if isinstance(phi, Not):
        return not evaluate(S, phi.arg, env)
    if isinstance(phi, And):
        return evaluate(S, phi.left, env) and evaluate(S, phi.right, env)
    if isinstance(phi, Or):
        return evaluate(S, phi.left, env) or evaluate(S, phi.right, env)
    raise LogicError(f"not a formula: {phi!r}")


def holds_on(S: Structure, t: Term, phi: Formula) -> bool:
    """The relation S, t |= phi for a ground term ``t``.

    An atom mentioning a position that is missing from ``t`` or whose
    subterm is not interpretable is false; connectives are classical.
    """
    if isinstance(phi, Atom):
        env: Dict[Var, int] = {}
        for v in free_vars(phi):
            if not v.positional:
                raise LogicError(f"named variable {v!r} in a position constraint")
            if not has_position(t, v.ident):
                return False
            u = subterm(t, v.ident)
            if not is_interpreted_ground(u):
                return False
            env[v] = eval_gterm(S, u)
        return evaluate(S, phi, env)
    if isinstance(phi, _Const):
        return phi.value
    if isinstance(phi, Not):
        return not holds_on(S, t, phi.arg)
    if isinstance(phi, And):
        return holds_on(S, t, phi.left) and holds_on(S, t, phi.right)
    if isinstance(phi, Or):
        return holds_on(S, t, phi.left) or holds_on(S, t, phi.right)
    raise LogicError(f"not a formula: {phi!r}")


def positional_free_vars(phi: Formula) -> FrozenSet[Position]:
    return frozenset(v.ident for v in free_vars(phi) if v.positional)
