"""Terms, positions, substitutions and signatures.

Terms are immutable and hash by structure.  A single ``Var`` type covers
both named variables (``x``) and position variables (``@1.1``); which kind a
context accepts is checked by the consumer.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

Position = Tuple[int, ...]
EPSILON: Position = ()


class TermError(ValueError):
    pass


class PositionError(TermError):
    """Raised when a position does not belong to a term."""


@dataclass(frozen=True, order=True)
class Symbol:
    name: str
    arity: int
    interpreted: bool = False

    def __str__(self) -> str:
        return f"{self.name}/{self.arity}"


class Term:
    """Base class of the three term node kinds."""

    __slots__ = ()


class Var(Term):
    """A variable; ``ident`` is a name (str) or a position (tuple of ints)."""

    __slots__ = ("ident", "_hash")

    def __init__(self, ident: Union[str, Position]):
        if isinstance(ident, list):
            ident = tuple(ident)
        self.ident = ident
        self._hash = hash(("var", ident))

    @property
    def positional(self) -> bool:
        return isinstance(self.ident, tuple)

    def __eq__(self, other):
        return isinstance(other, Var) and self.ident == other.ident

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if self.positional:
            return "@" + ".".join(map(str, self.ident))
        return self.ident


def posvar(*path: int) -> Var:
    return Var(tuple(path))


class App(Term):
    __slots__ = ("symbol", "args", "_hash", "_gground")

    def __init__(self, symbol: Symbol, args: Sequence[Term] = ()):
        args = tuple(args)
        if len(args) != symbol.arity:
            raise TermError(f"{symbol} applied to {len(args)} arguments")
        self.symbol = symbol
        self.args = args
        self._hash = hash((symbol.name, args))
        # membership in T(G), cached since enumeration asks for it constantly
        self._gground = symbol.interpreted and all(
            isinstance(a, App) and a._gground for a in args
        )

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, App)
            and self._hash == other._hash
            and self.symbol == other.symbol
            and self.args == other.args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if not self.args:
            return self.symbol.name
        return f"{self.symbol.name}({', '.join(map(repr, self.args))})"


class Wild(Term):
    """Wildcard: ``interpretable=True`` is the box, False the black box."""

    __slots__ = ("interpretable",)

    def __init__(self, interpretable: bool):
        self.interpretable = interpretable

    def __eq__(self, other):
        return isinstance(other, Wild) and self.interpretable == other.interpretable

    def __hash__(self):
        return hash(("wild", self.interpretable))

    def __repr__(self):
        return "#" if self.interpretable else "@@"


BOX = Wild(True)
BLACK = Wild(False)


def is_wildcard(t: Term) -> bool:
    return isinstance(t, Wild)


# -- positions ----------------------------------------------------------------


def positions(t: Term) -> List[Position]:
    """All positions of ``t`` in preorder; the root ``()`` comes first."""
    out: List[Position] = []

    def walk(u: Term, prefix: Position) -> None:
        out.append(prefix)
        if isinstance(u, App):
            for i, a in enumerate(u.args, 1):
                walk(a, prefix + (i,))

    walk(t, EPSILON)
    return out


def has_position(t: Term, pos: Position) -> bool:
    for i in pos:
        if not isinstance(t, App) or not 1 <= i <= len(t.args):
            return False
        t = t.args[i - 1]
    return True


def subterm(t: Term, pos: Position) -> Term:
    u = t
    for i in pos:
        if not isinstance(u, App) or not 1 <= i <= len(u.args):
            raise PositionError(f"position {format_position(pos)} not in {t!r}")
        u = u.args[i - 1]
    return u


def replace_at(t: Term, pos: Position, new: Term) -> Term:
    if not pos:
        return new
    if not isinstance(t, App) or not 1 <= pos[0] <= len(t.args):
        raise PositionError(f"position {format_position(pos)} not in {t!r}")
    i = pos[0] - 1
    args = list(t.args)
    args[i] = replace_at(args[i], pos[1:], new)
    return App(t.symbol, args)


def format_position(pos: Position) -> str:
    return ".".join(map(str, pos)) if pos else "ε"


# -- variables and classification ---------------------------------------------


def variables(t: Term) -> List[Var]:
    """Variables of ``t`` in left-to-right order, with repetitions."""
    if isinstance(t, Var):
        return [t]
    if isinstance(t, App):
        return [v for a in t.args for v in variables(a)]
    return []


def var_positions(t: Term) -> Dict[Var, Position]:
    """Map each variable of a linear term to its unique position."""
    out: Dict[Var, Position] = {}
    for pos in positions(t):
        u = subterm(t, pos)
        if isinstance(u, Var):
            if u in out:
                raise TermError(f"{u!r} occurs twice in {t!r}")
            out[u] = pos
    return out


def is_linear(t: Term) -> bool:
    vs = [v for v in variables(t) if not v.positional]
    return len(vs) == len(set(vs))


def is_ground(t: Term) -> bool:
    if isinstance(t, App):
        return all(is_ground(a) for a in t.args)
    return False


def is_interpreted_ground(t: Term) -> bool:
    """True iff ``t`` is in T(G)."""
    return isinstance(t, App) and t._gground


def depth(t: Term) -> int:
    if isinstance(t, App) and t.args:
        return 1 + max(depth(a) for a in t.args)
    return 1


# -- substitutions -------------------------------------------------------------

Substitution = Dict[Var, Term]


def apply(theta: Substitution, t: Term) -> Term:
    if isinstance(t, Var):
        return theta.get(t, t)
    if isinstance(t, App) and t.args:
        return App(t.symbol, [apply(theta, a) for a in t.args])
    return t


def match_linear(pattern: Term, subject: Term) -> Optional[Substitution]:
    """Match a linear, wildcard-free term against a ground term."""
    theta: Substitution = {}
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            theta[p] = s
        elif isinstance(p, App):
            if not isinstance(s, App) or s.symbol != p.symbol:
                return None
            stack.extend(zip(p.args, s.args))
        else:
            raise TermError("match_linear does not accept wildcards")
    return theta


# -- signatures and enumeration ------------------------------------------------


def symbol_order(sym: Symbol):
    # interpreted symbols first, then by name
    return (not sym.interpreted, sym.name)


@dataclass(frozen=True)
class Signature:
    funs: Tuple[Symbol, ...]
    structure_name: str = ""

    def __post_init__(self):
        seen: Dict[str, Symbol] = {}
        for f in self.funs:
            if f.name in seen and seen[f.name] != f:
                raise TermError(f"symbol {f.name} declared twice with different kinds/arities")
            seen[f.name] = f
        object.__setattr__(self, "funs", tuple(sorted(set(self.funs), key=symbol_order)))

    def __contains__(self, sym: Symbol) -> bool:
        return sym in self.funs

    def lookup(self, name: str) -> Optional[Symbol]:
        for f in self.funs:
            if f.name == name:
                return f
        return None

    @property
    def uninterpreted(self) -> Tuple[Symbol, ...]:
        return tuple(f for f in self.funs if not f.interpreted)

    @property
    def interpreted(self) -> Tuple[Symbol, ...]:
        return tuple(f for f in self.funs if f.interpreted)

    @property
    def max_arity(self) -> int:
        return max((f.arity for f in self.funs), default=0)

    def union(self, other: "Signature") -> "Signature":
        if self.structure_name and other.structure_name and self.structure_name != other.structure_name:
            raise TermError("signatures attached to different structures")
        return Signature(self.funs + other.funs, self.structure_name or other.structure_name)


def symbols_of(t: Term) -> Iterator[Symbol]:
    if isinstance(t, App):
        yield t.symbol
        for a in t.args:
            yield from symbols_of(a)


def ground_layers(funs: Iterable[Symbol], max_depth: int) -> Iterator[List[Tuple[Term, Tuple[int, ...]]]]:
    """Yield, depth by depth, the ground terms of exactly that depth.

    Each entry is ``(term, child_indices)`` where indices refer to the flat
    list of all previously yielded terms.  This lets callers evaluate
    bottom-up without re-hashing subterms.
    """
    funs = sorted(funs, key=symbol_order)
    if not any(f.arity == 0 for f in funs):
        raise TermError("signature has no constant, so there are no ground terms")
    flat: List[Term] = []
    boundary = 0  # index where the previous layer starts
    for d in range(1, max_depth + 1):
        layer: List[Tuple[Term, Tuple[int, ...]]] = []
        if d == 1:
            for f in funs:
                if f.arity == 0:
                    layer.append((App(f), ()))
        else:
            prev_end = len(flat)
            for f in funs:
                if f.arity == 0:
                    continue
                for idx in itertools.product(range(prev_end), repeat=f.arity):
                    if max(idx) < boundary:
                        continue
                    layer.append((App(f, [flat[i] for i in idx]), idx))
            boundary = prev_end
        flat.extend(t for t, _ in layer)
        yield layer


def enumerate_ground(sig: Signature, max_depth: int, restrict_to_G: bool = False) -> List[Term]:
    """Every ground term of depth <= ``max_depth``, depth-major, each once."""
    if max_depth < 1:
        raise TermError("max_depth must be positive")
    funs = sig.interpreted if restrict_to_G else sig.funs
    return [t for layer in ground_layers(funs, max_depth) for t, _ in layer]
