"""Concrete syntax for terms, patterns and constraints.

Terms are written ``f(a, b)`` with constants bare; any identifier that is
not a known symbol is a named variable.  ``#`` and ``@@`` are the box and
black-box wildcards, ``@1.2`` is a position variable (``@`` alone is the
root position).  Constraints combine comparisons with ``!``, ``&``, ``|``.
"""

from __future__ import annotations

import re
from typing import Callable, List, Optional, Tuple

from .logic import BOT, TOP, And, Atom, Formula, Not, Or, _Const
from .terms import BLACK, BOX, App, Symbol, Term, Var


class ParseError(ValueError):
    pass


_TOKEN = re.compile(
    r"\s*(?:(?P<black>@@)|(?P<pos>@(?:\d+(?:\.\d+)*)?)|(?P<op><=|>=|!=|<|>|=)"
    r"|(?P<name>[A-Za-z0-9_']+)|(?P<punct>[(),#!&|\[\]]))"
)


def tokenize(text: str) -> List[Tuple[str, str]]:
    out = []
    i = 0
    text = text.rstrip()
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m or m.end() == i:
            raise ParseError(f"unexpected character {text[i]!r} in {text!r}")
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
        i = m.end()
    return out


Resolver = Callable[[str, int], Optional[Symbol]]


class _Parser:
    def __init__(self, text: str, resolve: Resolver, wildcards: bool, variables: bool):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.resolve = resolve
        self.wildcards = wildcards
        self.variables = variables

    def peek(self) -> Tuple[str, str]:
        return self.toks[self.i] if self.i < len(self.toks) else ("eof", "")

    def next(self) -> Tuple[str, str]:
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, value: str) -> None:
        kind, v = self.next()
        if v != value:
            raise ParseError(f"expected {value!r} but found {v or 'end of input'!r} in {self.text!r}")

    def done(self) -> None:
        if self.i != len(self.toks):
            raise ParseError(f"trailing input {self.peek()[1]!r} in {self.text!r}")

    # term := name ['(' term (',' term)* ')'] | '#' | '@@' | '@pos'
    def term(self) -> Term:
        kind, v = self.next()
        if v == "#" or kind == "black":
            if not self.wildcards:
                raise ParseError(f"wildcard not allowed here: {self.text!r}")
            return BOX if v == "#" else BLACK
        if kind == "pos":
            path = v[1:]
            return Var(tuple(int(p) for p in path.split(".")) if path else ())
        if kind != "name":
            raise ParseError(f"expected a term but found {v or 'end of input'!r} in {self.text!r}")
        args: List[Term] = []
        if self.peek()[1] == "(":
            self.next()
            if self.peek()[1] != ")":
                args.append(self.term())
                while self.peek()[1] == ",":
                    self.next()
                    args.append(self.term())
            self.expect(")")
            sym = self.resolve(v, len(args))
            if sym is None:
                raise ParseError(f"unknown function symbol {v!r} in {self.text!r}")
            return App(sym, args)
        sym = self.resolve(v, 0)
        if sym is not None:
            return App(sym)
        if not self.variables or not (v[0].isalpha() and v[0].islower()):
            raise ParseError(f"unknown symbol {v!r} in {self.text!r}")
        return Var(v)

    # formula := conj ('|' conj)* ; conj := unary ('&' unary)*
    def formula(self) -> Formula:
        f = self.conjunction()
        while self.peek()[1] == "|":
            self.next()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.peek()[1] == "&":
            self.next()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind, v = self.peek()
        if v == "!":
            self.next()
            return Not(self.unary())
        if v == "(":
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        if kind == "name" and v in ("true", "false") and self.resolve(v, 0) is None:
            nxt = self.toks[self.i + 1] if self.i + 1 < len(self.toks) else ("eof", "")
            if nxt[0] != "op":
                self.next()
                return TOP if v == "true" else BOT
        lhs = self.term()
        kind, op = self.next()
        if kind != "op":
            raise ParseError(f"expected a comparison after {lhs!r} in {self.text!r}")
        return Atom(op, lhs, self.term())


def parse_term(text: str, resolve: Resolver, wildcards: bool = False, variables: bool = True) -> Term:
    p = _Parser(text, resolve, wildcards, variables)
    t = p.term()
    p.done()
    return t


def parse_pattern(text: str, resolve: Resolver) -> Term:
    return parse_term(text, resolve, wildcards=True, variables=False)


def parse_formula(text: str, resolve: Resolver) -> Formula:
    p = _Parser(text, resolve, wildcards=False, variables=True)
    if not p.toks:
        raise ParseError("empty constraint")
    f = p.formula()
    p.done()
    return f


def parse_constrained(text: str, resolve: Resolver) -> Tuple[Term, Formula]:
    """Parse ``term [ constraint ]``; a missing bracket means ``true``."""
    text = text.strip()
    if text.endswith("]"):
        depth = 0
        for i in range(len(text) - 1, -1, -1):
            if text[i] == "]":
                depth += 1
            elif text[i] == "[":
                depth -= 1
                if depth == 0:
                    return parse_term(text[:i], resolve), parse_formula(text[i + 1 : -1], resolve)
        raise ParseError(f"unbalanced brackets in {text!r}")
    return parse_term(text, resolve), TOP


# -- rendering -------------------------------------------------------------------


def render_term(t: Term) -> str:
    return repr(t)


def render_formula(phi: Formula) -> str:
    if isinstance(phi, Atom):
        return f"{phi.lhs!r} {phi.op} {phi.rhs!r}"
    if isinstance(phi, _Const):
        return "true" if phi.value else "false"
    if isinstance(phi, Not):
        inner = render_formula(phi.arg)
        return "!" + (inner if isinstance(phi.arg, (Not, _Const)) else f"({inner})")
    if isinstance(phi, And):
        left = render_formula(phi.left)
        right = render_formula(phi.right)
        if isinstance(phi.left, Or):
            left = f"({left})"
        if isinstance(phi.right, (And, Or)):
            right = f"({right})"
        return f"{left} & {right}"
    if isinstance(phi, Or):
        left = render_formula(phi.left)
        right = render_formula(phi.right)
        if isinstance(phi.right, Or):
            right = f"({right})"
        return f"{left} | {right}"
    raise TypeError(phi)
