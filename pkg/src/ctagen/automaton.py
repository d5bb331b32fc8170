"""Constrained tree automata: the move relation and the semantic checks."""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .logic import TOP, Formula, Structure, disj, holds_on, positional_free_vars
from .patterns import in_tbox, pattern_leq
from .solver import equivalent_up_to_vars, sat, valid
from .terms import (
    App,
    Signature,
    Symbol,
    Term,
    format_position,
    ground_layers,
    has_position,
    is_interpreted_ground,
    subterm,
)


class AutomatonError(ValueError):
    pass


class DeterminismViolation(AutomatonError):
    pass


class CompletenessViolation(AutomatonError):
    pass


class UnlabeledState(AutomatonError):
    pass


@dataclass(frozen=True)
class State:
    """A state; ``label`` is the pattern every term reaching it matches.

    Hand-written automata may leave ``label`` unset.  ``parts`` holds the
    component states of a product state.
    """

    name: str
    label: Optional[Term] = None
    tilde: bool = False
    parts: Tuple["State", ...] = ()

    def __repr__(self):
        return self.name

    @property
    def left(self) -> "State":
        return self.parts[0]

    @property
    def right(self) -> "State":
        return self.parts[1]


@dataclass(frozen=True)
class TransitionRule:
    symbol: Symbol
    children: Tuple[State, ...]
    constraint: Formula
    target: State

    def __post_init__(self):
        if len(self.children) != self.symbol.arity:
            raise AutomatonError(f"rule for {self.symbol} has {len(self.children)} children")
        for pos in positional_free_vars(self.constraint):
            # ε is accepted as an extension: it names the term being reduced
            if pos and not 1 <= pos[0] <= self.symbol.arity:
                raise AutomatonError(f"rule constraint mentions @{format_position(pos)} outside {self.symbol}")

    @property
    def lhs(self) -> Tuple[Symbol, Tuple[State, ...]]:
        return self.symbol, self.children

    def __repr__(self):
        from .syntax import render_formula

        head = self.symbol.name
        if self.children:
            head += "(" + ", ".join(map(repr, self.children)) + ")"
        c = "" if self.constraint == TOP else f" [{render_formula(self.constraint)}]"
        return f"{head}{c} -> {self.target!r}"


@dataclass(frozen=True)
class CTA:
    signature: Signature
    structure: Structure
    states: Tuple[State, ...]
    finals: FrozenSet[State]
    rules: Tuple[TransitionRule, ...]

    def __post_init__(self):
        known = set(self.states)
        if len(known) != len(self.states):
            raise AutomatonError("duplicate states")
        names = [q.name for q in self.states]
        if len(set(names)) != len(names):
            raise AutomatonError("duplicate state names")
        if not self.finals <= known:
            raise AutomatonError("final states must be states")
        for r in self.rules:
            if r.target not in known or any(c not in known for c in r.children):
                raise AutomatonError(f"rule {r!r} mentions an unknown state")
            if r.symbol not in self.signature:
                raise AutomatonError(f"rule {r!r} uses a symbol outside the signature")

    @cached_property
    def by_lhs(self) -> Dict[Tuple[Symbol, Tuple[State, ...]], List[TransitionRule]]:
        out: Dict[Tuple[Symbol, Tuple[State, ...]], List[TransitionRule]] = defaultdict(list)
        for r in self.rules:
            out[r.lhs].append(r)
        return dict(out)

    @cached_property
    def by_symbol(self) -> Dict[Symbol, List[TransitionRule]]:
        out: Dict[Symbol, List[TransitionRule]] = defaultdict(list)
        for r in self.rules:
            out[r.symbol].append(r)
        return dict(out)

    @property
    def labeled(self) -> bool:
        return all(q.label is not None for q in self.states)

    def state(self, name: str) -> State:
        for q in self.states:
            if q.name == name:
                return q
        raise KeyError(name)

    def with_rules(self, rules: Iterable[TransitionRule]) -> "CTA":
        return CTA(self.signature, self.structure, self.states, self.finals, tuple(rules))


def add_rule(S: Structure, rules: List[TransitionRule], rule: TransitionRule) -> bool:
    """Append ``rule`` unless an equivalent one is present."""
    for r in rules:
        if r.lhs == rule.lhs and r.target == rule.target:
            if r.constraint == rule.constraint or equivalent_up_to_vars(S, r.constraint, rule.constraint):
                return False
    rules.append(rule)
    return True


# -- running ----------------------------------------------------------------------


def _step(A: CTA, t: App, child_sets: Sequence[FrozenSet[State]]) -> Set[State]:
    out: Set[State] = set()
    for r in A.by_symbol.get(t.symbol, ()):
        if r.target in out:
            continue
        if all(c in cs for c, cs in zip(r.children, child_sets)) and holds_on(A.structure, t, r.constraint):
            out.add(r.target)
    return out


def reachable_states(A: CTA, t: Term) -> FrozenSet[State]:
    """All q with t ->* q, computed bottom-up."""
    cache: Dict[Term, FrozenSet[State]] = {}

    def go(u: Term) -> FrozenSet[State]:
        # equal subterms reach equal sets since constraints are local
        got = cache.get(u)
        if got is None:
            if not isinstance(u, App):
                raise AutomatonError(f"{u!r} is not a ground term")
            got = frozenset(_step(A, u, [go(a) for a in u.args]))
            cache[u] = got
        return got

    return go(t)


def accepts(A: CTA, t: Term) -> bool:
    return bool(reachable_states(A, t) & A.finals)


def run_det(A: CTA, t: Term) -> State:
    """The unique state of ``t`` in a deterministic, complete automaton."""
    if not isinstance(t, App):
        raise AutomatonError(f"{t!r} is not a ground term")
    kids = tuple(run_det(A, a) for a in t.args)
    fired = [
        r
        for r in A.by_lhs.get((t.symbol, kids), ())
        if holds_on(A.structure, t, r.constraint)
    ]
    targets = {r.target for r in fired}
    if not targets:
        raise CompletenessViolation(f"no rule applies to {t!r}")
    if len(targets) > 1:
        raise DeterminismViolation(f"rules {fired!r} all apply to {t!r}")
    return fired[0].target


def accessible_states(A: CTA) -> Set[State]:
    """States reachable bottom-up when constraints are ignored."""
    acc: Set[State] = set()
    changed = True
    while changed:
        changed = False
        for r in A.rules:
            if r.target not in acc and all(c in acc for c in r.children):
                acc.add(r.target)
                changed = True
    return acc


# -- reports ----------------------------------------------------------------------


@dataclass
class Violation:
    kind: str
    message: str
    reachable: bool = True
    term: Optional[Term] = None

    def __str__(self):
        where = "" if self.reachable else " (on a possibly unreachable tuple)"
        return f"{self.kind}: {self.message}{where}"


@dataclass
class Report:
    name: str
    violations: List[Violation] = field(default_factory=list)
    skipped: Optional[str] = None
    checked: int = 0
    counts: Dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self):
        if self.skipped:
            return f"{self.name}: SKIP ({self.skipped})"
        head = f"{self.name}: {'PASS' if self.ok else 'FAIL'}"
        if self.checked:
            head += f" ({self.checked} checked)"
        if self.counts:
            head += " " + ", ".join(f"{k}={n}" for k, n in sorted(self.counts.items()))
        return "\n  ".join([head] + [str(v) for v in self.violations[:10]])


def _lhs_pattern(rule_symbol: Symbol, children: Sequence[State]) -> Term:
    if any(c.label is None for c in children):
        raise UnlabeledState("constraint-completeness needs labeled states")
    return App(rule_symbol, [c.label for c in children])


def check_constraint_complete_static(A: CTA) -> Report:
    rep = Report("constraint-complete (static)")
    if not A.labeled:
        rep.skipped = "automaton has unlabeled states"
        return rep
    for r in A.rules:
        pat = _lhs_pattern(r.symbol, r.children)
        for pos in sorted(positional_free_vars(r.constraint)):
            if not has_position(pat, pos) or not in_tbox(subterm(pat, pos)):
                rep.violations.append(
                    Violation("constraint-incomplete", f"@{format_position(pos)} is not interpretable in {pat!r} for {r!r}")
                )
        rep.checked += 1
    return rep


def _tuples(A: CTA, sym: Symbol):
    return itertools.product(A.states, repeat=sym.arity)


def check_deterministic_static(A: CTA) -> Report:
    """Rules sharing a left-hand side with different targets must exclude each other."""
    rep = Report("deterministic (static)")
    acc = accessible_states(A)
    for (sym, kids), rules in A.by_lhs.items():
        reach = all(k in acc for k in kids)
        for r1, r2 in itertools.combinations(rules, 2):
            if r1.target == r2.target:
                continue
            rep.checked += 1
            verdict = sat(A.structure, r1.constraint & r2.constraint)
            if verdict.sat:
                model = ", ".join(f"{v!r}={n}" for v, n in sorted(verdict.witness.items(), key=lambda kv: repr(kv[0])))
                rep.violations.append(Violation("nondeterministic", f"{r1!r} and {r2!r} overlap at {{{model}}}", reach))
    return rep


def check_complete_static(A: CTA) -> Report:
    rep = Report("complete (static)")
    acc = accessible_states(A)
    for sym in A.signature.funs:
        for kids in _tuples(A, sym):
            rep.checked += 1
            reach = all(k in acc for k in kids)
            rules = A.by_lhs.get((sym, kids), [])
            lhs = sym.name + ("(" + ", ".join(map(repr, kids)) + ")" if kids else "")
            if not rules:
                rep.violations.append(Violation("incomplete", f"no rule for {lhs}", reach))
            elif not valid(A.structure, disj(*(r.constraint for r in rules))):
                rep.violations.append(Violation("incomplete", f"rule constraints for {lhs} are not exhaustive", reach))
    return rep


def _compile(A: CTA):
    # states become indices so inner loops hash ints, not dataclasses
    index = {q: i for i, q in enumerate(A.states)}
    compiled: Dict[Tuple[Symbol, Tuple[int, ...]], list] = defaultdict(list)
    for r in A.rules:
        key = (r.symbol, tuple(index[c] for c in r.children))
        compiled[key].append((r, positional_free_vars(r.constraint), index[r.target]))
    return index, compiled


def acceptance_table(A: CTA, max_depth: int) -> List[bool]:
    """Acceptance of every ground term up to ``max_depth``, in enumeration order."""
    index, compiled = _compile(A)
    finals = frozenset(index[q] for q in A.finals)
    reached: List[FrozenSet[int]] = []
    table: List[bool] = []
    for layer in ground_layers(A.signature.funs, max_depth):
        for t, idx in layer:
            out = set()
            for combo in itertools.product(*(reached[i] for i in idx)):
                for r, _, target in compiled.get((t.symbol, combo), ()):
                    if target not in out and holds_on(A.structure, t, r.constraint):
                        out.add(target)
            reached.append(frozenset(out))
            table.append(bool(out & finals))
    return table


def check_by_enumeration(
    A: CTA,
    max_depth: int,
    oracle: Optional[Callable[[Term], bool]] = None,
    limit: int = 20,
) -> Report:
    """Check every ground term up to ``max_depth``.

    Each term must reach exactly one state, every rule whose children match
    must only mention interpretable positions of the term, and acceptance
    must agree with ``oracle`` when one is given.
    """
    rep = Report("enumeration" + (" vs oracle" if oracle else ""))
    index, compiled = _compile(A)
    finals = frozenset(index[q] for q in A.finals)
    reached: List[FrozenSet[int]] = []

    def flag(kind: str, msg: str, t: Term) -> None:
        rep.counts[kind] = rep.counts.get(kind, 0) + 1
        if rep.counts[kind] <= limit:
            rep.violations.append(Violation(kind, msg, True, t))

    for layer in ground_layers(A.signature.funs, max_depth):
        states_of_layer = []
        for t, idx in layer:
            kids = [reached[i] for i in idx]
            out: Set[int] = set()
            applicable = [
                rule
                for combo in itertools.product(*kids)
                for rule in compiled.get((t.symbol, combo), ())
            ]
            for r, where, target in applicable:
                for pos in where:
                    if not has_position(t, pos) or not is_interpreted_ground(subterm(t, pos)):
                        flag("constraint-incomplete", f"{r!r} applied to {t!r} mentions @{format_position(pos)}", t)
                if target not in out and holds_on(A.structure, t, r.constraint):
                    out.add(target)
            rep.checked += 1
            if len(out) > 1:
                names = sorted(A.states[i].name for i in out)
                flag("nondeterministic", f"{t!r} reaches {names}", t)
            elif not out:
                flag("incomplete", f"{t!r} reaches no state", t)
            if oracle is not None:
                got = bool(out & finals)
                want = bool(oracle(t))
                if got != want:
                    flag("oracle-mismatch", f"{t!r}: automaton {'accepts' if got else 'rejects'}, oracle says {want}", t)
            states_of_layer.append(frozenset(out))
        reached.extend(states_of_layer)
    return rep


def check_label_soundness(A: CTA, max_depth: int) -> Report:
    """Every enumerated term matches the label of the state it reaches."""
    rep = Report("label soundness")
    if not A.labeled:
        rep.skipped = "automaton has unlabeled states"
        return rep
    for layer in ground_layers(A.signature.funs, max_depth):
        for t, _ in layer:
            rep.checked += 1
            for q in reachable_states(A, t):
                if not pattern_leq(q.label, t):
                    rep.violations.append(Violation("label", f"{t!r} reaches {q!r} labeled {q.label!r}", True, t))
    return rep
