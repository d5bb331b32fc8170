"""Build the CTA recognizing the ground instances of a set of constrained terms."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .automaton import CTA, State, TransitionRule, accessible_states, add_rule
from .logic import Structure, Var, disj, positional_free_vars, substitute
from .patterns import (
    ConstrainedPattern,
    ConstrainedTerm,
    cp_leq,
    in_tbox,
    less_generalized,
    pattern_leq,
    pattern_size,
    proper_subpatterns,
    replace_set,
)
from .solver import sat, valid
from .terms import (
    BLACK,
    BOX,
    App,
    Signature,
    Symbol,
    Term,
    Wild,
    has_position,
    positions,
    replace_at,
    subterm,
    symbols_of,
)


class BuildError(ValueError):
    pass


class InvariantError(AssertionError):
    """An internal property of the construction failed to hold."""


DEFAULT_TUPLE_BUDGET = 10**6


@dataclass(frozen=True)
class BuildArtifacts:
    replace: Tuple[ConstrainedPattern, ...]
    proper_subpatterns: Tuple[Term, ...]
    labels: Tuple[ConstrainedPattern, ...]
    labels_tilde: Tuple[ConstrainedPattern, ...]
    q0: Tuple[Term, ...]
    cta: CTA


def signature_for(S: Structure, T: Iterable[ConstrainedTerm], extra: Iterable[Symbol] = ()) -> Signature:
    funs = set(S.symbols) | set(extra)
    for ct in T:
        for sym in symbols_of(ct.term):
            if sym.interpreted and sym not in S.symbols:
                raise BuildError(f"{sym} is not a symbol of structure {S.name}")
            funs.add(sym)
    return Signature(tuple(funs), S.name)


def labels(S: Structure, T: Sequence[ConstrainedTerm]) -> List[ConstrainedPattern]:
    return less_generalized(S, replace_set(T))


def labels_tilde(S: Structure, T: Sequence[ConstrainedTerm], lab: Optional[Sequence[ConstrainedPattern]] = None):
    rep = replace_set(T)
    lab = labels(S, T) if lab is None else lab
    return [cp for cp in lab if any(cp_leq(S, r, cp) for r in rep)]


def _sort_key(u: Term):
    return (pattern_size(u), repr(u))


class _Order:
    """cp_leq on label indices, memoized."""

    def __init__(self, S: Structure, U: Sequence[ConstrainedPattern]):
        self.S = S
        self.U = U
        self.memo: Dict[Tuple[int, int], bool] = {}

    def __call__(self, i: int, j: int) -> bool:
        key = (i, j)
        got = self.memo.get(key)
        if got is None:
            got = cp_leq(self.S, self.U[i], self.U[j])
            self.memo[key] = got
        return got


def build(
    S: Structure,
    T: Sequence[ConstrainedTerm],
    signature: Optional[Signature] = None,
    tuple_budget: int = DEFAULT_TUPLE_BUDGET,
    check_invariants: bool = True,
) -> BuildArtifacts:
    T = list(T)
    sig = signature or signature_for(S, T)
    for ct in T:
        for sym in symbols_of(ct.term):
            if sym not in sig:
                raise BuildError(f"{sym} does not belong to the signature")

    rep = replace_set(T)
    subpats = proper_subpatterns(rep)
    lab = labels(S, T)
    order = _Order(S, lab)
    tilde_idx = {
        i for i, cp in enumerate(lab) if any(cp_leq(S, r, cp) for r in rep)
    }
    lab_tilde = [lab[i] for i in sorted(tilde_idx)]

    q0_patterns: List[Term] = []
    for cp in lab:
        u = cp.pattern
        if u not in q0_patterns and any(pattern_leq(w, u) for w in subpats):
            q0_patterns.append(u)
    q0_set = set(q0_patterns)

    # states are keyed by (label, tilde) and named once all are known
    keys: Set[Tuple[Term, bool]] = {(BOX, False), (BLACK, False)}
    final_keys: Set[Tuple[Term, bool]] = set()
    for cp in lab_tilde:
        if cp.pattern in q0_set:
            final_keys.add((cp.pattern, True))
    for r in rep:
        if r.pattern not in q0_set:
            final_keys.add((BOX if in_tbox(r.pattern) else BLACK, True))
    keys |= final_keys
    # every Q0 candidate keeps its plain state: a term can match u without
    # being accepted, and dropping q_u would leave it with no rule
    keys |= {(u, False) for u in q0_patterns}

    ordered = sorted(keys, key=lambda k: (k[1], _sort_key(k[0])))
    states = {k: State(f"q{i}", k[0], k[1]) for i, k in enumerate(ordered)}

    arity = sig.max_arity
    if len(states) ** arity > tuple_budget:
        raise BuildError(
            f"{len(states)} states and arity {arity} exceed the tuple budget of {tuple_budget}"
        )

    def route(i: int) -> State:
        cp = lab[i]
        tilde = i in tilde_idx
        if cp.pattern in q0_set:
            return states[(cp.pattern, tilde)]
        return states[(BOX if in_tbox(cp.pattern) else BLACK, tilde)]

    rules: List[TransitionRule] = []
    state_list = [states[k] for k in ordered]
    maximal_cache: Dict[Term, List[int]] = {}
    for sym in sig.funs:
        for kids in itertools.product(state_list, repeat=sym.arity):
            target_pattern = App(sym, [k.label for k in kids])
            best = maximal_cache.get(target_pattern)
            if best is None:
                best = _maximal_indices(order, target_pattern)
                if check_invariants:
                    _check_partition(S, [lab[i] for i in best], target_pattern)
                maximal_cache[target_pattern] = best
            if not best:
                raise InvariantError(f"no label is more general than {target_pattern!r}")
            for i in best:
                add_rule(S, rules, TransitionRule(sym, kids, lab[i].constraint, route(i)))

    cta = CTA(sig, S, tuple(state_list), frozenset(states[k] for k in final_keys), tuple(rules))
    return BuildArtifacts(tuple(rep), tuple(subpats), tuple(lab), tuple(lab_tilde), tuple(q0_patterns), cta)


def _maximal_indices(order: _Order, u: Term) -> List[int]:
    U = order.U
    below = [i for i, cp in enumerate(U) if pattern_leq(cp.pattern, u)]
    best = []
    for i in below:
        if not any(order(i, j) and not order(j, i) for j in below if j != i):
            # drop equivalent duplicates, keeping the first
            if not any(order(i, k) and order(k, i) for k in best):
                best.append(i)
    return best


def _check_partition(S: Structure, M: Sequence[ConstrainedPattern], u: Term) -> None:
    if not M:
        return
    if not valid(S, disj(*(cp.constraint for cp in M))):
        raise InvariantError(f"maximal labels for {u!r} do not cover every assignment")
    for a, b in itertools.combinations(M, 2):
        if sat(S, a.constraint & b.constraint).sat:
            raise InvariantError(f"maximal labels {a!r} and {b!r} for {u!r} overlap")


# -- post-processing ------------------------------------------------------------------


def trim(A: CTA) -> CTA:
    """Drop states no rule can reach (constraints ignored) and their rules."""
    keep = accessible_states(A)
    states = tuple(q for q in A.states if q in keep)
    rules = tuple(r for r in A.rules if r.target in keep and all(c in keep for c in r.children))
    return CTA(A.signature, A.structure, states, frozenset(q for q in A.finals if q in keep), rules)


def structural_substitution(rule: TransitionRule) -> Dict[Var, Term]:
    """Refine position variables using what the child labels guarantee.

    A variable at position p whose subpattern in ``f(labels)`` is a
    non-wildcard interpretable pattern w becomes w, with each box of w at
    relative position r turned into the variable for p.r.
    """
    pat = App(rule.symbol, [c.label for c in rule.children])
    theta: Dict[Var, Term] = {}
    for pos in positional_free_vars(rule.constraint):
        if not has_position(pat, pos):
            continue
        w = subterm(pat, pos)
        if isinstance(w, Wild) or not in_tbox(w):
            continue
        for rel in positions(w):
            if subterm(w, rel) == BOX:
                w = replace_at(w, rel, Var(pos + rel))
        theta[Var(pos)] = w
    return theta


def is_dead(A: CTA, rule: TransitionRule) -> bool:
    theta = structural_substitution(rule)
    if not theta:
        return False
    return not sat(A.structure, substitute(rule.constraint, theta)).sat


def prune_dead_rules(A: CTA) -> CTA:
    """Delete rules whose refined constraint is unsatisfiable, then trim."""
    if not A.labeled:
        raise BuildError("pruning needs labeled states")
    return trim(A.with_rules(r for r in A.rules if not is_dead(A, r)))
