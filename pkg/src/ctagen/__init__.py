"""Constrained tree automata for ground instances of constrained terms."""

from .automaton import (
    CTA,
    State,
    TransitionRule,
    accepts,
    acceptance_table,
    check_by_enumeration,
    check_complete_static,
    check_constraint_complete_static,
    check_deterministic_static,
    reachable_states,
    run_det,
)
from .builder import build, labels, labels_tilde, prune_dead_rules, trim
from .fileformat import parse_automaton, parse_problem, render_automaton
from .logic import S_INT, S_INTSUCC, S_NAT, holds_on
from .patterns import ConstrainedPattern, ConstrainedTerm, g_member, less_generalized, replace_set
from .product import emptiness_sufficient, intersection_check, product
from .solver import entails, equivalent, sat, valid
from .terms import BLACK, BOX, App, Signature, Symbol, Var, enumerate_ground, posvar

__version__ = "0.1.0"
