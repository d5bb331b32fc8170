import itertools

import pytest

from ctagen.automaton import acceptance_table, check_label_soundness
from ctagen.builder import build
from ctagen.logic import S_NAT
from ctagen.patterns import g_member
from ctagen.product import EMPTY, NONEMPTY, UNKNOWN, emptiness_sufficient, intersection_check, product

from helpers import CORPUS, built, ct, signature

SIG = signature(S_NAT, f=1)
NONPOS = [ct(S_NAT, "f(x) [ x <= 0 ]", f=1)]
POS = [ct(S_NAT, "f(x) [ !(x <= 0) ]", f=1)]
FSUCC = [ct(S_NAT, "f(s(x))", f=1)]


def test_contradictory_constraints_are_empty():
    assert intersection_check(S_NAT, NONPOS, POS, signature=SIG).status == EMPTY


def test_pruning_decides_structural_contradiction():
    A = build(S_NAT, NONPOS, SIG).cta
    B = build(S_NAT, FSUCC, SIG).cta
    assert intersection_check(S_NAT, NONPOS, FSUCC, signature=SIG).status == EMPTY
    assert emptiness_sufficient(product(A, B)) == EMPTY


def test_same_set_is_nonempty_with_checked_witness():
    v = intersection_check(S_NAT, NONPOS, NONPOS, signature=SIG)
    assert v.status == NONEMPTY
    assert g_member(S_NAT, NONPOS, v.witness)
    assert str(v) == f"NONEMPTY({v.witness!r})"


def test_empty_side():
    assert intersection_check(S_NAT, [], NONPOS, signature=SIG).status == EMPTY


def test_unknown_when_search_is_too_shallow():
    deep = [ct(S_NAT, "f(f(f(f(x))))", f=1)]
    v = intersection_check(S_NAT, deep, deep, search_depth=3, signature=SIG)
    assert v.status == UNKNOWN


def _pairs():
    by_sig = {}
    for c in CORPUS:
        if c.name == "example1":
            continue
        by_sig.setdefault((c.structure, c.signature.funs), []).append(c)
    for group in by_sig.values():
        yield from itertools.combinations_with_replacement(group, 2)


@pytest.mark.parametrize("pair", list(_pairs()), ids=lambda p: f"{p[0].name}*{p[1].name}")
def test_product_language_is_intersection(pair):
    a, b = pair
    A, B = built(a.name).cta, built(b.name).cta
    P = product(A, B)
    got = acceptance_table(P, 4)
    want = [x and y for x, y in zip(acceptance_table(A, 4), acceptance_table(B, 4))]
    assert got == want
    if emptiness_sufficient(P) == EMPTY:
        assert not any(got)
    # product states carry the meets of their component labels
    assert check_label_soundness(P, 3).ok
