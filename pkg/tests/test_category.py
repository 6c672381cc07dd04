from __future__ import annotations

import pytest

from artinglue import fixtures as fx
from artinglue.category import (
    FullSubcategory,
    LexFunctor,
    NatTrans,
    ProbeSet,
    compose_functors,
    full_subcategory,
    functor_compose,
    hcompose,
    identity_functor,
    identity_nat,
    inclusion_functor,
    mate,
    nat_from_table,
    nat_inverse,
    product_category,
    vcompose,
    whisker_left,
    whisker_right,
)
from artinglue.errors import BoundaryMismatch, NotLimitClosed, ShapeMismatch
from artinglue.laws import check_category, check_functor
from artinglue.subtopos import open_reflection, slice_probes

FINSET = fx.FINSET
H = fx.default_probes_for(FINSET)


def test_composite_handles_are_shared():
    sq, one = fx.builtin_functor("square"), fx.builtin_functor("const_terminal")
    assert functor_compose(sq, one) is functor_compose(sq, one)
    assert FINSET.is_terminal(compose_functors(sq, sq, one).obj(fx.fset(3)))


def test_compose_rejects_mismatched_ends():
    with pytest.raises(BoundaryMismatch):
        functor_compose(fx.builtin_functor("proj0"), fx.builtin_functor("square"))


def test_nat_needs_parallel_functors():
    with pytest.raises(BoundaryMismatch):
        NatTrans(fx.builtin_functor("identity"), fx.builtin_functor("diagonal"), lambda x: None)


def test_probe_validation():
    x = fx.fset(1)
    with pytest.raises(ShapeMismatch):
        ProbeSet((x,), ()).validate(FINSET)
    ProbeSet.full(FINSET, [x]).validate(FINSET)


def test_probe_budget_keeps_identities_and_is_seeded():
    objs = list(H.objects)
    a = ProbeSet.full(FINSET, objs, budget=8, seed=3)
    b = ProbeSet.full(FINSET, objs, budget=8, seed=3)
    assert a == b and len(a.morphisms) == 8
    assert all(FINSET.identity(o) in a.morphisms for o in objs)


def test_interchange_law():
    a, b = fx.diag_nat(), fx.swap_nat()
    ba = vcompose(b, a)
    lhs = hcompose(ba, ba)
    rhs = vcompose(hcompose(b, b), hcompose(a, a))
    assert all(lhs[x] == rhs[x] for x in H.objects)


def test_whiskering_matches_horizontal_composition():
    a = fx.diag_nat()
    sq = fx.builtin_functor("square")
    left = whisker_left(sq, a)
    right = whisker_right(a, sq)
    h1 = hcompose(identity_nat(sq), a)
    h2 = hcompose(a, identity_nat(sq))
    assert all(left[x] == h1[x] for x in H.objects)
    assert all(right[x] == h2[x] for x in H.objects)


def test_nat_inverse_of_swap():
    s = fx.swap_nat()
    inv = nat_inverse(s)
    assert all(FINSET.compose(inv[x], s[x]) == FINSET.identity(fx.builtin_functor("square").obj(x)) for x in H.objects)


def test_nat_from_table_round_trip():
    d = fx.diag_nat()
    t = nat_from_table(d.source, d.target, {x: d[x] for x in H.objects})
    assert all(t[x] == d[x] for x in H.objects)


def test_mate_of_identity_is_identity():
    U = fx.FINSET2.subterminal(["c0"])
    refl = open_reflection(fx.FINSET2, U)
    adj = refl.adjunction
    G = fx.default_probes_for(fx.FINSET2)
    ident = identity_nat(adj.right)
    left = mate(adj, adj, ident, "left")
    assert all(left[x] == fx.FINSET2.identity(adj.left.obj(x)) for x in G.objects)
    back = mate(adj, adj, left, "right")
    assert all(back[h] == ident[h] for h in slice_probes(refl, G).objects)


def test_product_category_laws():
    P = product_category(FINSET, FINSET)
    objs = [(x, y) for x in H.objects[:3] for y in H.objects[:3]]
    assert check_category(P, ProbeSet.full(P, objs), budget=200).passed
    assert len(P.hom((fx.fset(2), fx.fset(1)), (fx.fset(2), fx.fset(2)))) == 4 * 2


def test_full_subcategory_closure():
    nonempty_or_one = FullSubcategory(FINSET, lambda X: len(X["*"]) != 0, "Nonempty")
    two = fx.fset(2)
    f = fx.fmap(two, two, (0, 0))
    g = fx.fmap(two, two, (1, 1))
    with pytest.raises(NotLimitClosed):
        nonempty_or_one.pullback(f, g)
    with pytest.raises(NotLimitClosed):
        full_subcategory(FINSET, lambda X: len(X["*"]) != 0, probes=H)


def test_inclusion_is_lex_on_a_closed_subcategory():
    small = FullSubcategory(FINSET, lambda X: len(X["*"]) <= 1, "Subterminals")
    probes = ProbeSet.full(small, [o for o in H.objects if small.contains(o)])
    assert check_functor(inclusion_functor(small), probes).passed


def test_identity_functor_is_lex():
    assert check_functor(identity_functor(FINSET), H).passed
    assert isinstance(identity_functor(FINSET), LexFunctor)
