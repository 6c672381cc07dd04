from __future__ import annotations

import pytest

from artinglue import fixtures as fx
from artinglue.category import const_terminal, functor_compose, identity_functor
from artinglue.errors import NotSubterminal, NotZeroComposite
from artinglue.laws import check_adjunction, check_functor
from artinglue.subtopos import (
    closed_reflection,
    cokernel_of,
    kernel_of,
    kernel_probes,
    open_reflection,
    slice_probes,
    zero_check,
)

from test_presheaf import brute_hom_count

CASES = [(t, U) for t in (fx.FINSET, fx.FINSET2, fx.SIERP) for U in t.subterminals()]
IDS = [f"{t.name}-{'+'.join(t.support(U)) or 'empty'}" for t, U in CASES]


@pytest.mark.parametrize("topos,U", CASES, ids=IDS)
def test_open_reflection_adjunction_and_counit(topos, U):
    refl = open_reflection(topos, U)
    G = fx.default_probes_for(topos)
    S = slice_probes(refl, G)
    assert check_adjunction(refl.adjunction, G, S).passed
    assert check_functor(refl.E, G).passed
    assert check_functor(refl.E_star, S).passed
    assert all(topos.is_iso(refl.epsilon[h]) for h in S.objects)


@pytest.mark.parametrize("topos,U", CASES, ids=IDS)
def test_direct_image_matches_hom_oracle(topos, U):
    # E*(H)(c) ≅ Hom(y(c) × U, H) by the Yoneda lemma and the adjunction
    refl = open_reflection(topos, U)
    S = slice_probes(refl, fx.default_probes_for(topos))
    for H in S.objects:
        EH = refl.E_star.obj(H)
        for c in topos.base.objects:
            yc_u = topos.product(topos.yoneda(c), U).apex
            assert len(EH[c]) == brute_hom_count(yc_u, H)


@pytest.mark.parametrize("topos,U", CASES, ids=IDS)
def test_closed_reflection_adjunction_and_sizes(topos, U):
    cl = closed_reflection(topos, U)
    G = fx.default_probes_for(topos)
    assert check_adjunction(cl.adjunction, G, kernel_probes(cl, G)).passed
    support = set(topos.support(U))
    for X in G.objects:
        KX = cl.K_star.obj(X)
        for c in topos.base.objects:
            assert len(KX[c]) == (1 if c in support else len(X[c]))
        assert cl.kernel.contains(KX)
        assert cl.kernel.contains(X) == all(len(X[c]) == 1 for c in support)
    for N in kernel_probes(cl, G).objects:
        assert topos.is_iso(cl.delta[N])
    assert cl.kernel.initial() == U
    assert cl.p1(G.objects[0]).src == U


def test_reflections_reject_non_subterminals():
    with pytest.raises(NotSubterminal):
        open_reflection(fx.FINSET, fx.fset(2))
    with pytest.raises(NotSubterminal):
        closed_reflection(fx.FINSET, fx.fset(2))


def test_zero_check():
    G = fx.default_probes_for(fx.FINSET)
    assert zero_check(fx.builtin_functor("const_terminal"), G)
    v = zero_check(fx.builtin_functor("identity"), G)
    assert not v and v.witness is not None


@pytest.mark.parametrize("topos,U", CASES, ids=IDS)
def test_kernel_of_cokernel_is_the_closed_part(topos, U):
    cl = closed_reflection(topos, U)
    cok = cokernel_of(cl.K)
    assert cok.U == U
    ker = kernel_of(cok.E)
    G = fx.default_probes_for(topos)
    assert all(ker.category.contains(X) == cl.kernel.contains(X) for X in G.objects)


def test_factorizer_through_the_cokernel():
    topos = fx.FINSET2
    U = topos.subterminal(["c0"])
    cl = closed_reflection(topos, U)
    cok = cokernel_of(cl.K)
    G = fx.default_probes_for(topos)
    testers = [cok.E, const_terminal(topos, topos), const_terminal(topos, fx.FINSET), functor_compose(cok.reflection.E_star, cok.E)]
    for T in testers:
        fac = cok.factorizer(T, G)
        assert fac.report.passed, str(fac.report)
        for X in G.objects:
            assert T.target.is_iso(fac.iso[X])
    with pytest.raises(NotZeroComposite):
        cok.factorizer(identity_functor(topos), G)


def test_kernel_factorization():
    topos = fx.FINSET2
    U = topos.subterminal(["c0"])
    refl = open_reflection(topos, U)
    cl = closed_reflection(topos, U)
    ker = kernel_of(refl.E)
    G = fx.default_probes_for(topos)
    T = ker.factor(functor_compose(cl.K, cl.K_star), G)
    assert all(ker.category.contains(T.obj(X)) for X in G.objects)
    with pytest.raises(NotZeroComposite):
        ker.factor(identity_functor(topos), G)
