from __future__ import annotations

import pytest

from artinglue import fixtures as fx
from artinglue.errors import BoundaryMismatch, EndMismatch, NotGlueingForm
from artinglue.ext_functor import (
    baer_colimit,
    check_coequalizer_universal,
    check_coproduct_universal,
    check_postcompose,
    check_precompose,
    collation_check,
    compositor_check,
    ext_bifunctor,
    ext_postcompose,
    ext_precompose,
    ext_two_mor,
    ext_two_mor_left,
    ext_two_mor_right,
    normalise,
    postcompose_comparison,
    two_mor_naturality,
    unitor_check,
)
from artinglue.category import whisker_left, whisker_right
from artinglue.extensions import AdjointSplitExtension, gamma_functor, glueing_extension, two_morphism_find
from artinglue.glueing import gl_objects, gl_probes

FINSET = fx.FINSET
H = fx.default_probes_for(FINSET)
H2 = fx.default_probes_for(fx.FINSET2)
Id, One, Sq, Diag = (fx.builtin_functor(k) for k in ("identity", "const_terminal", "square", "diagonal"))
ENDOS = [Id, One, Sq]


def glp(gl, n, h):
    return gl_probes(gl, n, h, max_objects=40)


@pytest.mark.parametrize("F", [Id, Sq], ids=lambda f: f.name)
@pytest.mark.parametrize("T", ENDOS, ids=lambda f: f.name)
def test_precomposition_is_a_pullback(F, T):
    ext = glueing_extension(F)
    pre = ext_precompose(T, ext)
    rep = check_precompose(pre, H, glp(ext.G, H, H), glp(pre.result.G, H, H))
    assert rep.passed, str(rep)


@pytest.mark.parametrize("F", [Id, Sq], ids=lambda f: f.name)
@pytest.mark.parametrize("S", ENDOS + [Diag], ids=lambda f: f.name)
def test_postcomposition_is_a_pushout(F, S):
    ext = glueing_extension(F)
    post = ext_postcompose(S, ext, H)
    rep = check_postcompose(post, H, H, glp(ext.G, H, H))
    assert rep.passed, str(rep)


def test_postcomposition_comparison_for_gamma_images():
    psi = fx.proj_nat(0)  # Sq -> Id gives Γ(Id) -> Γ(Sq)
    m = gamma_functor(psi, H)
    post = ext_postcompose(Sq, m.source)
    objs = gl_objects(m.source.G, H.objects, H.objects)
    assert postcompose_comparison(post, m, objs).passed


@pytest.mark.parametrize("T", ENDOS, ids=lambda f: f.name)
@pytest.mark.parametrize("S", ENDOS + [Diag], ids=lambda f: f.name)
def test_collation_for_identity_glueing(T, S):
    ext = glueing_extension(Id)
    rep = collation_check(T, S, ext, H, H, glp, H2 if S is Diag else H)
    assert rep.passed, str(rep)


def test_bifunctor_lands_on_the_composite():
    out = ext_bifunctor(Sq, One, glueing_extension(Id))
    assert all(FINSET.is_terminal(out.F.obj(h)) for h in H.objects)


def test_compositor_and_unitor():
    ext = glueing_extension(Id)
    assert compositor_check(Sq, One, ext, glp(ext.G, H, H)).passed
    assert unitor_check(ext, H).passed


def test_actions_need_glueing_form():
    ext = AdjointSplitExtension.from_subterminal(fx.FINSET2, fx.FINSET2.subterminal(["c0"]))
    with pytest.raises(NotGlueingForm):
        ext_precompose(Id, ext)
    assert normalise(ext).is_glueing_form
    with pytest.raises(BoundaryMismatch):
        ext_precompose(Diag, glueing_extension(Id))


@pytest.mark.parametrize("tau", [fx.diag_nat(), fx.bang(Id), fx.proj_nat(1), fx.swap_nat()], ids=lambda t: t.name)
def test_left_action_is_two_isomorphic_to_gamma(tau):
    ext = glueing_extension(Id)
    left = ext_two_mor_left(tau, ext)
    assert left.verify().passed
    found = two_morphism_find(left, gamma_functor(whisker_left(Id, tau)))
    assert found is not None and found.report.passed


@pytest.mark.parametrize("sigma", [fx.diag_nat(), fx.bang(Id), fx.proj_nat(0)], ids=lambda t: t.name)
def test_right_action_and_naturality(sigma):
    ext = glueing_extension(Id)
    right = ext_two_mor_right(sigma, ext)
    assert right.verify().passed
    assert ext_two_mor("right", sigma, ext).Psi.source is right.Psi.source
    m = gamma_functor(fx.bang(Id))
    assert two_mor_naturality("left", sigma, m)
    assert two_mor_naturality("right", sigma, m)
    assert whisker_right(sigma, Id).source.name


def test_baer_coproduct_is_gamma_of_square():
    cocone = baer_colimit("coproduct", glueing_extension(Id), glueing_extension(Id), probes=H)
    got = gl_objects(cocone.apex.G, H.objects, H.objects)
    assert got == gl_objects(glueing_extension(Sq).G, H.objects, H.objects)
    assert check_coproduct_universal(cocone, ENDOS, H.objects, H.morphisms).passed


def test_baer_coequalizer_and_pushout():
    m1, m2 = gamma_functor(fx.proj_nat(0)), gamma_functor(fx.proj_nat(1))
    co = baer_colimit("coequalizer", m1, m2, probes=H)
    assert check_coequalizer_universal(co, (m1, m2), ENDOS, H.objects, H.morphisms).passed
    # equalizer of the projections is the diagonal copy of the identity
    assert all(len(co.functor.obj(h)["*"]) == len(h["*"]) for h in H.objects)
    po = baer_colimit("pushout", m1, m2, probes=H)
    # pullback of p0, p1: pairs of pairs agreeing crosswise, i.e. X^3
    assert all(len(po.functor.obj(h)["*"]) == len(h["*"]) ** 3 for h in H.objects)


def test_baer_rejects_mismatched_ends():
    e = AdjointSplitExtension.from_subterminal(fx.FINSET2, fx.FINSET2.subterminal(["c0"]))
    with pytest.raises((EndMismatch, NotGlueingForm)):
        baer_colimit("coproduct", glueing_extension(Id), e)
    with pytest.raises(EndMismatch):
        baer_colimit("coequalizer", gamma_functor(fx.proj_nat(0)), gamma_functor(fx.diag_nat()))
