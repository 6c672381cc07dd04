from __future__ import annotations

import itertools

import pytest

from artinglue import fixtures as fx
from artinglue.category import LexFunctor
from artinglue.errors import DomainMismatch, InvalidMorphism, NotLex
from artinglue.extensions import AdjointSplitExtension, associated_nat, glueing_extension
from artinglue.glueing import (
    GlueingCategory,
    GlObj,
    cartesian_lift,
    check_cartesian,
    gl_objects,
    gl_probes,
    glue_construct,
    phi,
    phi_inverse,
    pullback_representation_check,
)
from artinglue.laws import check_adjunction, check_category, check_functor, check_nat_iso

FINSET = fx.FINSET
H = fx.default_probes_for(FINSET)
FUNCTORS = fx.fixture_functors()


def powerset_functor(nonempty: bool = False) -> LexFunctor:
    """Covariant direct image; never preserves pullbacks, and preserves 1 only without the empty subset."""

    def on_obj(x):
        elems = x["*"].elements
        start = 1 if nonempty else 0
        return fx.fset([frozenset(s) for r in range(start, len(elems) + 1) for s in itertools.combinations(elems, r)])

    def on_mor(f):
        src, tgt = on_obj(f.src), on_obj(f.tgt)
        return fx.fmap(src, tgt, {s: frozenset(f["*"](x) for x in s) for s in src["*"]})

    return LexFunctor(FINSET, FINSET, on_obj, on_mor, name="P⁺" if nonempty else "P")


@pytest.mark.parametrize("kind", list(FUNCTORS))
def test_object_count_matches_formula(kind):
    F = FUNCTORS[kind]
    gl = glue_construct(F).category
    objs = gl_objects(gl, H.objects, H.objects, include_terminal=False)
    # one object per map n -> F(h): |F(h)|^|n|
    assert len(objs) == sum(len(F.obj(h)["*"]) ** len(n["*"]) for h in H.objects for n in H.objects)


@pytest.mark.parametrize("kind", list(FUNCTORS))
def test_hom_matches_square_oracle(kind):
    F = FUNCTORS[kind]
    gl = glue_construct(F).category
    objs = gl_objects(gl, H.objects[:3], H.objects[:3])
    for a in objs:
        for b in objs:
            brute = sum(
                1
                for f in FINSET.hom(a.n, b.n)
                for g in FINSET.hom(a.h, b.h)
                if FINSET.compose(F.mor(g), a.ell) == FINSET.compose(b.ell, f)
            )
            assert len(gl.hom(a, b)) == brute


@pytest.mark.parametrize("kind", list(FUNCTORS))
def test_glueing_is_a_lex_category_with_adjoint_projections(kind):
    F = FUNCTORS[kind]
    glue = glue_construct(F)
    probes = gl_probes(glue.category, H, H, max_objects=30)
    assert check_category(glue.category, probes, budget=200).passed
    assert check_adjunction(glue.pi2_adjunction, probes, H).passed
    assert check_adjunction(glue.pi1_adjunction, probes, H).passed
    for p in (glue.pi1, glue.pi2, glue.pi1_star, glue.pi2_star):
        src_probes = probes if p in (glue.pi1, glue.pi2) else H
        assert check_functor(p, src_probes, budget=150).passed
    assert all(glue.eps[h] == FINSET.identity(h) for h in H.objects)


def test_validated_construction():
    gl = glue_construct(FUNCTORS["identity"]).category
    two, one = fx.fset(2), fx.fset(1)
    with pytest.raises(DomainMismatch):
        gl.obj(two, one, FINSET.identity(two))
    a = gl.obj(two, two, FINSET.identity(two))
    b = gl.obj(two, two, fx.fmap(two, two, (1, 0)))
    with pytest.raises(InvalidMorphism):
        gl.mor(a, b, FINSET.identity(two), FINSET.identity(two))
    assert gl.mor(a, b, fx.fmap(two, two, (1, 0)), FINSET.identity(two)).src == a


def test_non_lex_functor_is_refused():
    P = powerset_functor()
    with pytest.raises(NotLex):
        glue_construct(P, probes=H)
    with pytest.raises(NotLex):
        GlueingCategory(P)
    Q = powerset_functor(nonempty=True)
    gl = GlueingCategory(Q)
    two = fx.fset(2)
    x = GlObj(FINSET.initial(), two, FINSET.from_initial(Q.obj(two)))
    m = gl.mor(x, gl.terminal(), FINSET.from_initial(gl.terminal().n), FINSET.to_terminal(two))
    with pytest.raises(NotLex):
        gl.pullback(m, m)


def test_pushouts_and_initial_are_componentwise():
    gl = glue_construct(FUNCTORS["square"]).category
    z = gl.initial()
    assert len(z.n["*"]) == 0 and len(z.h["*"]) == 0
    objs = gl_objects(gl, H.objects[:3], H.objects[:3])
    a = objs[5]
    m = gl.from_initial(a)
    cocone = gl.pushout(m, m)
    assert gl.contains(cocone.apex)
    i1, i2 = cocone.injections
    assert gl.compose(i1, m) == gl.compose(i2, m)


@pytest.mark.parametrize("kind", list(FUNCTORS))
def test_cartesian_lifts(kind):
    glue = glue_construct(FUNCTORS[kind])
    probes = gl_probes(glue.category, H, H, max_objects=20)
    for which in ("pi1", "pi2"):
        proj = glue.pi1 if which == "pi1" else glue.pi2
        for target in probes.objects:
            for f in H.morphisms:
                if FINSET.cod(f) != proj.obj(target):
                    continue
                lift = cartesian_lift(glue, which, target, f)
                assert proj.mor(lift) == f and lift.tgt == target
                assert check_cartesian(glue, which, lift, probes).passed


@pytest.mark.parametrize(
    "topos,U",
    [(t, U) for t in (fx.FINSET, fx.FINSET2, fx.SIERP) for U in t.subterminals()],
    ids=lambda v: getattr(v, "name", None),
)
def test_phi_and_inverse_round_trip(topos, U):
    ext = AdjointSplitExtension.from_subterminal(topos, U)
    m = phi(ext)
    assert m.verify().passed
    inv = phi_inverse(ext)
    assert check_nat_iso(inv.unit, ext.probes().G).passed
    assert check_nat_iso(inv.counit, m.target.probes().G).passed
    a = associated_nat(m)
    assert all(a[h] == ext.N.identity(a.source.obj(h)) for h in ext.probes().H.objects)


def test_phi_of_a_glueing_is_identity_like():
    ext = glueing_extension(FUNCTORS["square"])
    m = phi(ext)
    assert m.verify().passed


@pytest.mark.parametrize(
    "topos,U",
    [(t, U) for t in (fx.FINSET, fx.FINSET2, fx.SIERP) for U in t.subterminals()],
    ids=lambda v: getattr(v, "name", None),
)
def test_pullback_representation(topos, U):
    rep = pullback_representation_check(topos, U, fx.default_probes_for(topos))
    assert rep.passed, str(rep)
