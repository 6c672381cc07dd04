from __future__ import annotations

from artinglue import fixtures as fx
from artinglue.category import Adjunction, LexFunctor, NatTrans, identity_functor
from artinglue.laws import Report, check_laws
from artinglue.subtopos import open_reflection, slice_probes

FINSET = fx.FINSET
H = fx.default_probes_for(FINSET)


def test_category_laws_hold_for_fixture_toposes():
    for topos in fx.TOPOSES.values():
        rep = check_laws("category", topos, fx.default_probes_for(topos))
        assert rep.passed, str(rep)


def test_fixture_functors_are_lex():
    for F in fx.fixture_functors().values():
        assert check_laws("functor", F, H).passed
    for kind in ("diagonal",):
        assert check_laws("functor", fx.builtin_functor(kind), H).passed
    G = fx.default_probes_for(fx.FINSET2)
    for kind in ("proj0", "proj1", "square2"):
        assert check_laws("functor", fx.builtin_functor(kind), G).passed


def test_broken_functor_is_reported_with_witness():
    # sends every morphism to an identity, which mistypes non-endomorphisms
    bad = LexFunctor(FINSET, FINSET, lambda x: x, lambda f: FINSET.identity(f.src), name="Bad")
    rep = check_laws("functor", bad, H)
    assert not rep.passed
    assert rep.failures[0].law == "typing" and rep.failures[0].witness is not None


def test_non_lex_functor_fails_terminal_preservation():
    # X ↦ X + 1 preserves pullbacks but not the terminal object
    def on_obj(x):
        return fx.fset([(0, a) for a in x["*"]] + [(1, 0)])

    def on_mor(f):
        src, tgt = on_obj(f.src), on_obj(f.tgt)
        return fx.fmap(src, tgt, {(0, a): (0, f["*"](a)) for a in f.src["*"]} | {(1, 0): (1, 0)})

    plus_one = LexFunctor(FINSET, FINSET, on_obj, on_mor, name="+1")
    rep = check_laws("functor", plus_one, H)
    laws = {r.law: r.passed for r in rep.results}
    assert laws["preserves identities"] and laws["preserves composition"] and laws["preserves pullbacks"]
    assert not laws["preserves terminal"]


def test_unnatural_transformation_is_caught():
    Id = fx.builtin_functor("identity")

    def comp(x):
        elems = x["*"]
        if len(elems) == 0:
            return FINSET.identity(x)
        return fx.fmap(x, x, tuple(elems.elements[0] for _ in elems))

    rep = check_laws("nat", NatTrans(Id, Id, comp, name="const"), H)
    assert not rep.passed and rep.failures[0].witness is not None


def test_adjunction_dispatch_and_broken_unit():
    U = fx.FINSET2.subterminal(["c0"])
    refl = open_reflection(fx.FINSET2, U)
    G = fx.default_probes_for(fx.FINSET2)
    S = slice_probes(refl, G)
    assert check_laws("adjunction", refl.adjunction, (G, S)).passed
    # Id ⊣ Id with a non-identity unit breaks a triangle
    Id = identity_functor(FINSET)
    swapish = NatTrans(Id, Id, lambda x: FINSET.identity(x), "η")
    wrong = NatTrans(Id, Id, lambda x: _shift(x), "ε")
    rep = check_laws("adjunction", Adjunction(Id, Id, swapish, wrong, "bad"), H)
    assert not rep.passed


def _shift(x):
    elems = x["*"].elements
    if len(elems) < 2:
        return FINSET.identity(x)
    return fx.fmap(x, x, elems[1:] + elems[:1])


def test_limit_cone_target():
    two = fx.fset(2)
    f = fx.fmap(two, fx.fset(1), (0, 0))
    assert check_laws("limit_cone", (FINSET, f, f), H).passed


def test_unknown_target_fails_cleanly():
    rep = check_laws("monad", None, H)
    assert not rep.passed and isinstance(rep, Report)


def test_report_rendering():
    rep = Report("demo")
    rep.add("holds", True, 3)
    rep.add("breaks", False, 1, ("x", 1))
    text = str(rep)
    assert "FAIL" in text and "witness=('x', 1)" in text
    d = rep.as_dict()
    assert d["passed"] is False and d["results"][1]["witness"] == "('x', 1)"
