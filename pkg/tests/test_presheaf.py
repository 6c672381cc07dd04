from __future__ import annotations

import itertools

import pytest
from hypothesis import given, strategies as st

from artinglue import fixtures as fx
from artinglue.errors import DomainMismatch, NotSubterminal, ShapeMismatch
from artinglue.finset import FinFn, FinSet, fs_compose
from artinglue.laws import check_pullback_cone
from artinglue.presheaf import FiniteBaseCategory, PresheafTopos, make_mor, psh_limits_colimits, subterminal_enumerate

TOPOSES = [fx.FINSET, fx.FINSET2, fx.SIERP]


def brute_hom_count(X, Y) -> int:
    """Count natural families by trying every tuple of component functions."""
    base = X.base
    options = [list(itertools.product(Y.at[i].elements, repeat=len(X.at[i]))) for i in range(len(base.objects))]
    count = 0
    for choice in itertools.product(*options):
        maps = [dict(zip(X.at[i].elements, choice[i])) for i in range(len(base.objects))]
        ok = True
        for u in base.non_identity:
            a, b = base.object_index[base.src[u]], base.object_index[base.tgt[u]]
            rx, ry = X.restrict(u), Y.restrict(u)
            if any(ry(maps[b][x]) != maps[a][rx(x)] for x in X.at[b]):
                ok = False
                break
        count += ok
    return count


def brute_presheaf_count(base: FiniteBaseCategory, size: int) -> int:
    """Presheaves with components {0..k-1}, k <= size, checked against the composition table."""
    total = 0
    for dims in itertools.product(range(size + 1), repeat=len(base.objects)):
        n = dict(zip(base.objects, dims))
        gens = base.non_identity
        spaces = [list(itertools.product(range(n[base.src[u]]), repeat=n[base.tgt[u]])) for u in gens]
        for choice in itertools.product(*spaces):
            r = dict(zip(gens, choice))
            ok = all(
                tuple(r[f][r[g][x]] for x in range(n[base.tgt[g]])) == r[h]
                for (g, f), h in base.table.items()
                if g in gens and f in gens
            )
            total += ok
    return total


def brute_sieve_count(base: FiniteBaseCategory) -> int:
    objs = base.objects
    return sum(
        1
        for r in range(len(objs) + 1)
        for s in itertools.combinations(objs, r)
        if all(base.src[u] in s for u in base.non_identity if base.tgt[u] in s)
    )


@pytest.mark.parametrize("topos", TOPOSES, ids=lambda t: t.name)
def test_default_probe_sizes_match_enumeration(topos):
    probes = fx.default_probes_for(topos)
    assert len(probes.objects) == brute_presheaf_count(topos.base, 2) + 1
    want = sum(brute_hom_count(X, Y) for X in probes.objects for Y in probes.objects)
    assert len(probes.morphisms) == want


@pytest.mark.parametrize("topos", TOPOSES, ids=lambda t: t.name)
def test_subterminal_count_matches_sieves(topos):
    assert len(topos.subterminals()) == brute_sieve_count(topos.base)
    assert all(topos.is_subterminal(u) for u in subterminal_enumerate(topos.base))


def test_subterminal_support_must_be_downward_closed():
    with pytest.raises(NotSubterminal):
        fx.SIERP.subterminal(["b"])
    assert fx.SIERP.support(fx.SIERP.subterminal(["a"])) == ("a",)


def test_base_rejects_non_associative_table():
    # a monoid-like loop where composition is not associative
    with pytest.raises(ShapeMismatch):
        FiniteBaseCategory(
            "bad",
            ["x"],
            [("e", "x", "x"), ("f", "x", "x")],
            {("e", "e"): "f", ("e", "f"): "e", ("f", "e"): "f", ("f", "f"): "f"},
        )


def test_base_needs_every_composite():
    with pytest.raises(ShapeMismatch):
        FiniteBaseCategory("gap", ["x", "y", "z"], [("u", "x", "y"), ("v", "y", "z")])


def test_presheaf_functoriality_is_checked():
    base = FiniteBaseCategory("two", ["x", "y", "z"], [("u", "x", "y"), ("v", "y", "z"), ("w", "x", "z")], {("v", "u"): "w"})
    topos = PresheafTopos(base)
    at = {"x": [0, 1], "y": [0], "z": [0]}
    with pytest.raises(ShapeMismatch):
        topos.presheaf(at, {"u": {0: 0}, "v": {0: 0}, "w": {0: 1}})
    assert topos.presheaf(at, {"u": {0: 1}, "v": {0: 0}, "w": {0: 1}})["x"] == FinSet.range(2)


def test_unnatural_morphism_rejected():
    S = fx.SIERP
    X = S.presheaf({"a": [0, 1], "b": [0]}, {"u": {0: 0}})
    with pytest.raises(ShapeMismatch):
        make_mor(X, X, {"a": {0: 1, 1: 0}, "b": {0: 0}})
    with pytest.raises(DomainMismatch):
        make_mor(X, S.terminal(), [FinFn.identity(X["a"]), FinFn.identity(X["b"])])


@pytest.mark.parametrize("topos", TOPOSES, ids=lambda t: t.name)
def test_yoneda_counts(topos):
    probes = fx.default_probes_for(topos)
    for c in topos.base.objects:
        y = topos.yoneda(c)
        for X in probes.objects:
            assert len(topos.hom(y, X)) == len(X[c])


@st.composite
def sierpinski_presheaves(draw, max_size: int = 3):
    a = draw(st.integers(0, max_size))
    b = draw(st.integers(0, max_size))
    if a == 0 and b > 0:
        b = 0
    table = {y: draw(st.integers(0, a - 1)) for y in range(b)}
    return fx.SIERP.presheaf({"a": range(a), "b": range(b)}, {"u": table})


@st.composite
def sierpinski_maps(draw, src=None, tgt=None):
    S = fx.SIERP
    X = src if src is not None else draw(sierpinski_presheaves())
    Y = tgt if tgt is not None else draw(sierpinski_presheaves())
    homs = S.hom(X, Y)
    if not homs and tgt is not None:
        X = S.initial()
    elif not homs:
        Y = S.terminal()
    homs = S.hom(X, Y)
    return draw(st.sampled_from(homs))


@given(st.data())
def test_pullbacks_are_pointwise_and_universal(data):
    S = fx.SIERP
    Z = data.draw(sierpinski_presheaves(2))
    f = data.draw(sierpinski_maps(tgt=Z))
    g = data.draw(sierpinski_maps(tgt=f.tgt))
    cone = S.pullback(f, g)
    for c in S.base.objects:
        assert len(cone.apex[c]) == sum(1 for x in f.src[c] for y in g.src[c] if f[c](x) == g[c](y))
    probes = fx.default_probes_for(S)
    assert check_pullback_cone(S, f, g, probes, cone=cone).passed


@given(st.data())
def test_pushouts_commute_and_comediate(data):
    S = fx.SIERP
    A = data.draw(sierpinski_presheaves(2))
    f = data.draw(sierpinski_maps(src=A))
    g = data.draw(sierpinski_maps(src=A))
    cocone = S.pushout(f, g)
    i1, i2 = cocone.injections
    assert S.compose(i1, f) == S.compose(i2, g)
    assert cocone.comediate((i1, i2)) == S.identity(cocone.apex)


@given(st.data())
def test_equalizer_and_coequalizer(data):
    S = fx.SIERP
    X = data.draw(sierpinski_presheaves(2))
    Y = data.draw(sierpinski_presheaves(2))
    homs = S.hom(X, Y)
    if not homs:
        return
    f = data.draw(st.sampled_from(homs))
    g = data.draw(st.sampled_from(homs))
    e = S.equalizer(f, g).legs[0]
    assert S.compose(f, e) == S.compose(g, e)
    q = S.coequalizer(f, g).injections[0]
    assert S.compose(q, f) == S.compose(q, g)


def test_initial_and_dispatch():
    for topos in TOPOSES:
        zero = topos.initial()
        assert all(len(s) == 0 for s in zero.at)
        X = fx.default_probes_for(topos).objects[-2]
        assert topos.from_initial(X).tgt == X
        assert psh_limits_colimits(topos, "terminal").apex == topos.terminal()
    f = fx.fmap(fx.fset(2), fx.fset(1), (0, 0))
    assert psh_limits_colimits(fx.FINSET, "pushout", f, f).apex == fx.FINSET.pushout(f, f).apex


@given(st.data())
def test_isos_invert(data):
    S = fx.SIERP
    X = data.draw(sierpinski_presheaves(2))
    for h in S.hom(X, X):
        if S.is_iso(h):
            assert S.compose(S.inverse(h), h) == S.identity(X)
        else:
            assert S.inverse_or_none(h) is None
    assert fs_compose(FinFn.identity(X["a"]), FinFn.identity(X["a"])) == FinFn.identity(X["a"])
