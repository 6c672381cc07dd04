"""Shared concrete toposes, lex functors and natural transformations."""

from __future__ import annotations

from functools import lru_cache

from .category import LexFunctor, NatTrans, ProbeSet, const_terminal, identity_functor
from .errors import UnresolvedName
from .finset import FinFn, FinSet
from .presheaf import FiniteBaseCategory, Presheaf, PresheafMor, PresheafTopos

ONE = FiniteBaseCategory.one()
DISC2 = FiniteBaseCategory.discrete(2)
SIERPINSKI = FiniteBaseCategory.sierpinski()

FINSET = PresheafTopos(ONE, name="FinSet")
FINSET2 = PresheafTopos(DISC2, name="FinSet²")
SIERP = PresheafTopos(SIERPINSKI, name="Sierpiński")

TOPOSES = {"finset": FINSET, "finset2": FINSET2, "sierpinski": SIERP}

_PROBES: dict = {}


def default_probes_for(cat, size: int = 2) -> ProbeSet:
    """Exhaustive probes of a presheaf topos, memoised per category and size."""
    key = (id(cat), size)
    if key not in _PROBES:
        if not isinstance(cat, PresheafTopos):
            raise TypeError(f"no default probes for {cat!r}")
        _PROBES[key] = (cat, cat.default_probes(size))
    return _PROBES[key][1]


def fset(n_or_items) -> Presheaf:
    """A finite set as an object of ``FINSET``."""
    items = range(n_or_items) if isinstance(n_or_items, int) else n_or_items
    return FINSET.presheaf({"*": FinSet.of(items)})


def fmap(src: Presheaf, tgt: Presheaf, table) -> PresheafMor:
    """A function between ``FINSET`` objects from a dict or an image tuple."""
    a, b = src["*"], tgt["*"]
    fn = FinFn.from_dict(a, b, table) if isinstance(table, dict) else FinFn(a, b, tuple(table))
    return PresheafMor(src, tgt, (fn,))


def pair(x: Presheaf, y: Presheaf) -> Presheaf:
    """An object of ``FINSET2`` from two ``FINSET`` objects."""
    return FINSET2.presheaf({"c0": x["*"], "c1": y["*"]})


# -- functors ------------------------------------------------------------------------


def square_functor(topos: PresheafTopos) -> LexFunctor:
    """``X ↦ X × X``."""

    def on_mor(f):
        tgt = topos.product(f.tgt, f.tgt)
        src = topos.product(f.src, f.src)
        return tgt.mediate((topos.compose(f, src.legs[0]), topos.compose(f, src.legs[1])))

    return LexFunctor(topos, topos, lambda x: topos.product(x, x).apex, on_mor, name="Sq")


def restriction_functor(src: PresheafTopos, tgt: PresheafTopos, on_objects: dict, on_arrows: dict | None = None, name: str = "φ*") -> LexFunctor:
    """Precomposition with a base functor ``φ: tgt.base -> src.base``.

    ``on_objects``/``on_arrows`` give ``φ``; identities are filled in.
    """
    B, C = tgt.base, src.base
    arrows = {B.ids[o]: C.ids[on_objects[o]] for o in B.objects}
    arrows.update(on_arrows or {})
    for u in B.non_identity:
        if u not in arrows:
            raise UnresolvedName(f"{name}: no image for arrow {u}")

    def on_obj(X):
        at = {o: X[on_objects[o]] for o in B.objects}
        res = {u: X.restrict(arrows[u]) for u in B.non_identity}
        return tgt.presheaf(at, res)

    def on_mor(f):
        return PresheafMor(on_obj(f.src), on_obj(f.tgt), tuple(f[on_objects[o]] for o in B.objects))

    return LexFunctor(src, tgt, on_obj, on_mor, name=name)


@lru_cache(maxsize=None)
def builtin_functor(kind: str) -> LexFunctor:
    """Named fixture functors; each name always returns the same handle."""
    table = {
        "identity": lambda: identity_functor(FINSET),
        "const_terminal": lambda: const_terminal(FINSET, FINSET),
        "square": lambda: square_functor(FINSET),
        "diagonal": lambda: restriction_functor(FINSET, FINSET2, {"c0": "*", "c1": "*"}, name="Δ"),
        "proj0": lambda: restriction_functor(FINSET2, FINSET, {"*": "c0"}, name="pr0"),
        "proj1": lambda: restriction_functor(FINSET2, FINSET, {"*": "c1"}, name="pr1"),
        "identity2": lambda: identity_functor(FINSET2),
        "const_terminal2": lambda: const_terminal(FINSET2, FINSET2),
        "square2": lambda: square_functor(FINSET2),
        "to_finset2_terminal": lambda: const_terminal(FINSET, FINSET2),
        "from_finset2_terminal": lambda: const_terminal(FINSET2, FINSET),
    }
    if kind not in table:
        raise UnresolvedName(f"unknown builtin functor {kind!r}")
    F = table[kind]()
    F.name = {"identity": "Id", "const_terminal": "1", "identity2": "Id²", "const_terminal2": "1²"}.get(kind, F.name)
    return F


def bang(F: LexFunctor) -> NatTrans:
    """``F -> 1``."""
    one = builtin_functor("const_terminal") if F.target is FINSET else const_terminal(F.source, F.target)
    if one.source is not F.source:
        one = const_terminal(F.source, F.target)
    return NatTrans(F, one, lambda x: F.target.to_terminal(F.obj(x)), name="!")


def diag_nat(topos: PresheafTopos = FINSET) -> NatTrans:
    """``Id -> Sq``, ``x ↦ (x, x)``."""
    Id = builtin_functor("identity") if topos is FINSET else identity_functor(topos)
    Sq = builtin_functor("square") if topos is FINSET else square_functor(topos)
    return NatTrans(Id, Sq, lambda x: topos.product(x, x).mediate((topos.identity(x), topos.identity(x))), name="diag")


def proj_nat(i: int, topos: PresheafTopos = FINSET) -> NatTrans:
    """``Sq -> Id``, the ``i``-th projection."""
    Id = builtin_functor("identity") if topos is FINSET else identity_functor(topos)
    Sq = builtin_functor("square") if topos is FINSET else square_functor(topos)
    return NatTrans(Sq, Id, lambda x: topos.product(x, x).legs[i], name=f"p{i}")


def swap_nat(topos: PresheafTopos = FINSET) -> NatTrans:
    Sq = builtin_functor("square") if topos is FINSET else square_functor(topos)

    def comp(x):
        cone = topos.product(x, x)
        return cone.mediate((cone.legs[1], cone.legs[0]))

    return NatTrans(Sq, Sq, comp, name="swap")


def fixture_functors() -> dict:
    """The lex endofunctors of ``FINSET`` used throughout the tests."""
    return {k: builtin_functor(k) for k in ("const_terminal", "identity", "square")}
