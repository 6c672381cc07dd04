"""Intensional finitely-complete categories, lex functors and natural transformations.

Categories are handles: callers supply objects, the category decides equality,
enumerates hom-sets and computes chosen limits.  Functors and natural
transformations are rules; they are only ever compared on a declared
:class:`ProbeSet`.
"""

from __future__ import annotations

import random
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from .errors import BoundaryMismatch, NonCocone, NonCone, NotIso, NotLimitClosed, ShapeMismatch


@dataclass(frozen=True)
class Cone:
    apex: Any
    legs: tuple
    _mediate: Callable = field(repr=False, compare=False)

    def mediate(self, legs: Sequence) -> Any:
        return self._mediate(tuple(legs))


@dataclass(frozen=True)
class Cocone:
    apex: Any
    injections: tuple
    _comediate: Callable = field(repr=False, compare=False)

    def comediate(self, legs: Sequence) -> Any:
        return self._comediate(tuple(legs))


class Category(ABC):
    """The bare category surface used by the law checker."""

    name: str = "C"

    def obj_eq(self, a, b) -> bool:
        return a == b

    def mor_eq(self, f, g) -> bool:
        return f == g

    @abstractmethod
    def dom(self, f): ...

    @abstractmethod
    def cod(self, f): ...

    @abstractmethod
    def identity(self, a): ...

    @abstractmethod
    def compose(self, g, f): ...

    @abstractmethod
    def hom(self, a, b) -> Sequence: ...

    def compose_all(self, *fs):
        """``compose_all(h, g, f) == h ∘ g ∘ f``."""
        out = fs[-1]
        for g in reversed(fs[:-1]):
            out = self.compose(g, out)
        return out

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class LexCategory(Category):
    """A category with a chosen terminal object and chosen pullbacks.

    Topos models additionally provide an initial object and pushouts; bare
    lex categories leave ``has_initial`` false.
    """

    has_initial = False
    has_pushouts = False

    @abstractmethod
    def terminal(self): ...

    @abstractmethod
    def to_terminal(self, a): ...

    @abstractmethod
    def pullback(self, f, g) -> Cone: ...

    def contains(self, a) -> bool:
        return True

    def initial(self):
        raise NotImplementedError(f"{self.name} has no chosen initial object")

    def from_initial(self, a):
        raise NotImplementedError(f"{self.name} has no chosen initial object")

    def pushout(self, f, g) -> Cocone:
        raise NotImplementedError(f"{self.name} has no chosen pushouts")

    def is_iso(self, f) -> bool:
        return self.inverse_or_none(f) is not None

    def inverse_or_none(self, f):
        a, b = self.dom(f), self.cod(f)
        for g in self.hom(b, a):
            if self.mor_eq(self.compose(g, f), self.identity(a)) and self.mor_eq(
                self.compose(f, g), self.identity(b)
            ):
                return g
        return None

    def inverse(self, f):
        g = self.inverse_or_none(f)
        if g is None:
            raise NotIso(f"{f!r} is not an isomorphism in {self.name}", f)
        return g

    def product(self, a, b) -> Cone:
        return self.pullback(self.to_terminal(a), self.to_terminal(b))

    def pair(self, f, g):
        """``⟨f, g⟩`` into the chosen product of the codomains."""
        cone = self.product(self.cod(f), self.cod(g))
        return cone.mediate((f, g))

    def equalizer(self, f, g) -> Cone:
        a, b = self.dom(f), self.cod(f)
        ident = self.identity(a)
        cone = self.pullback(self.pair(ident, f), self.pair(ident, g))
        leg = cone.legs[0]

        def mediate(legs):
            (h,) = legs
            return cone.mediate((h, h))

        return Cone(cone.apex, (leg,), mediate)

    def unique_to(self, a, t):
        """The unique map ``a -> t`` into a terminal-like object ``t``."""
        back = self.inverse(self.to_terminal(t))
        return self.compose(back, self.to_terminal(a))

    def unique_from(self, i, a):
        """The unique map ``i -> a`` out of an initial-like object ``i``."""
        there = self.inverse(self.from_initial(i))
        return self.compose(self.from_initial(a), there)

    def is_terminal(self, a) -> bool:
        return self.is_iso(self.to_terminal(a))


class LexFunctor:
    """An object rule plus a morphism rule; results are memoised."""

    def __init__(self, source, target, on_obj: Callable, on_mor: Callable, name: str = "F"):
        self.source = source
        self.target = target
        self._on_obj = on_obj
        self._on_mor = on_mor
        self.name = name
        self._obj_cache: dict = {}
        self._mor_cache: dict = {}

    def obj(self, x):
        try:
            return self._obj_cache[x]
        except KeyError:
            y = self._obj_cache[x] = self._on_obj(x)
            return y

    def mor(self, f):
        try:
            return self._mor_cache[f]
        except KeyError:
            y = self._mor_cache[f] = self._on_mor(f)
            return y

    def __repr__(self):
        return f"<LexFunctor {self.name}: {self.source.name} -> {self.target.name}>"


class NatTrans:
    """A natural transformation given by its component rule."""

    def __init__(self, source: LexFunctor, target: LexFunctor, component: Callable, name: str = "α"):
        if source.source is not target.source or source.target is not target.target:
            raise BoundaryMismatch(f"{name}: functors {source.name}, {target.name} are not parallel")
        self.source = source
        self.target = target
        self._component = component
        self.name = name
        self._cache: dict = {}

    @property
    def dom_category(self):
        return self.source.source

    @property
    def cod_category(self):
        return self.source.target

    def __getitem__(self, x):
        try:
            return self._cache[x]
        except KeyError:
            y = self._cache[x] = self._component(x)
            return y

    def __repr__(self):
        return f"<NatTrans {self.name}: {self.source.name} => {self.target.name}>"


@dataclass
class Adjunction:
    left: LexFunctor
    right: LexFunctor
    unit: NatTrans
    counit: NatTrans
    name: str = "L ⊣ R"


@dataclass(frozen=True)
class ProbeSet:
    objects: tuple
    morphisms: tuple = ()

    @classmethod
    def full(cls, cat: Category, objects: Sequence, budget: int | None = None, seed: int = 0) -> "ProbeSet":
        """All morphisms among ``objects``; sampled down to ``budget`` if it is exceeded."""
        objects = tuple(dict.fromkeys(objects))
        morphisms = [f for a in objects for b in objects for f in cat.hom(a, b)]
        if budget is not None and len(morphisms) > budget:
            idents = [cat.identity(a) for a in objects]
            rest = [f for f in morphisms if f not in set(idents)]
            rng = random.Random(seed)
            keep = max(budget - len(idents), 0)
            morphisms = idents + rng.sample(rest, min(keep, len(rest)))
        return cls(objects, tuple(morphisms))

    def validate(self, cat: Category) -> None:
        objs = set(self.objects)
        for f in self.morphisms:
            if cat.dom(f) not in objs or cat.cod(f) not in objs:
                raise ShapeMismatch(f"probe morphism {f!r} leaves the probe objects", f)
        present = set(self.morphisms)
        for a in self.objects:
            if cat.identity(a) not in present:
                raise ShapeMismatch(f"probe set is not closed under identities at {a!r}", a)

    def morphisms_from(self, cat: Category, a):
        return [f for f in self.morphisms if cat.obj_eq(cat.dom(f), a)]

    def morphisms_to(self, cat: Category, b):
        return [f for f in self.morphisms if cat.obj_eq(cat.cod(f), b)]


# -- functors -----------------------------------------------------------------


def identity_functor(cat) -> LexFunctor:
    return LexFunctor(cat, cat, lambda x: x, lambda f: f, name=f"Id[{cat.name}]")


def const_terminal(source, target) -> LexFunctor:
    one = target.terminal()
    ident = target.identity(one)
    return LexFunctor(source, target, lambda x: one, lambda f: ident, name=f"1[{target.name}]")


_COMPOSITES: dict = {}


def functor_compose(g: LexFunctor, f: LexFunctor) -> LexFunctor:
    """``g ∘ f``; composing the same pair twice returns the same handle."""
    if f.target is not g.source:
        raise BoundaryMismatch(f"cannot compose {g.name} after {f.name}")
    key = (id(g), id(f))
    hit = _COMPOSITES.get(key)
    if hit is not None and hit[0] is g and hit[1] is f:
        return hit[2]
    out = LexFunctor(
        f.source,
        g.target,
        lambda x: g.obj(f.obj(x)),
        lambda m: g.mor(f.mor(m)),
        name=f"{g.name}∘{f.name}",
    )
    _COMPOSITES[key] = (g, f, out)
    return out


def compose_functors(*fs: LexFunctor) -> LexFunctor:
    out = fs[-1]
    for g in reversed(fs[:-1]):
        out = functor_compose(g, out)
    return out


# -- natural transformations --------------------------------------------------


def identity_nat(f: LexFunctor) -> NatTrans:
    return NatTrans(f, f, lambda x: f.target.identity(f.obj(x)), name=f"id[{f.name}]")


def vcompose(b: NatTrans, a: NatTrans) -> NatTrans:
    """Vertical composite ``b · a``."""
    if a.dom_category is not b.dom_category or a.cod_category is not b.cod_category:
        raise BoundaryMismatch(f"cannot vertically compose {b.name} after {a.name}")
    cat = a.cod_category
    return NatTrans(a.source, b.target, lambda x: cat.compose(b[x], a[x]), name=f"{b.name}·{a.name}")


def vcompose_all(*nats: NatTrans) -> NatTrans:
    out = nats[-1]
    for b in reversed(nats[:-1]):
        out = vcompose(b, out)
    return out


def whisker_left(f: LexFunctor, a: NatTrans) -> NatTrans:
    """``F a``: apply ``F`` to each component."""
    if a.cod_category is not f.source:
        raise BoundaryMismatch(f"cannot whisker {a.name} with {f.name} on the left")
    return NatTrans(
        functor_compose(f, a.source), functor_compose(f, a.target), lambda x: f.mor(a[x]), name=f"{f.name}{a.name}"
    )


def whisker_right(a: NatTrans, g: LexFunctor) -> NatTrans:
    """``a G``: components of ``a`` at ``G(x)``."""
    if g.target is not a.dom_category:
        raise BoundaryMismatch(f"cannot whisker {a.name} with {g.name} on the right")
    return NatTrans(
        functor_compose(a.source, g), functor_compose(a.target, g), lambda x: a[g.obj(x)], name=f"{a.name}{g.name}"
    )


def hcompose(b: NatTrans, a: NatTrans) -> NatTrans:
    """Horizontal composite ``b * a`` for ``a: F -> F'`` and ``b: G -> G'``."""
    if a.cod_category is not b.dom_category:
        raise BoundaryMismatch(f"cannot horizontally compose {b.name} with {a.name}")
    cat = b.cod_category
    g = b.source
    return NatTrans(
        functor_compose(b.source, a.source),
        functor_compose(b.target, a.target),
        lambda x: cat.compose(b[a.target.obj(x)], g.mor(a[x])),
        name=f"{b.name}*{a.name}",
    )


def nat_inverse(a: NatTrans) -> NatTrans:
    cat = a.cod_category
    return NatTrans(a.target, a.source, lambda x: cat.inverse(a[x]), name=f"{a.name}⁻¹")


def nat_ops(kind: str, *args) -> NatTrans:
    if kind == "vcompose":
        return vcompose(*args)
    if kind == "whisker_left":
        return whisker_left(*args)
    if kind == "whisker_right":
        return whisker_right(*args)
    if kind == "hcompose":
        return hcompose(*args)
    raise ShapeMismatch(f"unknown natural-transformation operation {kind!r}")


def nat_from_table(source: LexFunctor, target: LexFunctor, table: dict, name: str = "ψ") -> NatTrans:
    """A transformation defined only on the objects in ``table``."""

    def component(x):
        try:
            return table[x]
        except KeyError:
            raise KeyError(f"{name} has no component at {x!r} (outside its probe table)") from None

    nat = NatTrans(source, target, component, name=name)
    nat.table = table
    return nat


def mate(adj1: Adjunction, adj2: Adjunction, sigma: NatTrans, direction: str = "left", along: LexFunctor | None = None):
    """Transpose ``sigma`` across ``L1 ⊣ R1`` and ``L2 ⊣ R2`` (``Li: Gi -> X``).

    ``direction="left"`` takes ``sigma: along∘R1 -> R2`` to
    ``(ε2 L1)(L2 sigma L1)(L2 along η1): L2∘along -> L1``;
    ``direction="right"`` takes ``sigma: L2∘along -> L1`` back to
    ``(R2 ε1)(R2 sigma R1)(η2 along R1): along∘R1 -> R2``.
    """
    l1, r1, l2, r2 = adj1.left, adj1.right, adj2.left, adj2.right
    if l1.target is not l2.target:
        raise ShapeMismatch("mate: the two adjunctions do not share a codomain for their left adjoints")
    if along is None:
        if l1.source is not l2.source:
            raise ShapeMismatch("mate: pass `along` when the adjunctions live on different categories")
        along = identity_functor(l1.source)
    eta1, eps1, eta2, eps2 = adj1.unit, adj1.counit, adj2.unit, adj2.counit
    if direction == "left":
        if sigma.dom_category is not r1.source or sigma.cod_category is not r2.target:
            raise ShapeMismatch("mate: sigma must run along∘R1 -> R2")
        g2 = l2.target

        def component(a):
            la = l1.obj(a)
            return g2.compose_all(eps2[la], l2.mor(sigma[la]), l2.mor(along.mor(eta1[a])))

        return NatTrans(functor_compose(l2, along), l1, component, name=f"mate({sigma.name})")
    if direction == "right":
        if sigma.dom_category is not l1.source or sigma.cod_category is not l1.target:
            raise ShapeMismatch("mate: sigma must run L2∘along -> L1")
        g = r2.target

        def component(b):
            rb = r1.obj(b)
            return g.compose_all(r2.mor(eps1[b]), r2.mor(sigma[rb]), eta2[along.obj(rb)])

        return NatTrans(functor_compose(along, r1), r2, component, name=f"mate⁻¹({sigma.name})")
    raise ShapeMismatch(f"mate: unknown direction {direction!r}")


# -- constructions on categories ---------------------------------------------


@dataclass(frozen=True)
class PairMor:
    first: Any
    second: Any


class ProductCategory(LexCategory):
    """``C1 × C2`` with componentwise chosen limits; objects are pairs."""

    def __init__(self, c1: LexCategory, c2: LexCategory, name: str | None = None):
        self.c1, self.c2 = c1, c2
        self.name = name or f"{c1.name}×{c2.name}"
        self.has_initial = c1.has_initial and c2.has_initial

    def dom(self, f):
        return (self.c1.dom(f.first), self.c2.dom(f.second))

    def cod(self, f):
        return (self.c1.cod(f.first), self.c2.cod(f.second))

    def identity(self, a):
        return PairMor(self.c1.identity(a[0]), self.c2.identity(a[1]))

    def compose(self, g, f):
        return PairMor(self.c1.compose(g.first, f.first), self.c2.compose(g.second, f.second))

    def hom(self, a, b):
        return [PairMor(f, g) for f in self.c1.hom(a[0], b[0]) for g in self.c2.hom(a[1], b[1])]

    def contains(self, a):
        return self.c1.contains(a[0]) and self.c2.contains(a[1])

    def terminal(self):
        return (self.c1.terminal(), self.c2.terminal())

    def to_terminal(self, a):
        return PairMor(self.c1.to_terminal(a[0]), self.c2.to_terminal(a[1]))

    def initial(self):
        return (self.c1.initial(), self.c2.initial())

    def from_initial(self, a):
        return PairMor(self.c1.from_initial(a[0]), self.c2.from_initial(a[1]))

    def pullback(self, f, g):
        p = self.c1.pullback(f.first, g.first)
        q = self.c2.pullback(f.second, g.second)
        legs = (PairMor(p.legs[0], q.legs[0]), PairMor(p.legs[1], q.legs[1]))

        def mediate(cone):
            u, v = cone
            return PairMor(p.mediate((u.first, v.first)), q.mediate((u.second, v.second)))

        return Cone((p.apex, q.apex), legs, mediate)

    def is_iso(self, f):
        return self.c1.is_iso(f.first) and self.c2.is_iso(f.second)

    def inverse_or_none(self, f):
        a, b = self.c1.inverse_or_none(f.first), self.c2.inverse_or_none(f.second)
        if a is None or b is None:
            return None
        return PairMor(a, b)


def product_category(c1: LexCategory, c2: LexCategory) -> ProductCategory:
    return ProductCategory(c1, c2)


class FullSubcategory(LexCategory):
    """Members of ``ambient`` selected by a predicate, with inherited limits.

    ``terminal``/``initial`` override the ambient choices, e.g. a slice over
    ``U`` has ``U`` as its terminal object.
    """

    def __init__(self, ambient: LexCategory, member: Callable, name: str, terminal=None, initial=None):
        self.ambient = ambient
        self._member = member
        self.name = name
        self._membership: dict = {}
        self._terminal = terminal if terminal is not None else ambient.terminal()
        if not self.contains(self._terminal):
            raise NotLimitClosed(f"{name}: the chosen terminal object is not a member", self._terminal)
        self._initial = initial
        if initial is None and ambient.has_initial and self.contains(ambient.initial()):
            self._initial = ambient.initial()
        self.has_initial = self._initial is not None
        self.has_pushouts = ambient.has_pushouts

    def contains(self, a) -> bool:
        try:
            return self._membership[a]
        except KeyError:
            v = self._membership[a] = bool(self._member(a))
            return v

    def _check(self, a):
        if not self.contains(a):
            raise NotLimitClosed(f"{a!r} is not an object of {self.name}", a)
        return a

    def dom(self, f):
        return self.ambient.dom(f)

    def cod(self, f):
        return self.ambient.cod(f)

    def identity(self, a):
        return self.ambient.identity(a)

    def compose(self, g, f):
        return self.ambient.compose(g, f)

    def hom(self, a, b):
        return self.ambient.hom(a, b)

    def terminal(self):
        return self._terminal

    def to_terminal(self, a):
        if self._terminal == self.ambient.terminal():
            return self.ambient.to_terminal(a)
        (f,) = self.ambient.hom(a, self._terminal)
        return f

    def initial(self):
        if self._initial is None:
            return super().initial()
        return self._initial

    def from_initial(self, a):
        if self._initial is None:
            return super().from_initial(a)
        if self.ambient.has_initial and self._initial == self.ambient.initial():
            return self.ambient.from_initial(a)
        (f,) = self.ambient.hom(self._initial, a)
        return f

    def pullback(self, f, g):
        cone = self.ambient.pullback(f, g)
        if not self.contains(cone.apex):
            raise NotLimitClosed(f"{self.name} is not closed under the pullback of {f!r}, {g!r}", cone.apex)
        return cone

    def pushout(self, f, g):
        cocone = self.ambient.pushout(f, g)
        if not self.contains(cocone.apex):
            raise NotLimitClosed(f"{self.name} is not closed under the pushout", cocone.apex)
        return cocone

    def is_iso(self, f):
        return self.ambient.is_iso(f)

    def inverse_or_none(self, f):
        return self.ambient.inverse_or_none(f)


def full_subcategory(cat: LexCategory, membership: Callable, name: str | None = None, probes=None, **kw):
    """Full subcategory; with ``probes`` the closure under chosen pullbacks is checked."""
    sub = FullSubcategory(cat, membership, name or f"{cat.name}|sub", **kw)
    if probes is not None:
        members = [f for f in probes.morphisms if sub.contains(cat.dom(f)) and sub.contains(cat.cod(f))]
        for f in members:
            for g in members:
                if cat.obj_eq(cat.cod(f), cat.cod(g)):
                    sub.pullback(f, g)
    return sub


def inclusion_functor(sub: FullSubcategory, name: str = "K") -> LexFunctor:
    return LexFunctor(sub, sub.ambient, lambda x: x, lambda f: f, name=name)


__all__ = [
    "Adjunction",
    "Category",
    "Cocone",
    "Cone",
    "FullSubcategory",
    "LexCategory",
    "LexFunctor",
    "NatTrans",
    "NonCocone",
    "NonCone",
    "PairMor",
    "ProbeSet",
    "ProductCategory",
    "compose_functors",
    "const_terminal",
    "full_subcategory",
    "functor_compose",
    "hcompose",
    "identity_functor",
    "identity_nat",
    "inclusion_functor",
    "mate",
    "nat_from_table",
    "nat_inverse",
    "nat_ops",
    "product_category",
    "vcompose",
    "vcompose_all",
    "whisker_left",
    "whisker_right",
]
