"""Finite sets and total functions with exact limits, colimits and exponentials.

Every construction picks canonical labels so that structurally equal inputs
produce identical outputs:

* terminal set: ``{"•"}``
* product / pullback apex: pairs ``(a, b)``
* equalizer apex: the sub-collection of the domain
* coproduct apex: tagged pairs ``(0, a)`` and ``(1, b)``
* pushout apex: least tagged member of each class of the disjoint union
* coequalizer apex: least member of each class of the codomain
* exponential ``G^U``: tuples of images aligned with ``U.elements``
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Sequence

from .errors import DomainMismatch, NonCocone, NonCone, NotIso, ShapeMismatch

POINT = "•"


def label_key(x: Any):
    """Total order on labels (ints, strings, nested tuples, frozensets)."""
    if isinstance(x, bool):
        return (0, int(x))
    if isinstance(x, int):
        return (0, x)
    if isinstance(x, str):
        return (1, x)
    if isinstance(x, tuple):
        return (2, tuple(label_key(y) for y in x))
    if isinstance(x, frozenset):
        return (3, tuple(sorted(label_key(y) for y in x)))
    if x is None:
        return (-1,)
    raise TypeError(f"unsupported label type: {type(x).__name__}")


@dataclass(frozen=True)
class FinSet:
    elements: tuple
    _index: dict = field(default=None, init=False, repr=False, compare=False)
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {x: i for i, x in enumerate(self.elements)}
        if len(index) != len(self.elements):
            raise ShapeMismatch(f"duplicate labels in {self.elements!r}")
        keys = [label_key(x) for x in self.elements]
        if any(keys[i] >= keys[i + 1] for i in range(len(keys) - 1)):
            raise ShapeMismatch("elements must be given in canonical order; use FinSet.of")
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_hash", hash(self.elements))

    @classmethod
    def of(cls, items: Iterable[Hashable] = ()) -> "FinSet":
        return cls(tuple(sorted(set(items), key=label_key)))

    @classmethod
    def range(cls, n: int) -> "FinSet":
        return cls(tuple(range(n)))

    def __hash__(self):
        return self._hash

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return x in self._index

    def index(self, x) -> int:
        return self._index[x]

    def __repr__(self):
        return "{" + ", ".join(map(repr, self.elements)) + "}"


@dataclass(frozen=True)
class FinFn:
    """A total function, stored as images aligned with ``dom.elements``."""

    dom: FinSet
    cod: FinSet
    table: tuple
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.table) != len(self.dom):
            raise ShapeMismatch("table is not total on the domain")
        for y in self.table:
            if y not in self.cod:
                raise ShapeMismatch(f"image {y!r} not in codomain {self.cod!r}")
        object.__setattr__(self, "_hash", hash((self.dom, self.cod, self.table)))

    @classmethod
    def from_callable(cls, dom: FinSet, cod: FinSet, fn: Callable) -> "FinFn":
        return cls(dom, cod, tuple(fn(x) for x in dom.elements))

    @classmethod
    def from_dict(cls, dom: FinSet, cod: FinSet, mapping: dict) -> "FinFn":
        return cls(dom, cod, tuple(mapping[x] for x in dom.elements))

    @classmethod
    def identity(cls, s: FinSet) -> "FinFn":
        return cls(s, s, s.elements)

    def __hash__(self):
        return self._hash

    def __call__(self, x):
        return self.table[self.dom.index(x)]

    def items(self):
        return zip(self.dom.elements, self.table)

    def as_dict(self) -> dict:
        return dict(self.items())

    def is_injective(self) -> bool:
        return len(set(self.table)) == len(self.table)

    def is_surjective(self) -> bool:
        return len(set(self.table)) == len(self.cod)

    def is_iso(self) -> bool:
        return len(self.dom) == len(self.cod) and self.is_injective()

    def inverse(self) -> "FinFn":
        if not self.is_iso():
            raise NotIso("function is not a bijection", self)
        back = {y: x for x, y in self.items()}
        return FinFn.from_dict(self.cod, self.dom, back)

    def __repr__(self):
        body = ", ".join(f"{x!r}↦{y!r}" for x, y in self.items())
        return f"FinFn({body})"


def fs_compose(g: FinFn, f: FinFn) -> FinFn:
    """``g ∘ f``."""
    if f.cod != g.dom:
        raise DomainMismatch(f"cannot compose: {f.cod!r} != {g.dom!r}", (g, f))
    return FinFn(f.dom, g.cod, tuple(g(y) for y in f.table))


def all_functions(dom: FinSet, cod: FinSet):
    """Every total function ``dom -> cod`` in lexicographic table order."""
    for table in itertools.product(cod.elements, repeat=len(dom)):
        yield FinFn(dom, cod, table)


# -- limits -----------------------------------------------------------------


@dataclass(frozen=True)
class LimitCone:
    apex: FinSet
    legs: tuple
    _mediate: Callable = field(repr=False, compare=False)

    def mediate(self, legs: Sequence[FinFn]) -> FinFn:
        return self._mediate(tuple(legs))


@dataclass(frozen=True)
class ColimitCocone:
    apex: FinSet
    injections: tuple
    _comediate: Callable = field(repr=False, compare=False)

    def comediate(self, legs: Sequence[FinFn]) -> FinFn:
        return self._comediate(tuple(legs))


def _common_dom(legs: Sequence[FinFn]) -> FinSet:
    doms = {leg.dom for leg in legs}
    if len(doms) != 1:
        raise NonCone("cone legs do not share a domain", legs)
    return legs[0].dom


def _common_cod(legs: Sequence[FinFn]) -> FinSet:
    cods = {leg.cod for leg in legs}
    if len(cods) != 1:
        raise NonCocone("cocone legs do not share a codomain", legs)
    return legs[0].cod


def terminal() -> LimitCone:
    one = FinSet((POINT,))

    def mediate(legs):
        if legs:
            raise NonCone("terminal cones have no legs", legs)
        raise NonCone("use to_terminal(X) for the unique map into the terminal set")

    return LimitCone(one, (), mediate)


def to_terminal(x: FinSet) -> FinFn:
    return FinFn(x, FinSet((POINT,)), (POINT,) * len(x))


def product(a: FinSet, b: FinSet) -> LimitCone:
    apex = FinSet.of((x, y) for x in a for y in b)
    p1 = FinFn(apex, a, tuple(p[0] for p in apex))
    p2 = FinFn(apex, b, tuple(p[1] for p in apex))

    def mediate(legs):
        if len(legs) != 2 or legs[0].cod != a or legs[1].cod != b:
            raise NonCone("not a cone over the product diagram", legs)
        dom = _common_dom(legs)
        f, g = legs
        return FinFn(dom, apex, tuple((f(x), g(x)) for x in dom))

    return LimitCone(apex, (p1, p2), mediate)


def pullback(f: FinFn, g: FinFn) -> LimitCone:
    if f.cod != g.cod:
        raise ShapeMismatch("pullback needs a cospan", (f, g))
    apex = FinSet.of((a, b) for a in f.dom for b in g.dom if f(a) == g(b))
    p1 = FinFn(apex, f.dom, tuple(p[0] for p in apex))
    p2 = FinFn(apex, g.dom, tuple(p[1] for p in apex))

    def mediate(legs):
        if len(legs) != 2 or legs[0].cod != f.dom or legs[1].cod != g.dom:
            raise NonCone("not a cone over the cospan", legs)
        dom = _common_dom(legs)
        u, v = legs
        images = []
        for x in dom:
            a, b = u(x), v(x)
            if f(a) != g(b):
                raise NonCone(f"square fails to commute at {x!r}", legs)
            images.append((a, b))
        return FinFn(dom, apex, tuple(images))

    return LimitCone(apex, (p1, p2), mediate)


def equalizer(f: FinFn, g: FinFn) -> LimitCone:
    if f.dom != g.dom or f.cod != g.cod:
        raise ShapeMismatch("equalizer needs a parallel pair", (f, g))
    apex = FinSet(tuple(x for x in f.dom if f(x) == g(x)))
    inc = FinFn(apex, f.dom, apex.elements)

    def mediate(legs):
        if len(legs) != 1 or legs[0].cod != f.dom:
            raise NonCone("not a cone over the parallel pair", legs)
        (h,) = legs
        for x in h.dom:
            if f(h(x)) != g(h(x)):
                raise NonCone(f"h does not equalize at {x!r}", legs)
        return FinFn(h.dom, apex, h.table)

    return LimitCone(apex, (inc,), mediate)


def fs_limit(kind: str, *maps) -> LimitCone:
    if kind == "terminal":
        if maps:
            raise ShapeMismatch("terminal takes no data")
        return terminal()
    if kind == "product":
        if len(maps) != 2 or not all(isinstance(m, FinSet) for m in maps):
            raise ShapeMismatch("product takes two sets")
        return product(*maps)
    if kind == "equalizer":
        if len(maps) != 2:
            raise ShapeMismatch("equalizer takes a parallel pair")
        return equalizer(*maps)
    if kind == "pullback":
        if len(maps) != 2:
            raise ShapeMismatch("pullback takes a cospan")
        return pullback(*maps)
    raise ShapeMismatch(f"unknown limit kind {kind!r}")


# -- colimits ---------------------------------------------------------------


class UnionFind:
    """Disjoint sets whose representative is always the least member."""

    def __init__(self, items: Iterable):
        self._parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[x] != root:
            self._parent[x], x = root, self._parent[x]
        return root

    def union(self, x, y) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if label_key(ry) < label_key(rx):
            rx, ry = ry, rx
        self._parent[ry] = rx
        return True

    def classes(self) -> dict:
        out: dict = {}
        for x in self._parent:
            out.setdefault(self.find(x), []).append(x)
        return out


def initial() -> ColimitCocone:
    empty = FinSet(())

    def comediate(legs):
        raise NonCocone("use from_initial(X) for the unique map out of the initial set")

    return ColimitCocone(empty, (), comediate)


def from_initial(x: FinSet) -> FinFn:
    return FinFn(FinSet(()), x, ())


def coproduct(a: FinSet, b: FinSet) -> ColimitCocone:
    apex = FinSet(tuple((0, x) for x in a) + tuple((1, y) for y in b))
    i1 = FinFn(a, apex, tuple((0, x) for x in a))
    i2 = FinFn(b, apex, tuple((1, y) for y in b))

    def comediate(legs):
        if len(legs) != 2 or legs[0].dom != a or legs[1].dom != b:
            raise NonCocone("not a cocone under the coproduct diagram", legs)
        cod = _common_cod(legs)
        f, g = legs
        return FinFn(apex, cod, tuple(f(x) if t == 0 else g(x) for t, x in apex))

    return ColimitCocone(apex, (i1, i2), comediate)


def _quotient(items: Sequence, pairs: Iterable[tuple]):
    uf = UnionFind(items)
    for x, y in pairs:
        uf.union(x, y)
    rep = {x: uf.find(x) for x in items}
    return FinSet.of(rep.values()), rep


def pushout(f: FinFn, g: FinFn) -> ColimitCocone:
    """Pushout of the span ``B <-f- A -g-> C``."""
    if f.dom != g.dom:
        raise ShapeMismatch("pushout needs a span", (f, g))
    tagged = [(0, b) for b in f.cod] + [(1, c) for c in g.cod]
    apex, rep = _quotient(tagged, (((0, f(a)), (1, g(a))) for a in f.dom))
    i1 = FinFn(f.cod, apex, tuple(rep[(0, b)] for b in f.cod))
    i2 = FinFn(g.cod, apex, tuple(rep[(1, c)] for c in g.cod))

    def comediate(legs):
        if len(legs) != 2 or legs[0].dom != f.cod or legs[1].dom != g.cod:
            raise NonCocone("not a cocone under the span", legs)
        cod = _common_cod(legs)
        u, v = legs
        for a in f.dom:
            if u(f(a)) != v(g(a)):
                raise NonCocone(f"square fails to commute at {a!r}", legs)
        out = {}
        for b in f.cod:
            out[rep[(0, b)]] = u(b)
        for c in g.cod:
            out[rep[(1, c)]] = v(c)
        return FinFn.from_dict(apex, cod, out)

    return ColimitCocone(apex, (i1, i2), comediate)


def coequalizer(f: FinFn, g: FinFn) -> ColimitCocone:
    if f.dom != g.dom or f.cod != g.cod:
        raise ShapeMismatch("coequalizer needs a parallel pair", (f, g))
    apex, rep = _quotient(f.cod.elements, ((f(a), g(a)) for a in f.dom))
    q = FinFn(f.cod, apex, tuple(rep[b] for b in f.cod))

    def comediate(legs):
        if len(legs) != 1 or legs[0].dom != f.cod:
            raise NonCocone("not a cocone under the parallel pair", legs)
        (h,) = legs
        for a in f.dom:
            if h(f(a)) != h(g(a)):
                raise NonCocone(f"h does not coequalize at {a!r}", legs)
        return FinFn.from_dict(apex, h.cod, {rep[b]: h(b) for b in f.cod})

    return ColimitCocone(apex, (q,), comediate)


def fs_colimit(kind: str, *maps) -> ColimitCocone:
    if kind == "initial":
        if maps:
            raise ShapeMismatch("initial takes no data")
        return initial()
    if kind == "coproduct":
        if len(maps) != 2 or not all(isinstance(m, FinSet) for m in maps):
            raise ShapeMismatch("coproduct takes two sets")
        return coproduct(*maps)
    if kind == "pushout":
        if len(maps) != 2:
            raise ShapeMismatch("pushout takes a span")
        return pushout(*maps)
    if kind == "coequalizer":
        if len(maps) != 2:
            raise ShapeMismatch("coequalizer takes a parallel pair")
        return coequalizer(*maps)
    raise ShapeMismatch(f"unknown colimit kind {kind!r}")


# -- exponentials -----------------------------------------------------------


@dataclass(frozen=True)
class Exponential:
    apex: FinSet
    eval: FinFn
    base: FinSet
    exponent: FinSet

    def curry(self, h: FinFn, a: FinSet) -> FinFn:
        """Transpose ``h: A × U -> G`` to ``A -> G^U``; ``A`` is passed since ``A × ∅`` forgets it."""
        if h.cod != self.base or h.dom != product(a, self.exponent).apex:
            raise DomainMismatch("curry: map is not out of A × U into the base", h)
        return FinFn(a, self.apex, tuple(tuple(h((x, u)) for u in self.exponent) for x in a))

    def uncurry(self, k: FinFn) -> FinFn:
        if k.cod != self.apex:
            raise DomainMismatch("uncurry: codomain is not the exponential", k)
        dom = product(k.dom, self.exponent).apex
        return FinFn(dom, self.base, tuple(k(a)[self.exponent.index(u)] for a, u in dom))


def fs_exponential(g: FinSet, u: FinSet) -> Exponential:
    apex = FinSet(tuple(itertools.product(g.elements, repeat=len(u))))
    ev_dom = product(apex, u).apex
    ev = FinFn(ev_dom, g, tuple(phi[u.index(x)] for phi, x in ev_dom))
    return Exponential(apex, ev, g, u)


# -- isomorphism search -----------------------------------------------------


def fs_iso_search(a: FinSet, b: FinSet, maps_a: Sequence[FinFn] = (), maps_b: Sequence[FinFn] = ()):
    """Find a bijection ``h: a -> b`` with ``maps_b[i] ∘ h == maps_a[i]``, or ``None``."""
    if len(maps_a) != len(maps_b):
        raise ShapeMismatch("structure maps must pair up")
    for fa, fb in zip(maps_a, maps_b):
        if fa.dom != a or fb.dom != b or fa.cod != fb.cod:
            raise ShapeMismatch("structure maps must share codomains", (fa, fb))
    if len(a) != len(b):
        return None
    sig_a = [tuple(m(x) for m in maps_a) for x in a]
    sig_b = {y: tuple(m(y) for m in maps_b) for y in b}
    chosen: list = []
    used: set = set()

    def search(i):
        if i == len(a):
            return True
        for y in b:
            if y not in used and sig_b[y] == sig_a[i]:
                used.add(y)
                chosen.append(y)
                if search(i + 1):
                    return True
                used.discard(y)
                chosen.pop()
        return False

    if search(0):
        return FinFn(a, b, tuple(chosen))
    return None
