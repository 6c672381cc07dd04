"""Presheaves of finite sets on a finite base category.

A presheaf stores one finite set per base object and one restriction map per
base arrow; an arrow ``u: a -> b`` restricts ``X(b) -> X(a)``.  Every limit and
colimit is computed one base object at a time with the finite-set routines.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from . import finset as fs
from .category import Category, Cocone, Cone, LexCategory, ProbeSet
from .errors import DomainMismatch, NonCocone, NonCone, NotIso, NotSubterminal, ShapeMismatch
from .finset import POINT, FinFn, FinSet


class FiniteBaseCategory(Category):
    """A small category given by generators, identities and a full composition table.

    Arrows are strings.  Identities are named ``id_<obj>`` and listed first.
    ``compose`` maps ``(g, f)`` (meaning ``g ∘ f``) to an arrow name for every
    composable pair of non-identity arrows.
    """

    def __init__(self, name: str, objects: Iterable[str], arrows: Iterable[tuple] = (), compose: Mapping | None = None, validate: bool = True):
        self.name = name
        self.objects = tuple(objects)
        if len(set(self.objects)) != len(self.objects):
            raise ShapeMismatch(f"{name}: duplicate objects")
        self.src: dict = {}
        self.tgt: dict = {}
        ids = []
        for o in self.objects:
            a = f"id_{o}"
            self.src[a] = self.tgt[a] = o
            ids.append(a)
        gens = []
        for a, s, t in arrows:
            if a in self.src:
                raise ShapeMismatch(f"{name}: duplicate arrow {a}")
            if s not in self.objects or t not in self.objects:
                raise ShapeMismatch(f"{name}: arrow {a} has unknown end", a)
            self.src[a], self.tgt[a] = s, t
            gens.append(a)
        self.ids = {o: f"id_{o}" for o in self.objects}
        self.arrows = tuple(ids + gens)
        self.non_identity = tuple(gens)
        self.arrow_index = {a: i for i, a in enumerate(self.arrows)}
        self.object_index = {o: i for i, o in enumerate(self.objects)}
        table = dict(compose or {})
        self.table: dict = {}
        for f in self.arrows:
            for g in self.arrows:
                if self.tgt[f] != self.src[g]:
                    continue
                if f in ids:
                    self.table[(g, f)] = g
                elif g in ids:
                    self.table[(g, f)] = f
                elif (g, f) in table:
                    self.table[(g, f)] = table[(g, f)]
                else:
                    raise ShapeMismatch(f"{name}: missing composite {g} ∘ {f}", (g, f))
        for (g, f), h in table.items():
            if (g, f) not in self.table:
                raise ShapeMismatch(f"{name}: {g} ∘ {f} is not composable", (g, f))
            if h not in self.src:
                raise ShapeMismatch(f"{name}: composite {g} ∘ {f} names unknown arrow {h}", (g, f))
        if validate:
            self.validate()

    def validate(self) -> None:
        for (g, f), h in self.table.items():
            if self.src[h] != self.src[f] or self.tgt[h] != self.tgt[g]:
                raise ShapeMismatch(f"{self.name}: {g} ∘ {f} = {h} has the wrong ends", (g, f, h))
        for f in self.arrows:
            for g in self.arrows:
                if (g, f) not in self.table:
                    continue
                for h in self.arrows:
                    if (h, g) not in self.table:
                        continue
                    left = self.table[(h, self.table[(g, f)])]
                    right = self.table[(self.table[(h, g)], f)]
                    if left != right:
                        raise ShapeMismatch(f"{self.name}: composition is not associative at ({h}, {g}, {f})", (h, g, f))

    # Category surface
    def dom(self, f):
        return self.src[f]

    def cod(self, f):
        return self.tgt[f]

    def identity(self, a):
        return self.ids[a]

    def compose(self, g, f):
        try:
            return self.table[(g, f)]
        except KeyError:
            raise DomainMismatch(f"{g} ∘ {f} is not composable", (g, f)) from None

    def hom(self, a, b):
        return [f for f in self.arrows if self.src[f] == a and self.tgt[f] == b]

    def probes(self) -> ProbeSet:
        return ProbeSet(self.objects, self.arrows)

    @classmethod
    def one(cls) -> "FiniteBaseCategory":
        return cls("one", ["*"])

    @classmethod
    def discrete(cls, n: int) -> "FiniteBaseCategory":
        return cls(f"disc{n}", [f"c{i}" for i in range(n)])

    @classmethod
    def sierpinski(cls) -> "FiniteBaseCategory":
        return cls("sierpinski", ["a", "b"], [("u", "a", "b")])


@dataclass(frozen=True, eq=False)
class Presheaf:
    base: FiniteBaseCategory
    at: tuple
    res: tuple
    _hash: int = field(default=0, init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((id(self.base), self.at, self.res)))

    def __eq__(self, other):
        return (
            isinstance(other, Presheaf)
            and self.base is other.base
            and self._hash == other._hash
            and self.at == other.at
            and self.res == other.res
        )

    def __hash__(self):
        return self._hash

    def __getitem__(self, c) -> FinSet:
        return self.at[self.base.object_index[c]]

    def restrict(self, u) -> FinFn:
        return self.res[self.base.arrow_index[u]]

    def sizes(self) -> tuple:
        return tuple(len(s) for s in self.at)

    def __repr__(self):
        parts = [f"{o}:{s!r}" for o, s in zip(self.base.objects, self.at)]
        extra = [f"{u}:{self.restrict(u).table}" for u in self.base.non_identity]
        return "Psh(" + ", ".join(parts + extra) + ")"


def make_presheaf(base: FiniteBaseCategory, at: Mapping, res: Mapping | None = None, check: bool = True) -> Presheaf:
    """Build and validate a presheaf.

    ``at`` maps objects to a FinSet or an iterable of labels; ``res`` maps each
    non-identity arrow ``u: a -> b`` to a FinFn or dict ``X(b) -> X(a)``.
    """
    res = dict(res or {})
    sets = []
    for o in base.objects:
        if o not in at:
            raise ShapeMismatch(f"presheaf has no component at {o}", o)
        s = at[o]
        sets.append(s if isinstance(s, FinSet) else FinSet.of(s))
    sets_t = tuple(sets)

    def comp(o):
        return sets_t[base.object_index[o]]

    maps = []
    for u in base.arrows:
        a, b = base.src[u], base.tgt[u]
        if u in base.ids.values():
            maps.append(FinFn.identity(comp(a)))
            continue
        if u not in res:
            raise ShapeMismatch(f"presheaf has no restriction along {u}", u)
        r = res[u]
        if not isinstance(r, FinFn):
            try:
                r = FinFn.from_dict(comp(b), comp(a), dict(r))
            except (KeyError, ShapeMismatch) as exc:
                raise ShapeMismatch(f"restriction along {u} is not a map {comp(b)!r} -> {comp(a)!r}", u) from exc
        if r.dom != comp(b) or r.cod != comp(a):
            raise ShapeMismatch(f"restriction along {u} has the wrong ends", u)
        maps.append(r)
    p = Presheaf(base, sets_t, tuple(maps))
    if check:
        check_presheaf(p)
    return p


def check_presheaf(p: Presheaf) -> None:
    base = p.base
    for (g, f), h in base.table.items():
        if p.restrict(h) != fs.fs_compose(p.restrict(f), p.restrict(g)):
            raise ShapeMismatch(f"restriction is not functorial at {g} ∘ {f}", (g, f))


@dataclass(frozen=True, eq=False)
class PresheafMor:
    src: Presheaf
    tgt: Presheaf
    comps: tuple
    _hash: int = field(default=0, init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((self.src, self.tgt, self.comps)))

    def __eq__(self, other):
        return (
            isinstance(other, PresheafMor)
            and self._hash == other._hash
            and self.comps == other.comps
            and self.src == other.src
            and self.tgt == other.tgt
        )

    def __hash__(self):
        return self._hash

    def __getitem__(self, c) -> FinFn:
        return self.comps[self.src.base.object_index[c]]

    def __repr__(self):
        body = ", ".join(f"{o}:{f.table}" for o, f in zip(self.src.base.objects, self.comps))
        return f"PMor({body})"


def is_natural(src: Presheaf, tgt: Presheaf, comps: tuple) -> bool:
    base = src.base
    for u in base.non_identity:
        a, b = base.object_index[base.src[u]], base.object_index[base.tgt[u]]
        if fs.fs_compose(tgt.restrict(u), comps[b]) != fs.fs_compose(comps[a], src.restrict(u)):
            return False
    return True


def make_mor(src: Presheaf, tgt: Presheaf, comps, check: bool = True) -> PresheafMor:
    """``comps`` is a sequence aligned with base objects or a mapping; entries may be dicts."""
    base = src.base
    if isinstance(comps, Mapping):
        comps = [comps[o] for o in base.objects]
    out = []
    for i, c in enumerate(comps):
        if not isinstance(c, FinFn):
            c = FinFn.from_dict(src.at[i], tgt.at[i], dict(c))
        if c.dom != src.at[i] or c.cod != tgt.at[i]:
            raise DomainMismatch(f"component at {base.objects[i]} has the wrong ends", c)
        out.append(c)
    out = tuple(out)
    if check and not is_natural(src, tgt, out):
        raise ShapeMismatch("components are not natural", out)
    return PresheafMor(src, tgt, out)


class PresheafTopos(LexCategory):
    """``Set^(base^op)`` restricted to finite sets, with chosen limits and colimits."""

    has_initial = True
    has_pushouts = True

    def __init__(self, base: FiniteBaseCategory, name: str | None = None):
        self.base = base
        self.name = name or f"Psh({base.name})"
        self._hom_cache: dict = {}
        self._terminal = Presheaf(
            base,
            tuple(FinSet((POINT,)) for _ in base.objects),
            tuple(FinFn.identity(FinSet((POINT,))) for _ in base.arrows),
        )
        self._initial = Presheaf(
            base, tuple(FinSet(()) for _ in base.objects), tuple(FinFn.identity(FinSet(())) for _ in base.arrows)
        )

    def presheaf(self, at: Mapping, res: Mapping | None = None) -> Presheaf:
        return make_presheaf(self.base, at, res)

    def mor(self, src: Presheaf, tgt: Presheaf, comps) -> PresheafMor:
        return make_mor(src, tgt, comps)

    # Category surface
    def contains(self, a):
        return isinstance(a, Presheaf) and a.base is self.base

    def dom(self, f):
        return f.src

    def cod(self, f):
        return f.tgt

    def identity(self, a):
        return PresheafMor(a, a, tuple(FinFn.identity(s) for s in a.at))

    def compose(self, g, f):
        if f.tgt != g.src:
            raise DomainMismatch("presheaf morphisms are not composable", (g, f))
        return PresheafMor(f.src, g.tgt, tuple(fs.fs_compose(y, x) for y, x in zip(g.comps, f.comps)))

    def hom(self, a, b):
        key = (a, b)
        cached = self._hom_cache.get(key)
        if cached is None:
            cached = self._hom_cache[key] = tuple(self._enumerate_hom(a, b))
        return cached

    def _enumerate_hom(self, a: Presheaf, b: Presheaf):
        base = self.base
        n = len(base.objects)
        # arrows whose both ends are decided once object i is assigned
        checks = [[] for _ in range(n)]
        for u in base.non_identity:
            i, j = base.object_index[base.src[u]], base.object_index[base.tgt[u]]
            checks[max(i, j)].append((u, i, j))
        choices = [list(fs.all_functions(a.at[i], b.at[i])) for i in range(n)]
        current: list = [None] * n

        def search(i):
            if i == n:
                yield PresheafMor(a, b, tuple(current))
                return
            for c in choices[i]:
                current[i] = c
                ok = True
                for u, s, t in checks[i]:
                    if fs.fs_compose(b.restrict(u), current[t]) != fs.fs_compose(current[s], a.restrict(u)):
                        ok = False
                        break
                if ok:
                    yield from search(i + 1)
            current[i] = None

        yield from search(0)

    def is_iso(self, f):
        return all(c.is_iso() for c in f.comps)

    def inverse_or_none(self, f):
        if not self.is_iso(f):
            return None
        return PresheafMor(f.tgt, f.src, tuple(c.inverse() for c in f.comps))

    def inverse(self, f):
        g = self.inverse_or_none(f)
        if g is None:
            raise NotIso("presheaf morphism has a non-bijective component", f)
        return g

    # limits
    def terminal(self):
        return self._terminal

    def to_terminal(self, a):
        return PresheafMor(a, self._terminal, tuple(fs.to_terminal(s) for s in a.at))

    def _assemble(self, cones: list, restrict_leg) -> Presheaf:
        """Apex presheaf of pointwise cones; ``restrict_leg(u, cone_b)`` gives legs at ``a``."""
        base = self.base
        maps = []
        for u in base.arrows:
            i, j = base.object_index[base.src[u]], base.object_index[base.tgt[u]]
            if u in base.ids.values():
                maps.append(FinFn.identity(cones[i].apex))
            else:
                maps.append(cones[i].mediate(restrict_leg(u, cones[j], i, j)))
        return Presheaf(base, tuple(c.apex for c in cones), tuple(maps))

    def _limit(self, kind: str, maps: tuple, sources: tuple) -> Cone:
        """Pointwise limit; ``sources`` are the presheaves the legs land in."""
        base = self.base
        n = len(base.objects)
        cones = [fs.fs_limit(kind, *(m.comps[i] for m in maps)) for i in range(n)]

        def restrict_leg(u, cone_b, i, j):
            return [fs.fs_compose(src.restrict(u), leg) for src, leg in zip(sources, cone_b.legs)]

        apex = self._assemble(cones, restrict_leg)
        legs = tuple(
            PresheafMor(apex, src, tuple(cones[i].legs[k] for i in range(n))) for k, src in enumerate(sources)
        )

        def mediate(cone_legs):
            if len(cone_legs) != len(legs):
                raise NonCone("wrong number of legs", cone_legs)
            dom = cone_legs[0].src
            if any(l.src != dom for l in cone_legs):
                raise NonCone("legs do not share a domain", cone_legs)
            return PresheafMor(dom, apex, tuple(cones[i].mediate([l.comps[i] for l in cone_legs]) for i in range(n)))

        return Cone(apex, legs, mediate)

    def pullback(self, f, g):
        if f.tgt != g.tgt:
            raise ShapeMismatch("pullback needs a cospan", (f, g))
        return self._limit("pullback", (f, g), (f.src, g.src))

    def equalizer(self, f, g):
        if f.src != g.src or f.tgt != g.tgt:
            raise ShapeMismatch("equalizer needs a parallel pair", (f, g))
        return self._limit("equalizer", (f, g), (f.src,))

    def product(self, a, b):
        return self.pullback(self.to_terminal(a), self.to_terminal(b))

    # colimits
    def initial(self):
        return self._initial

    def from_initial(self, a):
        return PresheafMor(self._initial, a, tuple(fs.from_initial(s) for s in a.at))

    def _colimit(self, kind: str, maps: tuple, targets: tuple) -> Cocone:
        base = self.base
        n = len(base.objects)
        cocones = [fs.fs_colimit(kind, *(m.comps[i] for m in maps)) for i in range(n)]
        sets = tuple(c.apex for c in cocones)
        res = []
        for u in base.arrows:
            i, j = base.object_index[base.src[u]], base.object_index[base.tgt[u]]
            if u in base.ids.values():
                res.append(FinFn.identity(sets[i]))
            else:
                legs = [fs.fs_compose(inj, t.restrict(u)) for t, inj in zip(targets, cocones[i].injections)]
                res.append(cocones[j].comediate(legs))
        apex = Presheaf(base, sets, tuple(res))
        injections = tuple(
            PresheafMor(t, apex, tuple(cocones[i].injections[k] for i in range(n))) for k, t in enumerate(targets)
        )

        def comediate(legs):
            if len(legs) != len(injections):
                raise NonCocone("wrong number of legs", legs)
            cod = legs[0].tgt
            if any(l.tgt != cod for l in legs):
                raise NonCocone("legs do not share a codomain", legs)
            return PresheafMor(apex, cod, tuple(cocones[i].comediate([l.comps[i] for l in legs]) for i in range(n)))

        return Cocone(apex, injections, comediate)

    def pushout(self, f, g):
        if f.src != g.src:
            raise ShapeMismatch("pushout needs a span", (f, g))
        return self._colimit("pushout", (f, g), (f.tgt, g.tgt))

    def coequalizer(self, f, g):
        if f.src != g.src or f.tgt != g.tgt:
            raise ShapeMismatch("coequalizer needs a parallel pair", (f, g))
        return self._colimit("coequalizer", (f, g), (f.tgt,))

    def coproduct(self, a, b):
        return self.pushout(self.from_initial(a), self.from_initial(b))

    # enumeration helpers
    def presheaves_up_to(self, size: int, sizes: Iterable[tuple] | None = None):
        """All presheaves whose components are ``{0..k-1}`` with ``k <= size``, in a fixed order."""
        base = self.base
        if sizes is None:
            sizes = itertools.product(range(size + 1), repeat=len(base.objects))
        out = []
        for dims in sizes:
            sets = {o: FinSet.range(k) for o, k in zip(base.objects, dims)}
            gens = base.non_identity
            options = [list(fs.all_functions(sets[base.tgt[u]], sets[base.src[u]])) for u in gens]
            for choice in itertools.product(*options):
                try:
                    out.append(make_presheaf(base, sets, dict(zip(gens, choice))))
                except ShapeMismatch:
                    continue
        return out

    def default_probes(self, size: int = 2, budget: int | None = None, seed: int = 0, include_terminal: bool = True) -> ProbeSet:
        objs = list(self.presheaves_up_to(size))
        if include_terminal:
            objs.append(self.terminal())
        return ProbeSet.full(self, objs, budget=budget, seed=seed)

    def yoneda(self, c) -> Presheaf:
        base = self.base
        at = {d: FinSet.of(base.hom(d, c)) for d in base.objects}
        res = {}
        for u in base.non_identity:
            a, b = base.src[u], base.tgt[u]
            res[u] = {f: base.compose(f, u) for f in at[b]}
        return make_presheaf(base, at, res)

    # subterminals
    def is_subterminal(self, u: Presheaf) -> bool:
        return self.contains(u) and all(len(s) <= 1 for s in u.at)

    def subterminal(self, support: Iterable) -> Presheaf:
        """The subterminal with ``U(c) = {•}`` exactly for ``c`` in ``support``."""
        support = set(support)
        base = self.base
        for c in support:
            if c not in base.objects:
                raise NotSubterminal(f"unknown base object {c}", c)
        for u in base.non_identity:
            if base.tgt[u] in support and base.src[u] not in support:
                raise NotSubterminal(
                    f"support is not closed under restriction along {u}: {base.src[u]} is missing", u
                )
        pt, empty = FinSet((POINT,)), FinSet(())
        at = {o: (pt if o in support else empty) for o in base.objects}
        res = {}
        for u in base.non_identity:
            res[u] = FinFn(at[base.tgt[u]], at[base.src[u]], tuple(POINT for _ in at[base.tgt[u]]))
        return make_presheaf(base, at, res)

    def support(self, u: Presheaf) -> tuple:
        return tuple(o for o, s in zip(self.base.objects, u.at) if len(s))

    def subterminals(self) -> list:
        """Every subterminal, ordered by support size then base-object order."""
        base = self.base
        out = []
        for r in range(len(base.objects) + 1):
            for supp in itertools.combinations(base.objects, r):
                try:
                    out.append(self.subterminal(supp))
                except NotSubterminal:
                    continue
        return out

    def require_subterminal(self, u: Presheaf) -> None:
        if not self.is_subterminal(u):
            raise NotSubterminal(f"{u!r} is not a subterminal of {self.name}", u)


def subterminal_enumerate(topos_or_base) -> list:
    if isinstance(topos_or_base, FiniteBaseCategory):
        topos_or_base = PresheafTopos(topos_or_base)
    return topos_or_base.subterminals()


def psh_limits_colimits(topos: PresheafTopos, kind: str, *maps):
    """Dispatch by name; ``kind`` is one of terminal, initial, pullback, equalizer, product, pushout, coequalizer, coproduct."""
    if kind == "terminal":
        t = topos.terminal()
        return Cone(t, (), lambda legs: topos.to_terminal(legs[0]) if legs else None)
    if kind == "initial":
        i = topos.initial()
        return Cocone(i, (), lambda legs: topos.from_initial(legs[0]) if legs else None)
    table = {
        "pullback": topos.pullback,
        "equalizer": topos.equalizer,
        "product": topos.product,
        "pushout": topos.pushout,
        "coequalizer": topos.coequalizer,
        "coproduct": topos.coproduct,
    }
    if kind not in table:
        raise ShapeMismatch(f"unknown (co)limit kind {kind!r}")
    return table[kind](*maps)
