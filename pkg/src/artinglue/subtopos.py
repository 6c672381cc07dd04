"""Open and closed reflections of a presheaf topos along a subterminal, zero
functors, kernels and cokernels."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import finset as fs
from .category import (
    Adjunction,
    FullSubcategory,
    LexCategory,
    LexFunctor,
    NatTrans,
    ProbeSet,
    functor_compose,
    identity_functor,
    inclusion_functor,
)
from .errors import NotSubterminal, NotZeroComposite
from .finset import POINT, FinFn, FinSet
from .laws import Report
from .presheaf import Presheaf, PresheafMor, PresheafTopos


@dataclass
class OpenReflection:
    topos: PresheafTopos
    U: Presheaf
    slice: FullSubcategory
    E: LexFunctor
    E_star: LexFunctor
    theta: NatTrans
    epsilon: NatTrans

    @property
    def adjunction(self) -> Adjunction:
        return Adjunction(self.E, self.E_star, self.theta, self.epsilon, name="E ⊣ E*")


@dataclass
class ClosedReflection:
    topos: PresheafTopos
    U: Presheaf
    kernel: FullSubcategory
    K: LexFunctor
    K_star: LexFunctor
    zeta: NatTrans
    delta: NatTrans
    injection_U: dict = field(default_factory=dict, repr=False)

    @property
    def adjunction(self) -> Adjunction:
        return Adjunction(self.K_star, self.K, self.zeta, self.delta, name="K* ⊣ K")

    def p1(self, g: Presheaf) -> PresheafMor:
        """The pushout injection ``U -> K*(G)``."""
        self.K_star.obj(g)
        return self.injection_U[g]


def _sieve(topos: PresheafTopos, U: Presheaf, c) -> tuple:
    """Arrows ``f: d -> c`` with ``U(d)`` inhabited, i.e. the elements of ``y(c) × U``."""
    base = topos.base
    return tuple(f for f in base.arrows if base.tgt[f] == c and len(U[base.src[f]]))


def open_reflection(topos: PresheafTopos, U: Presheaf) -> OpenReflection:
    topos.require_subterminal(U)
    base = topos.base
    U_support = set(topos.support(U))
    slice_cat = FullSubcategory(
        topos,
        lambda X: all(len(X[c]) == 0 or c in U_support for c in base.objects),
        name=f"{topos.name}/U",
        terminal=U,
    )
    sieves = {c: _sieve(topos, U, c) for c in base.objects}
    sieve_index = {c: {f: i for i, f in enumerate(s)} for c, s in sieves.items()}

    def e_obj(X):
        return topos.product(X, U).apex

    def e_mor(f):
        cone = topos.product(f.tgt, U)
        src = topos.product(f.src, U)
        return cone.mediate((topos.compose(f, src.legs[0]), src.legs[1]))

    E = LexFunctor(topos, slice_cat, e_obj, e_mor, name="E")

    def families(H: Presheaf, c) -> FinSet:
        arrows = sieves[c]
        options = [H[base.src[f]].elements for f in arrows]
        out = []
        for phi in itertools.product(*options):
            ok = True
            for i, f in enumerate(arrows):
                d = base.src[f]
                for g in base.non_identity:
                    if base.tgt[g] != d:
                        continue
                    j = sieve_index[c][base.compose(f, g)]
                    if phi[j] != H.restrict(g)(phi[i]):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                out.append(phi)
        return FinSet.of(out)

    def es_obj(H):
        at = {c: families(H, c) for c in base.objects}
        res = {}
        for v in base.non_identity:
            a, b = base.src[v], base.tgt[v]
            idx = [sieve_index[b][base.compose(v, f)] for f in sieves[a]]
            res[v] = FinFn(at[b], at[a], tuple(tuple(phi[j] for j in idx) for phi in at[b]))
        return topos.presheaf(at, res)

    def es_mor(k):
        src, tgt = E_star.obj(k.src), E_star.obj(k.tgt)
        comps = []
        for c in base.objects:
            arrows = sieves[c]
            comps.append(
                FinFn(
                    src[c],
                    tgt[c],
                    tuple(tuple(k[base.src[f]](x) for f, x in zip(arrows, phi)) for phi in src[c]),
                )
            )
        return PresheafMor(src, tgt, tuple(comps))

    E_star = LexFunctor(slice_cat, topos, es_obj, es_mor, name="E*")

    def theta_at(X):
        target = E_star.obj(E.obj(X))
        comps = []
        for c in base.objects:
            arrows = sieves[c]
            comps.append(
                FinFn(
                    X[c],
                    target[c],
                    tuple(tuple((X.restrict(f)(x), POINT) for f in arrows) for x in X[c]),
                )
            )
        return PresheafMor(X, target, tuple(comps))

    def epsilon_at(H):
        src = E.obj(E_star.obj(H))
        comps = []
        for c in base.objects:
            if c in U_support:
                j = sieve_index[c][base.ids[c]]
                comps.append(FinFn(src[c], H[c], tuple(phi[j] for phi, _ in src[c])))
            else:
                comps.append(fs.from_initial(H[c]))
        return PresheafMor(src, H, tuple(comps))

    theta = NatTrans(identity_functor(topos), functor_compose(E_star, E), theta_at, name="θ")
    epsilon = NatTrans(functor_compose(E, E_star), identity_functor(slice_cat), epsilon_at, name="ε")
    return OpenReflection(topos, U, slice_cat, E, E_star, theta, epsilon)


def closed_reflection(topos: PresheafTopos, U: Presheaf) -> ClosedReflection:
    topos.require_subterminal(U)

    def in_kernel(X):
        return topos.is_iso(topos.product(X, U).legs[1])

    kernel = FullSubcategory(topos, in_kernel, name=f"Ker[{topos.name}]", initial=U)
    pushouts: dict = {}
    injection_U: dict = {}

    def cocone(G):
        try:
            return pushouts[G]
        except KeyError:
            prod = topos.product(G, U)
            co = pushouts[G] = topos.pushout(prod.legs[0], prod.legs[1])
            injection_U[G] = co.injections[1]
            return co

    def ks_obj(G):
        return cocone(G).apex

    def ks_mor(f):
        src, tgt = cocone(f.src), cocone(f.tgt)
        return src.comediate((topos.compose(tgt.injections[0], f), tgt.injections[1]))

    K_star = LexFunctor(topos, kernel, ks_obj, ks_mor, name="K*")
    K = inclusion_functor(kernel, name="K")

    def zeta_at(G):
        return cocone(G).injections[0]

    def delta_at(N):
        co = cocone(N)
        (u_to_n,) = topos.hom(U, N)
        return co.comediate((topos.identity(N), u_to_n))

    zeta = NatTrans(identity_functor(topos), functor_compose(K, K_star), zeta_at, name="ζ")
    delta = NatTrans(functor_compose(K_star, K), identity_functor(kernel), delta_at, name="δ")
    return ClosedReflection(topos, U, kernel, K, K_star, zeta, delta, injection_U)


@dataclass
class Verdict:
    ok: bool
    witness: object = None
    checked: int = 0

    def __bool__(self):
        return self.ok


def zero_check(F: LexFunctor, probes: ProbeSet) -> Verdict:
    """Whether ``F`` sends every probe object to a terminal object (and morphisms to forced maps)."""
    tgt = F.target
    n = 0
    for X in probes.objects:
        n += 1
        if not tgt.is_terminal(F.obj(X)):
            return Verdict(False, X, n)
    for f in probes.morphisms:
        n += 1
        a, b = tgt.dom(F.mor(f)), tgt.cod(F.mor(f))
        hs = tgt.hom(a, b)
        if len(hs) != 1 or not tgt.mor_eq(hs[0], F.mor(f)):
            return Verdict(False, f, n)
    return Verdict(True, None, n)


@dataclass
class Factorization:
    functor: LexFunctor
    iso: NatTrans
    report: Report


@dataclass
class Cokernel:
    source_functor: LexFunctor
    U: Presheaf
    reflection: OpenReflection

    @property
    def E(self) -> LexFunctor:
        return self.reflection.E

    def factorizer(self, T: LexFunctor, probes: ProbeSet) -> Factorization:
        """For ``T`` with ``T F`` zero: ``T E*`` and the isomorphism ``T E* E ≅ T``.

        Each component is checked against the chain
        ``T(G) ≅ T(G × U) ≅ T(E*E(G) × U) ≅ T(E*E(G))`` and the composite is
        confirmed to be ``T(θ_G)``.
        """
        F = self.source_functor
        verdict = zero_check(functor_compose(T, F), _image_probes(F, probes))
        if not verdict:
            raise NotZeroComposite(f"{T.name} is not zero on the image of {F.name}", verdict.witness)
        refl = self.reflection
        topos, U = refl.topos, self.U
        X = T.target
        TE = functor_compose(T, refl.E_star)
        rep = Report(f"factorizer {T.name}")
        back = NatTrans(
            functor_compose(TE, refl.E),
            T,
            lambda G: X.inverse(T.mor(refl.theta[G])),
            name=f"{T.name}θ⁻¹",
        )
        for G in probes.objects:
            theta = refl.theta[G]
            EG = refl.E_star.obj(refl.E.obj(G))
            pg = topos.product(G, U)
            pe = topos.product(EG, U)
            theta_u = pe.mediate((topos.compose(theta, pg.legs[0]), pg.legs[1]))
            steps = (T.mor(pg.legs[0]), T.mor(theta_u), T.mor(pe.legs[0]))
            all_iso = all(X.is_iso(s) for s in steps)
            rep.add(f"chain isomorphisms at {G!r}", all_iso, 3, None if all_iso else G)
            if all_iso:
                chain = X.compose_all(steps[2], steps[1], X.inverse(steps[0]))
                ok = X.mor_eq(chain, T.mor(theta))
                rep.add(f"chain collapses to Tθ at {G!r}", ok, 1, None if ok else G)
        return Factorization(TE, back, rep)


def _image_probes(F: LexFunctor, probes: ProbeSet) -> ProbeSet:
    src = F.source
    objs = [src.initial()] if getattr(src, "has_initial", False) else [src.terminal()]
    return ProbeSet(tuple(objs), tuple(src.identity(o) for o in objs))


def cokernel_of(F: LexFunctor, probes: ProbeSet | None = None) -> Cokernel:
    """The open reflection at ``U = F(0)``."""
    topos = F.target
    while isinstance(topos, FullSubcategory):
        topos = topos.ambient
    U = F.obj(F.source.initial())
    if not topos.is_subterminal(U):
        raise NotSubterminal(f"{F.name}(0) is not subterminal", U)
    return Cokernel(F, U, open_reflection(topos, U))


@dataclass
class Kernel:
    functor: LexFunctor
    category: FullSubcategory
    K: LexFunctor

    def members(self, objects) -> list:
        return [X for X in objects if self.category.contains(X)]

    def factor(self, T: LexFunctor, probes: ProbeSet) -> LexFunctor:
        """Corestrict ``T`` to the kernel, which requires ``F T`` zero on probes."""
        verdict = zero_check(functor_compose(self.functor, T), probes)
        if not verdict:
            raise NotZeroComposite(f"{self.functor.name}{T.name} is not zero", verdict.witness)
        return LexFunctor(T.source, self.category, T.obj, T.mor, name=f"{T.name}|Ker")


def kernel_of(F: LexFunctor) -> Kernel:
    tgt = F.target
    src = F.source
    sub = FullSubcategory(src, lambda X: tgt.is_terminal(F.obj(X)), name=f"Ker({F.name})")
    return Kernel(F, sub, inclusion_functor(sub, name="K"))


def slice_probes(refl: OpenReflection, probes: ProbeSet) -> ProbeSet:
    """Probe objects of the ambient topos that lie in the slice, plus their morphisms."""
    objs = [X for X in probes.objects if refl.slice.contains(X)]
    if refl.U not in objs:
        objs.append(refl.U)
    return ProbeSet.full(refl.topos, objs)


def kernel_probes(cl: ClosedReflection, probes: ProbeSet) -> ProbeSet:
    objs = [X for X in probes.objects if cl.kernel.contains(X)]
    for X in probes.objects:
        k = cl.K_star.obj(X)
        if k not in objs:
            objs.append(k)
    return ProbeSet.full(cl.topos, objs)
