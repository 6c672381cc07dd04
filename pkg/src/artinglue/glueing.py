"""The Artin glueing ``Gl(F)`` of a lex functor ``F: H -> N``.

Objects are triples ``(n, h, ell)`` with ``ell: n -> F(h)``; morphisms are
pairs ``(f, g)`` whose square commutes.  Limits and colimits are computed
componentwise, with the comparison map ``ell`` induced on the apex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .category import (
    Adjunction,
    Cocone,
    Cone,
    LexCategory,
    LexFunctor,
    NatTrans,
    ProbeSet,
    functor_compose,
    identity_functor,
)
from .errors import BoundaryMismatch, DomainMismatch, InvalidMorphism, NotAnExtension, NotLex, NotIso
from .laws import Report, check_functor


@dataclass(frozen=True)
class GlObj:
    n: Any
    h: Any
    ell: Any


@dataclass(frozen=True)
class GlMor:
    src: GlObj
    tgt: GlObj
    f: Any
    g: Any


class GlueingCategory(LexCategory):
    def __init__(self, F: LexFunctor, name: str | None = None):
        self.F = F
        self.N = F.target
        self.H = F.source
        self.name = name or f"Gl({F.name})"
        self.has_initial = self.N.has_initial and self.H.has_initial
        self.has_pushouts = self.N.has_pushouts and self.H.has_pushouts
        self._hom_cache: dict = {}
        N, H = self.N, self.H
        t = H.terminal()
        if not N.is_terminal(F.obj(t)):
            raise NotLex(f"{F.name} does not preserve the terminal object", F.obj(t))
        self._terminal = GlObj(N.terminal(), t, N.unique_to(N.terminal(), F.obj(t)))

    # construction with validation
    def obj(self, n, h, ell) -> GlObj:
        N = self.N
        if not N.obj_eq(N.dom(ell), n) or not N.obj_eq(N.cod(ell), self.F.obj(h)):
            raise DomainMismatch("ell must run n -> F(h)", (n, h, ell))
        return GlObj(n, h, ell)

    def mor(self, src: GlObj, tgt: GlObj, f, g) -> GlMor:
        N = self.N
        if not self._square(src, tgt, f, g):
            raise InvalidMorphism("the square F(g)∘ell = ell'∘f does not commute", (f, g))
        return GlMor(src, tgt, f, g)

    def _square(self, src, tgt, f, g) -> bool:
        N = self.N
        return N.mor_eq(N.compose(self.F.mor(g), src.ell), N.compose(tgt.ell, f))

    def contains(self, a) -> bool:
        if not isinstance(a, GlObj):
            return False
        N = self.N
        return N.obj_eq(N.dom(a.ell), a.n) and N.obj_eq(N.cod(a.ell), self.F.obj(a.h))

    # category surface
    def dom(self, m):
        return m.src

    def cod(self, m):
        return m.tgt

    def identity(self, a):
        return GlMor(a, a, self.N.identity(a.n), self.H.identity(a.h))

    def compose(self, m2, m1):
        if m1.tgt != m2.src:
            raise DomainMismatch("glueing morphisms are not composable", (m2, m1))
        return GlMor(m1.src, m2.tgt, self.N.compose(m2.f, m1.f), self.H.compose(m2.g, m1.g))

    def hom(self, a, b):
        key = (a, b)
        cached = self._hom_cache.get(key)
        if cached is None:
            out = []
            N, H, F = self.N, self.H, self.F
            for g in H.hom(a.h, b.h):
                lhs = N.compose(F.mor(g), a.ell)
                for f in N.hom(a.n, b.n):
                    if N.mor_eq(lhs, N.compose(b.ell, f)):
                        out.append(GlMor(a, b, f, g))
            cached = self._hom_cache[key] = tuple(out)
        return cached

    def is_iso(self, m):
        return self.N.is_iso(m.f) and self.H.is_iso(m.g)

    def inverse_or_none(self, m):
        fi, gi = self.N.inverse_or_none(m.f), self.H.inverse_or_none(m.g)
        if fi is None or gi is None:
            return None
        return GlMor(m.tgt, m.src, fi, gi)

    # limits
    def terminal(self):
        return self._terminal

    def to_terminal(self, a):
        return GlMor(a, self._terminal, self.N.to_terminal(a.n), self.H.to_terminal(a.h))

    def pullback(self, m1, m2):
        if m1.tgt != m2.tgt:
            raise DomainMismatch("pullback needs a cospan", (m1, m2))
        N, H, F = self.N, self.H, self.F
        a, b = m1.src, m2.src
        pn = N.pullback(m1.f, m2.f)
        ph = H.pullback(m1.g, m2.g)
        image = N.pullback(F.mor(m1.g), F.mor(m2.g))
        comparison = image.mediate((F.mor(ph.legs[0]), F.mor(ph.legs[1])))
        back = N.inverse_or_none(comparison)
        if back is None:
            raise NotLex(f"{F.name} does not preserve the pullback of {m1.g!r}, {m2.g!r}", (m1.g, m2.g))
        into = image.mediate((N.compose(a.ell, pn.legs[0]), N.compose(b.ell, pn.legs[1])))
        apex = GlObj(pn.apex, ph.apex, N.compose(back, into))
        legs = (
            GlMor(apex, a, pn.legs[0], ph.legs[0]),
            GlMor(apex, b, pn.legs[1], ph.legs[1]),
        )

        def mediate(cone):
            u, v = cone
            return GlMor(u.src, apex, pn.mediate((u.f, v.f)), ph.mediate((u.g, v.g)))

        return Cone(apex, legs, mediate)

    def initial(self):
        if not self.has_initial:
            return super().initial()
        N, H = self.N, self.H
        z = H.initial()
        return GlObj(N.initial(), z, N.from_initial(self.F.obj(z)))

    def from_initial(self, a):
        return GlMor(self.initial(), a, self.N.from_initial(a.n), self.H.from_initial(a.h))

    def pushout(self, m1, m2):
        if m1.src != m2.src:
            raise DomainMismatch("pushout needs a span", (m1, m2))
        N, H, F = self.N, self.H, self.F
        a, b = m1.tgt, m2.tgt
        qn = N.pushout(m1.f, m2.f)
        qh = H.pushout(m1.g, m2.g)
        ell = qn.comediate((N.compose(F.mor(qh.injections[0]), a.ell), N.compose(F.mor(qh.injections[1]), b.ell)))
        apex = GlObj(qn.apex, qh.apex, ell)
        inj = (GlMor(a, apex, qn.injections[0], qh.injections[0]), GlMor(b, apex, qn.injections[1], qh.injections[1]))

        def comediate(legs):
            u, v = legs
            return GlMor(apex, u.tgt, qn.comediate((u.f, v.f)), qh.comediate((u.g, v.g)))

        return Cocone(apex, inj, comediate)


@dataclass
class Glueing:
    """``Gl(F)`` with its projections, their adjoints and the units."""

    category: GlueingCategory
    pi1: LexFunctor
    pi2: LexFunctor
    pi1_star: LexFunctor
    pi2_star: LexFunctor
    theta: NatTrans
    zeta: NatTrans
    eps: NatTrans
    delta: NatTrans

    @property
    def F(self) -> LexFunctor:
        return self.category.F

    @property
    def pi2_adjunction(self) -> Adjunction:
        return Adjunction(self.pi2, self.pi2_star, self.theta, self.eps, name="π2 ⊣ π2*")

    @property
    def pi1_adjunction(self) -> Adjunction:
        return Adjunction(self.pi1, self.pi1_star, self.zeta, self.delta, name="π1 ⊣ π1*")


_GLUE_CACHE: dict = {}


def glue_construct(F: LexFunctor, probes: ProbeSet | None = None) -> Glueing:
    """Build ``Gl(F)``; with ``probes`` on ``H`` the lex laws of ``F`` are checked first."""
    if probes is not None:
        rep = check_functor(F, probes)
        if not rep.passed:
            raise NotLex(f"{F.name} fails its functor laws", rep.failures[0])
    if id(F) in _GLUE_CACHE and _GLUE_CACHE[id(F)].F is F:
        return _GLUE_CACHE[id(F)]
    gl = GlueingCategory(F)
    N, H = gl.N, gl.H
    pi1 = LexFunctor(gl, N, lambda a: a.n, lambda m: m.f, name="π1")
    pi2 = LexFunctor(gl, H, lambda a: a.h, lambda m: m.g, name="π2")

    def p2s_obj(h):
        fh = F.obj(h)
        return GlObj(fh, h, N.identity(fh))

    pi2_star = LexFunctor(H, gl, p2s_obj, lambda g: GlMor(p2s_obj(H.dom(g)), p2s_obj(H.cod(g)), F.mor(g), g), name="π2*")
    one = H.terminal()
    f_one = F.obj(one)

    def p1s_obj(n):
        return GlObj(n, one, N.unique_to(n, f_one))

    pi1_star = LexFunctor(
        N, gl, p1s_obj, lambda f: GlMor(p1s_obj(N.dom(f)), p1s_obj(N.cod(f)), f, H.identity(one)), name="π1*"
    )
    theta = NatTrans(
        identity_functor(gl),
        functor_compose(pi2_star, pi2),
        lambda a: GlMor(a, p2s_obj(a.h), a.ell, H.identity(a.h)),
        name="θ'",
    )
    zeta = NatTrans(
        identity_functor(gl),
        functor_compose(pi1_star, pi1),
        lambda a: GlMor(a, p1s_obj(a.n), N.identity(a.n), H.to_terminal(a.h)),
        name="ζ'",
    )
    eps = NatTrans(functor_compose(pi2, pi2_star), identity_functor(H), lambda h: H.identity(h), name="ε'")
    delta = NatTrans(functor_compose(pi1, pi1_star), identity_functor(N), lambda n: N.identity(n), name="δ'")
    out = Glueing(gl, pi1, pi2, pi1_star, pi2_star, theta, zeta, eps, delta)
    _GLUE_CACHE[id(F)] = out
    return out


def gl_objects(gl: GlueingCategory, n_objects, h_objects, include_terminal: bool = True) -> list:
    """Every triple over the given ``N`` and ``H`` objects."""
    out = []
    for h in h_objects:
        fh = gl.F.obj(h)
        for n in n_objects:
            for ell in gl.N.hom(n, fh):
                out.append(GlObj(n, h, ell))
    if include_terminal and gl.terminal() not in out:
        out.append(gl.terminal())
    return out


def gl_probes(gl: GlueingCategory, n_probes: ProbeSet, h_probes: ProbeSet, budget: int | None = None, seed: int = 0, max_objects: int | None = None) -> ProbeSet:
    objs = gl_objects(gl, n_probes.objects, h_probes.objects)
    if max_objects is not None and len(objs) > max_objects:
        import random

        rng = random.Random(seed)
        keep = sorted(rng.sample(range(len(objs)), max_objects))
        objs = [objs[i] for i in keep]
        if gl.terminal() not in objs:
            objs.append(gl.terminal())
    return ProbeSet.full(gl, objs, budget=budget, seed=seed)


# -- fibrations ----------------------------------------------------------------


def cartesian_lift(glue: Glueing, which: str, target: GlObj, f) -> GlMor:
    gl = glue.category
    N, H, F = gl.N, gl.H, gl.F
    if which == "pi2":
        if not H.obj_eq(H.cod(f), target.h):
            raise BoundaryMismatch("base map does not end at the target's H-component", f)
        cone = N.pullback(target.ell, F.mor(f))
        src = GlObj(cone.apex, H.dom(f), cone.legs[1])
        return GlMor(src, target, cone.legs[0], f)
    if which == "pi1":
        if not N.obj_eq(N.cod(f), target.n):
            raise BoundaryMismatch("base map does not end at the target's N-component", f)
        src = GlObj(N.dom(f), target.h, N.compose(target.ell, f))
        return GlMor(src, target, f, H.identity(target.h))
    raise BoundaryMismatch(f"unknown projection {which!r}")


def check_cartesian(glue: Glueing, which: str, lift: GlMor, probes: ProbeSet) -> Report:
    """Every probe ``ψ: B -> target`` over ``f∘h`` factors uniquely through the lift over ``h``."""
    gl = glue.category
    proj = glue.pi2 if which == "pi2" else glue.pi1
    base = proj.target
    rep = Report(f"cartesian lift over {which}")
    f = proj.mor(lift)
    a_src = lift.src
    checked, witness = 0, None
    for b in probes.objects:
        for psi in gl.hom(b, lift.tgt):
            for h in base.hom(proj.obj(b), proj.obj(a_src)):
                if not base.mor_eq(base.compose(f, h), proj.mor(psi)):
                    continue
                sols = [
                    chi
                    for chi in gl.hom(b, a_src)
                    if base.mor_eq(proj.mor(chi), h) and gl.mor_eq(gl.compose(lift, chi), psi)
                ]
                checked += 1
                if len(sols) != 1 and witness is None:
                    witness = (psi, h, len(sols))
    rep.add("unique factorization", witness is None, checked, witness)
    return rep


# -- the comparison with the glueing form ---------------------------------------


def _require_extension(ext):
    from .extensions import AdjointSplitExtension

    if not isinstance(ext, AdjointSplitExtension):
        raise NotAnExtension(f"expected an adjoint split extension, got {type(ext).__name__}", ext)
    if not isinstance(ext, AdjointSplitExtension):
        raise NotAnExtension("expected an adjoint split extension", ext)


def phi(ext):
    """The morphism of extensions ``ext -> Γ(K* E*)`` sending ``G`` to ``(K*G, EG, K*θ_G)``."""
    from .extensions import ExtMorphism, ExtProbes, glueing_extension

    _require_extension(ext)
    cached = getattr(ext, "_phi", None)
    if cached is not None:
        return cached
    F = ext.gamma_inverse_functor()
    target = glueing_extension(F)
    gl = target.G
    if not ext.is_glueing_form:

        def factory(_):
            p = ext.probes()
            return ExtProbes(p.N, gl_probes(gl, p.N, p.H), p.H)

        target.probe_factory = factory
    N, H, G = ext.N, ext.H, ext.G
    K_star, E, theta = ext.K_star, ext.E, ext.theta

    def on_obj(x):
        return GlObj(K_star.obj(x), E.obj(x), K_star.mor(theta[x]))

    def on_mor(p):
        return GlMor(on_obj(G.dom(p)), on_obj(G.cod(p)), K_star.mor(p), E.mor(p))

    Phi = LexFunctor(G, gl, on_obj, on_mor, name="Φ")
    one = H.terminal()

    def alpha_at(n):
        kn = ext.K.obj(n)
        src = target.K.obj(n)
        return GlMor(src, on_obj(kn), N.inverse(ext.delta[n]), H.unique_to(one, E.obj(kn)))

    def gamma_at(h):
        es = ext.E_star.obj(h)
        return GlMor(target.E_star.obj(h), on_obj(es), N.identity(K_star.obj(es)), H.inverse(ext.epsilon[h]))

    alpha = NatTrans(target.K, functor_compose(Phi, ext.K), alpha_at, name="αΦ")
    beta = NatTrans(functor_compose(target.E, Phi), ext.E, lambda x: H.identity(E.obj(x)), name="βΦ")
    gamma = NatTrans(target.E_star, functor_compose(Phi, ext.E_star), gamma_at, name="γΦ")
    m = ExtMorphism(ext, target, Phi, alpha, beta, gamma, name="Φ")
    ext._phi = m
    return m


@dataclass
class PhiInverse:
    functor: LexFunctor
    unit: NatTrans  # Id_G -> Φ'Φ
    counit: NatTrans  # ΦΦ' -> Id_Gl
    phi: Any


def phi_inverse(ext) -> PhiInverse:
    """``Φ'`` sends ``(N, H, ell)`` to the pullback of ``K(ell)`` and ``ζ_{E*H}``."""
    _require_extension(ext)
    m = phi(ext)
    Phi = m.Psi
    gl = m.target.G
    G, N, H = ext.G, ext.N, ext.H
    K, K_star, E, E_star = ext.K, ext.K_star, ext.E, ext.E_star
    cones: dict = {}

    def cone(a: GlObj):
        try:
            return cones[a]
        except KeyError:
            c = cones[a] = G.pullback(K.mor(a.ell), ext.zeta[E_star.obj(a.h)])
            return c

    def on_obj(a):
        return cone(a).apex

    def on_mor(m_):
        src, tgt = cone(m_.src), cone(m_.tgt)
        return tgt.mediate((G.compose(K.mor(m_.f), src.legs[0]), G.compose(E_star.mor(m_.g), src.legs[1])))

    Phi_inv = LexFunctor(gl, G, on_obj, on_mor, name="Φ'")

    def unit_at(x):
        c = cone(Phi.obj(x))
        return c.mediate((ext.zeta[x], ext.theta[x]))

    def counit_at(a):
        c = cone(a)
        x = c.apex
        f = N.compose(ext.delta[a.n], K_star.mor(c.legs[0]))
        g = H.compose(ext.epsilon[a.h], E.mor(c.legs[1]))
        return GlMor(Phi.obj(x), a, f, g)

    unit = NatTrans(identity_functor(G), functor_compose(Phi_inv, Phi), unit_at, name="Φ'Φ≅Id")
    counit = NatTrans(functor_compose(Phi, Phi_inv), identity_functor(gl), counit_at, name="ΦΦ'≅Id")
    return PhiInverse(Phi_inv, unit, counit, m)


# -- pullback representation ------------------------------------------------------


def pullback_representation_check(topos, U, probes: ProbeSet, uniqueness_limit: int = 4096) -> Report:
    """Each probe ``G`` is the pullback of ``KK*θ_G`` and ``ζ_{E*EG}``, functorially."""
    from .subtopos import closed_reflection, open_reflection

    o = open_reflection(topos, U)
    c = closed_reflection(topos, U)
    rep = Report(f"pullback representation over U={topos.support(U)}")
    squares: dict = {}

    def square(g):
        if g not in squares:
            th = o.theta[g]
            cone = topos.pullback(c.K.mor(c.K_star.mor(th)), c.zeta[c.K.obj(o.E_star.obj(o.E.obj(g)))])
            comp = cone.mediate((c.zeta[g], th))
            squares[g] = (cone, comp)
        return squares[g]

    iso_ok, witness = 0, None
    for g in probes.objects:
        _, comp = square(g)
        if topos.is_iso(comp):
            iso_ok += 1
        elif witness is None:
            witness = g
    rep.add("comparison map is an isomorphism", witness is None, len(probes.objects), witness)
    med_witness, uniq_witness, uniq_checked = None, None, 0
    for p in probes.morphisms:
        g, g2 = p.src, p.tgt
        cone, comp = square(g)
        cone2, comp2 = square(g2)
        kk = c.K.mor(c.K_star.mor(p))
        ee = o.E_star.mor(o.E.mor(p))
        induced = cone2.mediate((topos.compose(kk, cone.legs[0]), topos.compose(ee, cone.legs[1])))
        back = topos.compose_all(topos.inverse(comp2), induced, comp)
        if back != p and med_witness is None:
            med_witness = p
        candidates = 1
        for s1, s2 in zip(g.at, g2.at):
            candidates *= max(len(s2), 1) ** len(s1)
        if candidates <= uniqueness_limit:
            uniq_checked += 1
            zeta2, theta2 = c.zeta[g2], o.theta[g2]
            want1 = topos.compose(kk, c.zeta[g])
            want2 = topos.compose(ee, o.theta[g])
            sols = [
                q
                for q in topos.hom(g, g2)
                if topos.compose(zeta2, q) == want1 and topos.compose(theta2, q) == want2
            ]
            if (len(sols) != 1 or sols[0] != p) and uniq_witness is None:
                uniq_witness = (p, len(sols))
    rep.add("cube mediation returns the probed morphism", med_witness is None, len(probes.morphisms), med_witness)
    rep.add("mediation is the unique solution", uniq_witness is None, uniq_checked, uniq_witness)
    return rep
