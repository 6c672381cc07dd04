"""Adjoint split extensions ``N --K--> G <=E,E*=> H`` and their morphisms."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .category import (
    Adjunction,
    LexCategory,
    LexFunctor,
    NatTrans,
    ProbeSet,
    functor_compose,
    identity_functor,
    identity_nat,
    mate,
    nat_from_table,
)
from .errors import BoundaryMismatch, EndMismatch, InvalidMorphism, NotAnExtension, NotGlueingForm, NotIso, NotNatural
from .glueing import GlMor, GlObj, Glueing, gl_probes, glue_construct
from .laws import Report, check_adjunction, check_functor, check_nat
from .subtopos import closed_reflection, kernel_probes, open_reflection, slice_probes, zero_check


@dataclass
class ExtProbes:
    N: ProbeSet
    G: ProbeSet
    H: ProbeSet


@dataclass(eq=False)
class AdjointSplitExtension:
    N: LexCategory
    G: LexCategory
    H: LexCategory
    K: LexFunctor
    E: LexFunctor
    E_star: LexFunctor
    epsilon: NatTrans
    theta: NatTrans
    K_star: LexFunctor
    zeta: NatTrans
    delta: NatTrans
    name: str = "ext"
    glueing: Glueing | None = None
    probe_factory: Callable | None = field(default=None, repr=False)
    _probes: ExtProbes | None = field(default=None, repr=False)
    _gamma_inv: LexFunctor | None = field(default=None, repr=False)

    @property
    def open_adjunction(self) -> Adjunction:
        return Adjunction(self.E, self.E_star, self.theta, self.epsilon, name="E ⊣ E*")

    @property
    def closed_adjunction(self) -> Adjunction:
        return Adjunction(self.K_star, self.K, self.zeta, self.delta, name="K* ⊣ K")

    @property
    def is_glueing_form(self) -> bool:
        return self.glueing is not None

    @property
    def F(self) -> LexFunctor:
        if self.glueing is None:
            raise NotGlueingForm(f"{self.name} is not in glueing form")
        return self.glueing.F

    def probes(self) -> ExtProbes:
        if self._probes is None:
            if self.probe_factory is None:
                raise NotAnExtension(f"{self.name} has no probe sets")
            self._probes = self.probe_factory(self)
        return self._probes

    def gamma_inverse_functor(self) -> LexFunctor:
        """``K* E*``; for a glueing form this is ``F`` itself."""
        if self._gamma_inv is None:
            if self.glueing is not None:
                self._gamma_inv = self.glueing.F
            else:
                self._gamma_inv = functor_compose(self.K_star, self.E_star)
        return self._gamma_inv

    @classmethod
    def from_subterminal(cls, topos, U, probe_size: int = 2, name: str | None = None) -> "AdjointSplitExtension":
        o = open_reflection(topos, U)
        c = closed_reflection(topos, U)

        def factory(ext):
            g = topos.default_probes(probe_size)
            return ExtProbes(kernel_probes(c, g), g, slice_probes(o, g))

        return cls(
            c.kernel,
            topos,
            o.slice,
            c.K,
            o.E,
            o.E_star,
            o.epsilon,
            o.theta,
            c.K_star,
            c.zeta,
            c.delta,
            name=name or f"{topos.name}@U={topos.support(U)}",
            probe_factory=factory,
        )


_GAMMA_CACHE: dict = {}


def glueing_extension(F: LexFunctor, n_probes: ProbeSet | None = None, h_probes: ProbeSet | None = None) -> AdjointSplitExtension:
    """``Γ(F)``: ``N --π1*--> Gl(F) <=π2,π2*=> H``."""
    key = id(F)
    cached = _GAMMA_CACHE.get(key)
    if cached is not None and cached.glueing.F is F and n_probes is None and h_probes is None:
        return cached
    glue = glue_construct(F)
    gl = glue.category

    def factory(ext):
        from .fixtures import default_probes_for

        np_ = n_probes or default_probes_for(gl.N)
        hp = h_probes or default_probes_for(gl.H)
        return ExtProbes(np_, gl_probes(gl, np_, hp), hp)

    ext = AdjointSplitExtension(
        gl.N,
        gl,
        gl.H,
        glue.pi1_star,
        glue.pi2,
        glue.pi2_star,
        glue.eps,
        glue.theta,
        glue.pi1,
        glue.zeta,
        glue.delta,
        name=f"Γ({F.name})",
        glueing=glue,
        probe_factory=factory,
    )
    if n_probes is None and h_probes is None:
        _GAMMA_CACHE[key] = ext
    return ext


def extension_verify(ext: AdjointSplitExtension, probes: ExtProbes | None = None) -> Report:
    probes = probes or ext.probes()
    G, H, N = ext.G, ext.H, ext.N
    rep = Report(f"extension {ext.name}")
    rep.extend(check_adjunction(ext.open_adjunction, probes.G, probes.H), "E ⊣ E*: ")
    rep.extend(check_adjunction(ext.closed_adjunction, probes.G, probes.N), "K* ⊣ K: ")
    bad = next((h for h in probes.H.objects if not H.is_iso(ext.epsilon[h])), None)
    rep.add("ε is invertible", bad is None, len(probes.H.objects), bad)
    bad = next((n for n in probes.N.objects if not N.is_iso(ext.delta[n])), None)
    rep.add("δ is invertible", bad is None, len(probes.N.objects), bad)
    verdict = zero_check(functor_compose(ext.E, ext.K), probes.N)
    rep.add("EK is zero", verdict.ok, verdict.checked, verdict.witness)
    bad = None
    for x in probes.G.objects:
        if H.is_terminal(ext.E.obj(x)) != G.is_iso(ext.zeta[x]):
            bad = x
            break
    rep.add("kernel of E is the essential image of K", bad is None, len(probes.G.objects), bad)
    u = ext.K.obj(N.initial()) if N.has_initial else None
    if u is not None:
        bad = None
        for x in probes.G.objects:
            pr = G.product(x, u)
            if not H.is_iso(ext.E.mor(pr.legs[0])):
                bad = x
                break
        rep.add("E inverts X × K(0) -> X (cokernel of K)", bad is None, len(probes.G.objects), bad)
    return rep


# -- morphisms ---------------------------------------------------------------------


@dataclass(eq=False)
class ExtMorphism:
    """``(Ψ, α: K2 -> ΨK1, β: E2Ψ -> E1, γ: E2* -> ΨE1*)`` from ``source`` to ``target``."""

    source: AdjointSplitExtension
    target: AdjointSplitExtension
    Psi: LexFunctor
    alpha: NatTrans
    beta: NatTrans
    gamma: NatTrans
    name: str = "m"
    psi: NatTrans | None = None  # set for Γ-images: the transformation they came from

    def __post_init__(self):
        if self.source.N is not self.target.N or self.source.H is not self.target.H:
            raise EndMismatch(f"{self.name}: extensions do not share kernel and cokernel categories")
        if self.Psi.source is not self.source.G or self.Psi.target is not self.target.G:
            raise BoundaryMismatch(f"{self.name}: Ψ does not run between the middle categories")

    def verify(self, probes: ExtProbes | None = None) -> Report:
        p1 = probes or self.source.probes()
        n_pr, h_pr, g_pr = p1.N, p1.H, p1.G
        rep = Report(f"morphism of extensions {self.name}")
        G2, H = self.target.G, self.source.H
        rep.extend(check_nat(self.alpha, n_pr), "α ")
        rep.extend(check_nat(self.beta, g_pr), "β ")
        rep.extend(check_nat(self.gamma, h_pr), "γ ")
        for label, nat, objs, cat in (
            ("α", self.alpha, n_pr.objects, G2),
            ("β", self.beta, g_pr.objects, H),
            ("γ", self.gamma, h_pr.objects, G2),
        ):
            bad = next((x for x in objs if not cat.is_iso(nat[x])), None)
            rep.add(f"{label} is invertible", bad is None, len(objs), bad)
        bad = coherence_failure(self, h_pr)
        rep.add("ε2 = ε1 (βE1*)(E2γ)", bad is None, len(h_pr.objects), bad)
        return rep


def coherence_failure(m: ExtMorphism, h_probes: ProbeSet):
    e1, e2 = m.source, m.target
    H = e1.H
    for h in h_probes.objects:
        rhs = H.compose_all(e1.epsilon[h], m.beta[e1.E_star.obj(h)], e2.E.mor(m.gamma[h]))
        if not H.mor_eq(e2.epsilon[h], rhs):
            return h
    return None


def identity_morphism(ext: AdjointSplitExtension) -> ExtMorphism:
    Psi = identity_functor(ext.G)
    return ExtMorphism(
        ext,
        ext,
        Psi,
        NatTrans(ext.K, functor_compose(Psi, ext.K), lambda n: ext.G.identity(ext.K.obj(n)), name="id"),
        NatTrans(functor_compose(ext.E, Psi), ext.E, lambda x: ext.H.identity(ext.E.obj(x)), name="id"),
        NatTrans(ext.E_star, functor_compose(Psi, ext.E_star), lambda h: ext.G.identity(ext.E_star.obj(h)), name="id"),
        name=f"id[{ext.name}]",
    )


def compose_morphisms(m2: ExtMorphism, m1: ExtMorphism) -> ExtMorphism:
    """Paste ``m2 ∘ m1`` for ``m1: e1 -> e2`` and ``m2: e2 -> e3``."""
    if m1.target is not m2.source:
        raise BoundaryMismatch(f"cannot compose {m2.name} after {m1.name}")
    e1, e3 = m1.source, m2.target
    G3, H = e3.G, e1.H
    P1, P2 = m1.Psi, m2.Psi
    Psi = functor_compose(P2, P1)
    alpha = NatTrans(e3.K, functor_compose(Psi, e1.K), lambda n: G3.compose(P2.mor(m1.alpha[n]), m2.alpha[n]), name="α")
    beta = NatTrans(functor_compose(e3.E, Psi), e1.E, lambda x: H.compose(m1.beta[x], m2.beta[P1.obj(x)]), name="β")
    gamma = NatTrans(
        e3.E_star, functor_compose(Psi, e1.E_star), lambda h: G3.compose(P2.mor(m1.gamma[h]), m2.gamma[h]), name="γ"
    )
    return ExtMorphism(e1, e3, Psi, alpha, beta, gamma, name=f"{m2.name}∘{m1.name}")


def beta_from_gamma(source: AdjointSplitExtension, target: AdjointSplitExtension, Psi: LexFunctor, alpha: NatTrans, gamma: NatTrans, probes: ExtProbes | None = None, name: str = "m") -> ExtMorphism:
    """Complete ``(Ψ, α, γ)`` with the unique ``β``, the mate of ``γ⁻¹``."""
    probes = probes or source.probes()
    G2 = target.G
    bad = next((n for n in probes.N.objects if not G2.is_iso(alpha[n])), None)
    if bad is not None:
        raise NotIso("α has a non-invertible component", bad)
    bad = next((h for h in probes.H.objects if not G2.is_iso(gamma[h])), None)
    if bad is not None:
        raise NotIso("γ has a non-invertible component", bad)
    gamma_inv = NatTrans(gamma.target, gamma.source, lambda h: G2.inverse(gamma[h]), name="γ⁻¹")
    beta = mate(source.open_adjunction, target.open_adjunction, gamma_inv, direction="left", along=Psi)
    beta.name = "β"
    return ExtMorphism(source, target, Psi, alpha, beta, gamma, name=name)


# -- 2-morphisms ---------------------------------------------------------------------


@dataclass
class TwoMorphism:
    tau: NatTrans
    report: Report


def two_morphism_exists(m1: ExtMorphism, m2: ExtMorphism, probes: ExtProbes | None = None) -> bool:
    """Only the criterion of :func:`two_morphism_find`, without building ``τ``."""
    if m1.source is not m2.source or m1.target is not m2.target:
        raise BoundaryMismatch("2-morphisms need parallel morphisms of extensions")
    e1 = m1.source
    probes = probes or e1.probes()
    G2 = m1.target.G
    P, Q = m1.Psi, m2.Psi
    for h in probes.H.objects:
        es = e1.E_star.obj(h)
        z = e1.zeta[es]
        n = e1.K_star.obj(es)
        lhs = G2.compose_all(m2.alpha[n], G2.inverse(m1.alpha[n]), P.mor(z))
        rhs = G2.compose_all(Q.mor(z), m2.gamma[h], G2.inverse(m1.gamma[h]))
        if not G2.mor_eq(lhs, rhs):
            return False
    return True


def two_morphism_find(m1: ExtMorphism, m2: ExtMorphism, probes: ExtProbes | None = None) -> TwoMorphism | None:
    """The unique ``τ: Ψ -> Ψ'`` compatible with ``α, α'`` and ``γ, γ'``, or ``None``.

    The criterion is ``(α'α⁻¹K1*E1*)(Ψζ1E1*) = (Ψ'ζ1E1*)(γ'γ⁻¹)`` on probes;
    each component ``τ_X`` is then found by exhaustive search for the unique
    map ``ΨX -> Ψ'X`` making both faces of the pullback cube commute.
    """
    if not two_morphism_exists(m1, m2, probes):
        return None
    e1 = m1.source
    probes = probes or e1.probes()
    G2 = m1.target.G
    P, Q = m1.Psi, m2.Psi

    def aa(n):  # α'α⁻¹ at n: ΨK1 n -> Ψ'K1 n
        return G2.compose(m2.alpha[n], G2.inverse(m1.alpha[n]))

    def gg(h):  # γ'γ⁻¹ at h: ΨE1* h -> Ψ'E1* h
        return G2.compose(m2.gamma[h], G2.inverse(m1.gamma[h]))

    def component(x):
        z, th = e1.zeta[x], e1.theta[x]
        want_z = G2.compose(aa(e1.K_star.obj(x)), P.mor(z))
        want_t = G2.compose(gg(e1.E.obj(x)), P.mor(th))
        qz, qt = Q.mor(z), Q.mor(th)
        sols = [
            t
            for t in G2.hom(P.obj(x), Q.obj(x))
            if G2.mor_eq(G2.compose(qz, t), want_z) and G2.mor_eq(G2.compose(qt, t), want_t)
        ]
        if len(sols) != 1:
            raise InvalidMorphism(f"τ at {x!r} has {len(sols)} candidates", x)
        return sols[0]

    tau = NatTrans(P, Q, component, name="τ")
    rep = Report(f"2-morphism {m1.name} => {m2.name}")
    try:
        bad = next((x for x in probes.G.objects if not G2.is_iso(tau[x])), None)
    except InvalidMorphism as exc:
        rep.add("unique component", False, 0, exc.witness)
        return TwoMorphism(tau, rep)
    rep.add("unique invertible components", bad is None, len(probes.G.objects), bad)
    rep.extend(check_nat(tau, probes.G), "τ ")
    bad = next(
        (n for n in probes.N.objects if not G2.mor_eq(tau[e1.K.obj(n)], aa(n))),
        None,
    )
    rep.add("τK1 = α'α⁻¹", bad is None, len(probes.N.objects), bad)
    bad = next(
        (h for h in probes.H.objects if not G2.mor_eq(tau[e1.E_star.obj(h)], gg(h))),
        None,
    )
    rep.add("τE1* = γ'γ⁻¹", bad is None, len(probes.H.objects), bad)
    return TwoMorphism(tau, rep)


def associated_nat(m: ExtMorphism) -> NatTrans:
    """``(δ2K1*E1*)(K2*α⁻¹K1*E1*)(K2*Ψζ1E1*)(K2*γ): K2*E2* -> K1*E1*``."""
    e1, e2 = m.source, m.target
    N, G2 = e1.N, e2.G
    if m.Psi.source is not e1.G:
        raise InvalidMorphism("Ψ does not start at the source extension")

    def component(h):
        es = e1.E_star.obj(h)
        n = e1.K_star.obj(es)
        return N.compose_all(
            e2.delta[n],
            e2.K_star.mor(G2.inverse(m.alpha[n])),
            e2.K_star.mor(m.Psi.mor(e1.zeta[es])),
            e2.K_star.mor(m.gamma[h]),
        )

    return NatTrans(e2.gamma_inverse_functor(), e1.gamma_inverse_functor(), component, name=f"Γ⁻¹({m.name})")


# -- the equivalence with natural transformations --------------------------------------


def check_natural(psi: NatTrans, probes: ProbeSet) -> None:
    rep = check_nat(psi, probes)
    if not rep.passed:
        raise NotNatural(f"{psi.name} is not natural", rep.failures[0].witness)


def gamma_functor(psi: NatTrans, probes: ProbeSet | None = None, name: str | None = None) -> ExtMorphism:
    """``Γ(ψ): Γ(F1) -> Γ(F2)`` for ``ψ: F2 -> F1``, by pulling ``ell`` back along ``ψ_H``."""
    F2, F1 = psi.source, psi.target
    e1, e2 = glueing_extension(F1), glueing_extension(F2)
    if probes is not None:
        check_natural(psi, probes)
    gl1, gl2 = e1.G, e2.G
    N, H = gl1.N, gl1.H
    cones: dict = {}

    def cone(a: GlObj):
        try:
            return cones[a]
        except KeyError:
            c = cones[a] = N.pullback(a.ell, psi[a.h])
            return c

    def on_obj(a):
        c = cone(a)
        return GlObj(c.apex, a.h, c.legs[1])

    def on_mor(m):
        src, tgt = cone(m.src), cone(m.tgt)
        f = tgt.mediate((N.compose(m.f, src.legs[0]), N.compose(F2.mor(m.g), src.legs[1])))
        return GlMor(on_obj(m.src), on_obj(m.tgt), f, m.g)

    Psi = LexFunctor(gl1, gl2, on_obj, on_mor, name=f"Ψ[{psi.name}]")
    one = H.terminal()

    def alpha_at(n):
        src = e2.K.obj(n)
        tgt_pre = e1.K.obj(n)
        c = cone(tgt_pre)
        return GlMor(src, on_obj(tgt_pre), c.mediate((N.identity(n), src.ell)), H.identity(one))

    def gamma_at(h):
        src = e2.E_star.obj(h)
        pre = e1.E_star.obj(h)
        c = cone(pre)
        return GlMor(src, on_obj(pre), c.mediate((psi[h], N.identity(F2.obj(h)))), H.identity(h))

    alpha = NatTrans(e2.K, functor_compose(Psi, e1.K), alpha_at, name="α")
    beta = NatTrans(functor_compose(e2.E, Psi), e1.E, lambda a: H.identity(a.h), name="β")
    gamma = NatTrans(e2.E_star, functor_compose(Psi, e1.E_star), gamma_at, name="γ")
    return ExtMorphism(e1, e2, Psi, alpha, beta, gamma, name=name or f"Γ({psi.name})", psi=psi)


def gamma_inverse(ext_or_morphism):
    """On extensions ``K* E*``; on morphisms the associated transformation."""
    if isinstance(ext_or_morphism, ExtMorphism):
        return associated_nat(ext_or_morphism)
    if isinstance(ext_or_morphism, AdjointSplitExtension):
        return ext_or_morphism.gamma_inverse_functor()
    raise NotAnExtension("expected an extension or a morphism of extensions", ext_or_morphism)


def enumerate_nats(F: LexFunctor, G: LexFunctor, objects, morphisms, name: str = "ψ") -> list:
    """Every family of components on ``objects`` that is natural for ``morphisms``."""
    tgt = F.target
    src = F.source
    choices = [list(tgt.hom(F.obj(x), G.obj(x))) for x in objects]
    idx = {x: i for i, x in enumerate(objects)}
    by_last: list = [[] for _ in objects]
    for f in morphisms:
        i, j = idx[src.dom(f)], idx[src.cod(f)]
        by_last[max(i, j)].append((f, i, j))
    out = []
    current: list = [None] * len(objects)

    def search(k):
        if k == len(objects):
            out.append(nat_from_table(F, G, dict(zip(objects, current)), name=f"{name}{len(out)}"))
            return
        for c in choices[k]:
            current[k] = c
            if all(
                tgt.mor_eq(tgt.compose(G.mor(f), current[i]), tgt.compose(current[j], F.mor(f)))
                for f, i, j in by_last[k]
            ):
                search(k + 1)
        current[k] = None

    search(0)
    return out


def nat_equal(a: NatTrans, b: NatTrans, objects) -> bool:
    cat = a.cod_category
    return all(cat.mor_eq(a[x], b[x]) for x in objects)


# -- the left adjoint of a glueing-form morphism ------------------------------------------


@dataclass
class PsiLeftAdjoint:
    left: LexFunctor
    adjunction: Adjunction
    psi: NatTrans


def psi_left_adjoint(m: ExtMorphism, probes: ExtProbes | None = None) -> PsiLeftAdjoint:
    """``Ψ* ⊣ Ψ`` with ``Ψ*(N, H, ell) = (N, H, ψ_H ell)``, ``ψ`` the associated transformation."""
    if not (m.source.is_glueing_form and m.target.is_glueing_form):
        raise NotGlueingForm(f"{m.name} is not between glueing-form extensions")
    e1, e2 = m.source, m.target
    gl1, gl2 = e1.G, e2.G
    N = gl1.N
    psi = m.psi if m.psi is not None else associated_nat(m)

    def on_obj(a):
        return GlObj(a.n, a.h, N.compose(psi[a.h], a.ell))

    def on_mor(f):
        return GlMor(on_obj(f.src), on_obj(f.tgt), f.f, f.g)

    left = LexFunctor(gl2, gl1, on_obj, on_mor, name="Ψ*")
    canon = m if m.psi is not None else gamma_functor(psi)
    P = canon.Psi

    def cone(a):
        return N.pullback(a.ell, psi[a.h])

    def unit_at(a):
        b = on_obj(a)
        c = cone(b)
        return GlMor(a, P.obj(b), c.mediate((N.identity(a.n), a.ell)), gl2.H.identity(a.h))

    def counit_at(a):
        c = cone(a)
        return GlMor(on_obj(P.obj(a)), a, c.legs[0], gl1.H.identity(a.h))

    unit = NatTrans(identity_functor(gl2), functor_compose(P, left), unit_at, name="η")
    counit = NatTrans(functor_compose(left, P), identity_functor(gl1), counit_at, name="ε")
    if canon is not m:
        found = two_morphism_find(m, canon, probes)
        if found is None:
            raise NotGlueingForm(f"{m.name} is not 2-isomorphic to the Γ-image of its transformation")
        tau = found.tau
        G2 = gl2
        unit = NatTrans(
            identity_functor(gl2),
            functor_compose(m.Psi, left),
            lambda a, u=unit: G2.compose(G2.inverse(tau[left.obj(a)]), u[a]),
            name="η",
        )
        counit = NatTrans(
            functor_compose(left, m.Psi),
            identity_functor(gl1),
            lambda a, c=counit: gl1.compose(c[a], left.mor(tau[a])),
            name="ε",
        )
        right = m.Psi
    else:
        right = P
    return PsiLeftAdjoint(left, Adjunction(left, right, unit, counit, name="Ψ* ⊣ Ψ"), psi)


def transport(m: ExtMorphism, Psi2: LexFunctor, rho: NatTrans, name: str | None = None) -> ExtMorphism:
    """Replace ``Ψ`` by an isomorphic ``Ψ2`` along ``ρ: Ψ -> Ψ2``, keeping the morphism coherent."""
    G2, H = m.target.G, m.source.H
    e1, e2 = m.source, m.target
    alpha = NatTrans(e2.K, functor_compose(Psi2, e1.K), lambda n: G2.compose(rho[e1.K.obj(n)], m.alpha[n]), name="α")
    gamma = NatTrans(
        e2.E_star, functor_compose(Psi2, e1.E_star), lambda h: G2.compose(rho[e1.E_star.obj(h)], m.gamma[h]), name="γ"
    )
    beta = NatTrans(
        functor_compose(e2.E, Psi2), e1.E, lambda x: H.compose(m.beta[x], e2.E.mor(G2.inverse(rho[x]))), name="β"
    )
    return ExtMorphism(e1, e2, Psi2, alpha, beta, gamma, name=name or f"{m.name}'")
