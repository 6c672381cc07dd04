"""Execute scenario tasks and collect deterministic reports."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

from . import fixtures as fx
from .category import LexFunctor, ProbeSet, const_terminal, functor_compose
from .errors import ArtinGlueError
from .ext_functor import baer_colimit, check_coequalizer_universal, check_coproduct_universal, collation_check, pointwise_product
from .extensions import (
    AdjointSplitExtension,
    associated_nat,
    enumerate_nats,
    extension_verify,
    gamma_functor,
    glueing_extension,
    nat_equal,
    psi_left_adjoint,
    two_morphism_exists,
)
from .glueing import cartesian_lift, check_cartesian, gl_objects, gl_probes, glue_construct, phi, phi_inverse, pullback_representation_check
from .laws import Report, check_adjunction, check_category, check_functor, check_nat_iso
from .presheaf import PresheafTopos
from .scenario import Scenario, Task, presheaves_on, resolve_subterminal
from .subtopos import closed_reflection, cokernel_of, kernel_of, kernel_probes, open_reflection, slice_probes, zero_check

log = logging.getLogger("artinglue")

DEFAULT_BUDGET = 10**5
GL_PROBE_CAP = 40


@dataclass
class RunConfig:
    probe_size: int = 2
    seed: int = 0
    budget: int = DEFAULT_BUDGET


@dataclass
class TaskReport:
    index: int
    line: int
    task: str
    kind: str
    status: str
    checks: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    message: str | None = None
    seconds: float = 0.0

    def as_dict(self) -> dict:
        out = {
            "index": self.index,
            "line": self.line,
            "task": self.task,
            "kind": self.kind,
            "status": self.status,
            "checks": self.checks,
            "details": self.details,
        }
        if self.message is not None:
            out["message"] = self.message
        return out


@dataclass
class ScenarioReport:
    source: str
    config: RunConfig
    tasks: list = field(default_factory=list)

    @property
    def counts(self) -> dict:
        out = {"tasks": len(self.tasks), "pass": 0, "fail": 0, "error": 0}
        for t in self.tasks:
            out[t.status] += 1
        return out

    @property
    def ok(self) -> bool:
        return all(t.status == "pass" for t in self.tasks)

    def as_dict(self) -> dict:
        return {
            "source": self.source,
            "config": {"probe_size": self.config.probe_size, "seed": self.config.seed, "budget": self.config.budget},
            "summary": self.counts,
            "tasks": [t.as_dict() for t in self.tasks],
        }


class _Ctx:
    def __init__(self, sc: Scenario, task: Task, cfg: RunConfig):
        self.sc, self.task, self.cfg = sc, task, cfg
        self.details: dict = {}

    def probes(self, topos) -> ProbeSet:
        base = fx.default_probes_for(topos, self.cfg.probe_size)
        extra = [p for p in presheaves_on(self.sc, topos) if p not in base.objects]
        if not extra and len(base.morphisms) <= self.cfg.budget:
            return base
        return ProbeSet.full(topos, list(base.objects) + extra, budget=self.cfg.budget, seed=self.cfg.seed)

    def topos(self, i: int = 0) -> PresheafTopos:
        return self.sc.topos(self.task.args[i], self.task.line)

    def U(self, topos):
        return resolve_subterminal(self.sc, topos, self.task.options.get("U"), self.task.line)

    def functor(self, name: str) -> LexFunctor:
        return self.sc.functors[name]

    def gl(self, gl_cat, n_probes, h_probes) -> ProbeSet:
        cap = int(self.task.options.get("cap", GL_PROBE_CAP))
        return gl_probes(gl_cat, n_probes, h_probes, budget=self.cfg.budget, seed=self.cfg.seed, max_objects=cap)


def _task_subterminals(ctx: _Ctx) -> Report:
    topos = ctx.topos()
    subs = topos.subterminals()
    rep = Report(f"subterminals of {topos.name}")
    ctx.details["count"] = len(subs)
    ctx.details["supports"] = [list(topos.support(u)) for u in subs]
    probes = ctx.probes(topos)
    bad = next((u for u in subs if not topos.is_subterminal(u)), None)
    rep.add("each is subterminal", bad is None, len(subs), bad)
    bad = next(
        (X for X in probes.objects if topos.is_subterminal(X) and not any(topos.is_iso(h) for u in subs for h in topos.hom(X, u))),
        None,
    )
    rep.add("every probe subterminal is listed", bad is None, len(probes.objects), bad)
    if "expect" in ctx.task.options:
        want = int(ctx.task.options["expect"])
        rep.add(f"count is {want}", len(subs) == want, 1, None if len(subs) == want else len(subs))
    return rep


def _task_adjunction(ctx: _Ctx) -> Report:
    which = ctx.task.args[0]
    if which in ("open", "closed"):
        topos = ctx.topos(1)
        U = ctx.U(topos)
        probes = ctx.probes(topos)
        if which == "open":
            refl = open_reflection(topos, U)
            return check_adjunction(refl.adjunction, probes, slice_probes(refl, probes))
        cl = closed_reflection(topos, U)
        return check_adjunction(cl.adjunction, probes, kernel_probes(cl, probes))
    if which in ("pi1", "pi2"):
        return _glue_adjunction(ctx, ctx.functor(ctx.task.args[1]), which)
    psi = ctx.sc.nats[ctx.task.args[1]]
    H = ctx.probes(psi.source.source)
    m = gamma_functor(psi, H)
    la = psi_left_adjoint(m)
    e1, e2 = m.source.probes(), m.target.probes()
    return check_adjunction(la.adjunction, e2.G, e1.G)


def _glue_adjunction(ctx: _Ctx, F: LexFunctor, which: str) -> Report:
    glue = glue_construct(F)
    n_probes, h_probes = ctx.probes(F.target), ctx.probes(F.source)
    g = ctx.gl(glue.category, n_probes, h_probes)
    if which == "pi2":
        return check_adjunction(glue.pi2_adjunction, g, h_probes)
    return check_adjunction(glue.pi1_adjunction, g, n_probes)


def _task_glue(ctx: _Ctx) -> Report:
    F = ctx.functor(ctx.task.args[0])
    check = ctx.task.options.get("check", "extension")
    if check in ("pi1", "pi2"):
        return _glue_adjunction(ctx, F, check)
    glue = glue_construct(F)
    n_probes, h_probes = ctx.probes(F.target), ctx.probes(F.source)
    if check == "category":
        return check_category(glue.category, ctx.gl(glue.category, n_probes, h_probes))
    ext = glueing_extension(F, n_probes, h_probes)
    ctx.details["glueing objects"] = len(ext.probes().G.objects)
    return extension_verify(ext)


def _probe_override(ctx: _Ctx, topos) -> ProbeSet:
    choice = ctx.task.options.get("probes", "default")
    if choice == "default":
        return ctx.probes(topos)
    size = int(choice)
    return topos.default_probes(size, budget=ctx.cfg.budget, seed=ctx.cfg.seed)


def _task_pullback(ctx: _Ctx) -> Report:
    topos = ctx.topos()
    U = ctx.U(topos)
    probes = _probe_override(ctx, topos)
    ctx.details["probe objects"] = len(probes.objects)
    ctx.details["probe morphisms"] = len(probes.morphisms)
    return pullback_representation_check(topos, U, probes)


def _kernel_cokernel_testers(cl, refl) -> list:
    topos = cl.topos
    return [
        refl.E,
        const_terminal(topos, topos),
        const_terminal(topos, fx.FINSET),
        functor_compose(refl.E_star, refl.E),
    ]


def _task_kernel_cokernel(ctx: _Ctx) -> Report:
    topos = ctx.topos()
    U = ctx.U(topos)
    probes = ctx.probes(topos)
    cl = closed_reflection(topos, U)
    cok = cokernel_of(cl.K)
    ker = kernel_of(cok.E)
    rep = Report(f"kernel and cokernel over U={topos.support(U)}")
    bad = next((X for X in probes.objects if ker.category.contains(X) != cl.kernel.contains(X)), None)
    rep.add("kernel of the cokernel is the closed part", bad is None, len(probes.objects), bad)
    testers = _kernel_cokernel_testers(cl, cok.reflection)
    for T in testers:
        fac = cok.factorizer(T, probes)
        rep.extend(fac.report, f"{T.name}: ")
        rep.extend(check_nat_iso(fac.iso, probes), f"{T.name}: ")
    ctx.details["factorized functors"] = len(testers)
    return rep


def _task_phi(ctx: _Ctx) -> Report:
    topos = ctx.topos()
    U = ctx.U(topos)
    ext = AdjointSplitExtension.from_subterminal(topos, U, probe_size=ctx.cfg.probe_size)
    m = phi(ext)
    rep = Report(f"Φ and its inverse over U={topos.support(U)}")
    rep.extend(m.verify(), "Φ: ")
    pi = phi_inverse(ext)
    p, q = ext.probes(), m.target.probes()
    rep.extend(check_nat_iso(pi.unit, p.G), "Φ′Φ ≅ Id: ")
    rep.extend(check_nat_iso(pi.counit, q.G), "ΦΦ′ ≅ Id: ")
    a = associated_nat(m)
    bad = next((h for h in p.H.objects if a[h] != ext.N.identity(a.source.obj(h))), None)
    rep.add("associated transformation is the identity", bad is None, len(p.H.objects), bad)
    return rep


def _task_extension(ctx: _Ctx) -> Report:
    topos = ctx.topos()
    U = ctx.U(topos)
    ext = AdjointSplitExtension.from_subterminal(topos, U, probe_size=ctx.cfg.probe_size)
    return extension_verify(ext)


def _task_roundtrip(ctx: _Ctx) -> Report:
    what = ctx.task.args[0] if ctx.task.args else "gamma"
    if what == "phi":
        return _task_phi(_shift(ctx))
    if "psi" in ctx.task.options:
        nats = [ctx.sc.nats[ctx.task.options["psi"]]]
    else:
        fs = list(fx.fixture_functors().values())
        H = ctx.probes(fx.FINSET)
        nats = [n for F1 in fs for F2 in fs for n in enumerate_nats(F2, F1, H.objects, H.morphisms)]
    rep = Report("Γ⁻¹Γ = id")
    for psi in nats:
        H = ctx.probes(psi.source.source)
        m = gamma_functor(psi, H)
        rep.extend(m.verify(), f"Γ({psi.name}): ")
        back = associated_nat(m)
        rep.add(f"Γ⁻¹Γ({psi.name}) = {psi.name}", nat_equal(back, psi, H.objects), len(H.objects), None)
    ctx.details["transformations"] = len(nats)
    ctx.details["result"] = "Γ⁻¹Γ = id" if rep.passed else "Γ⁻¹Γ ≠ id"
    return rep


def _shift(ctx: _Ctx) -> _Ctx:
    task = Task(ctx.task.kind, ctx.task.args[1:], ctx.task.options, ctx.task.line, ctx.task.text)
    out = _Ctx(ctx.sc, task, ctx.cfg)
    out.details = ctx.details
    return out


def _task_lifts(ctx: _Ctx) -> Report:
    F = ctx.functor(ctx.task.args[0])
    glue = glue_construct(F)
    n_probes, h_probes = ctx.probes(F.target), ctx.probes(F.source)
    g = ctx.gl(glue.category, n_probes, h_probes)
    rep = Report(f"cartesian lifts over Gl({F.name})")
    counts = {"pi1": 0, "pi2": 0}
    for which, base_probes in (("pi1", n_probes), ("pi2", h_probes)):
        proj = glue.pi1 if which == "pi1" else glue.pi2
        base = proj.target
        for target in g.objects:
            end = proj.obj(target)
            for f in base_probes.morphisms:
                if not base.obj_eq(base.cod(f), end):
                    continue
                lift = cartesian_lift(glue, which, target, f)
                ok = base.mor_eq(proj.mor(lift), f) and glue.category.contains(lift.src)
                rep.add(f"{which} lift lies over its base map", ok, 1, None if ok else (target, f))
                rep.extend(check_cartesian(glue, which, lift, g), f"{which}: ")
                counts[which] += 1
    ctx.details["lifts"] = counts
    return _collapse(rep)


def _collapse(rep: Report) -> Report:
    """Merge repeated law names so large sweeps stay readable."""
    out = Report(rep.subject)
    merged: dict = {}
    for r in rep.results:
        if r.law not in merged:
            merged[r.law] = out.add(r.law, r.passed, r.checked, r.witness)
        else:
            m = merged[r.law]
            m.checked += r.checked
            if m.passed and not r.passed:
                m.passed, m.witness = False, r.witness
    return out


def _task_hom_bijection(ctx: _Ctx) -> Report:
    F1, F2 = ctx.functor(ctx.task.args[0]), ctx.functor(ctx.task.args[1])
    H = ctx.probes(F1.source)
    nats = enumerate_nats(F2, F1, H.objects, H.morphisms)
    ms = [gamma_functor(psi, H) for psi in nats]
    classes: list = []
    for m in ms:
        if not any(two_morphism_exists(c, m) for c in classes):
            classes.append(m)
    rep = Report(f"Hom({F2.name}, {F1.name}) against Ext(Γ({F1.name}), Γ({F2.name}))")
    rep.add("class count equals hom count", len(classes) == len(nats), len(ms), None if len(classes) == len(nats) else (len(classes), len(nats)))
    assoc = [associated_nat(c) for c in classes]
    clash = next(
        ((i, j) for i in range(len(assoc)) for j in range(i) if nat_equal(assoc[i], assoc[j], H.objects)),
        None,
    )
    rep.add("associated transformation is injective on classes", clash is None, len(assoc), clash)
    ctx.details["hom"] = len(nats)
    ctx.details["classes"] = len(classes)
    return rep


def _task_collation(ctx: _Ctx) -> Report:
    F = ctx.functor(ctx.task.args[0])
    T = ctx.functor(ctx.task.options.get("T", "Id"))
    S = ctx.functor(ctx.task.options.get("S", "Id"))
    ext = glueing_extension(F, ctx.probes(F.target), ctx.probes(F.source))
    return collation_check(T, S, ext, ctx.probes(T.source), ctx.probes(F.target), ctx.gl, ctx.probes(S.target))


def _task_baer(ctx: _Ctx) -> Report:
    what, a, b = ctx.task.args[:3]
    if what == "coproduct":
        F1, F2 = ctx.functor(a), ctx.functor(b)
        H = ctx.probes(F1.source)
        cocone = baer_colimit("coproduct", glueing_extension(F1), glueing_extension(F2), probes=H)
        rep = Report(f"Γ({F1.name}) + Γ({F2.name})")
        P, _, _ = pointwise_product(F1, F2)
        n_probes = ctx.probes(F1.target)
        got = gl_objects(cocone.apex.G, n_probes.objects, H.objects)
        want = gl_objects(glueing_extension(P).G, n_probes.objects, H.objects)
        rep.add("apex is Γ of the pointwise product", got == want, len(got), None)
        if "equals" in ctx.task.options:
            other = glueing_extension(ctx.functor(ctx.task.options["equals"]))
            same = gl_objects(other.G, n_probes.objects, H.objects)
            rep.add(f"apex equals Γ({ctx.task.options['equals']}) on probe objects", got == same, len(got), None)
        rep.extend(check_coproduct_universal(cocone, _testers(F1), H.objects, H.morphisms))
        return rep
    m1, m2 = gamma_functor(ctx.sc.nats[a]), gamma_functor(ctx.sc.nats[b])
    H = ctx.probes(m1.source.F.source)
    cocone = baer_colimit("coequalizer", m1, m2, probes=H)
    return check_coequalizer_universal(cocone, (m1, m2), _testers(m1.target.F), H.objects, H.morphisms)


def _testers(F: LexFunctor) -> list:
    if F.source is fx.FINSET and F.target is fx.FINSET:
        return list(fx.fixture_functors().values())
    return [const_terminal(F.source, F.target), F]


def _task_laws(ctx: _Ctx) -> Report:
    F = ctx.functor(ctx.task.args[0])
    return check_functor(F, ctx.probes(F.source))


def _task_zero(ctx: _Ctx) -> Report:
    F = ctx.functor(ctx.task.args[0])
    v = zero_check(F, ctx.probes(F.source))
    want = ctx.task.options.get("expect", "true").lower() in ("true", "1", "yes")
    rep = Report(f"{F.name} is zero")
    ctx.details["zero"] = v.ok
    rep.add(f"zero is {str(want).lower()}", v.ok == want, v.checked, v.witness)
    return rep


_RUNNERS = {
    "subterminals": _task_subterminals,
    "adjunction": _task_adjunction,
    "glue": _task_glue,
    "pullback-representation": _task_pullback,
    "kernel-cokernel": _task_kernel_cokernel,
    "phi": _task_phi,
    "extension": _task_extension,
    "roundtrip": _task_roundtrip,
    "lifts": _task_lifts,
    "hom-bijection": _task_hom_bijection,
    "collation": _task_collation,
    "baer": _task_baer,
    "laws": _task_laws,
    "zero": _task_zero,
}


def run_task(sc: Scenario, task: Task, cfg: RunConfig | None = None, index: int = 0) -> TaskReport:
    cfg = cfg or RunConfig()
    ctx = _Ctx(sc, task, cfg)
    start = time.perf_counter()
    log.info("task %d: %s", index, task.text)
    try:
        rep = _RUNNERS[task.kind](ctx)
    except ArtinGlueError as exc:
        out = TaskReport(index, task.line, task.text, task.kind, "error", details=ctx.details)
        out.message = f"{type(exc).__name__}: {exc}"
        if exc.witness is not None:
            out.details["witness"] = repr(exc.witness)
        out.seconds = time.perf_counter() - start
        return out
    status = "pass" if rep.passed else "fail"
    checks = [r.as_dict() for r in rep.results]
    out = TaskReport(index, task.line, task.text, task.kind, status, checks, ctx.details)
    out.seconds = time.perf_counter() - start
    log.info("task %d: %s in %.2fs", index, status, out.seconds)
    return out


def run_scenario(sc: Scenario, cfg: RunConfig | None = None, source: str = "<scenario>") -> ScenarioReport:
    cfg = cfg or RunConfig()
    report = ScenarioReport(source, cfg)
    for i, task in enumerate(sc.tasks):
        report.tasks.append(run_task(sc, task, cfg, i))
    return report
