"""Probe-based law checking with counterexample reporting.

Every check iterates its probe data in the order given, so reports are
deterministic.  Failures are recorded, never raised.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any

from .category import Adjunction, Category, LexCategory, LexFunctor, NatTrans, ProbeSet
from .errors import ArtinGlueError

DEFAULT_CHECK_BUDGET = 400


@dataclass
class LawResult:
    law: str
    passed: bool
    checked: int = 0
    witness: Any = None

    def as_dict(self) -> dict:
        out = {"law": self.law, "passed": self.passed, "checked": self.checked}
        if self.witness is not None:
            out["witness"] = repr(self.witness)
        return out


@dataclass
class Report:
    subject: str
    results: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> list:
        return [r for r in self.results if not r.passed]

    def add(self, law: str, passed: bool, checked: int = 0, witness=None) -> LawResult:
        r = LawResult(law, passed, checked, witness)
        self.results.append(r)
        return r

    def extend(self, other: "Report", prefix: str = "") -> "Report":
        for r in other.results:
            self.results.append(LawResult(prefix + r.law, r.passed, r.checked, r.witness))
        return self

    def as_dict(self) -> dict:
        return {"subject": self.subject, "passed": self.passed, "results": [r.as_dict() for r in self.results]}

    def __str__(self):
        lines = [f"{self.subject}: {'PASS' if self.passed else 'FAIL'}"]
        for r in self.results:
            mark = "ok  " if r.passed else "FAIL"
            line = f"  {mark} {r.law} ({r.checked} checked)"
            if not r.passed:
                line += f" witness={r.witness!r}"
            lines.append(line)
        return "\n".join(lines)


class _Law:
    """Accumulates one law: stops at the first counterexample."""

    def __init__(self, report: Report, name: str):
        self.report, self.name = report, name
        self.checked = 0
        self.witness = None
        self.failed = False

    def check(self, ok: bool, witness) -> bool:
        self.checked += 1
        if not ok and not self.failed:
            self.failed, self.witness = True, witness
        return ok

    def error(self, exc: Exception, witness) -> None:
        self.check(False, (type(exc).__name__, str(exc), witness))

    def done(self) -> LawResult:
        return self.report.add(self.name, not self.failed, self.checked, self.witness)


def _sample(items: list, budget: int | None, seed: int) -> list:
    if budget is None or len(items) <= budget:
        return items
    rng = random.Random(seed)
    idx = sorted(rng.sample(range(len(items)), budget))
    return [items[i] for i in idx]


def composable_pairs(cat: Category, probes: ProbeSet, budget: int | None = None, seed: int = 0) -> list:
    by_dom: dict = {}
    for g in probes.morphisms:
        by_dom.setdefault(cat.dom(g), []).append(g)
    pairs = [(g, f) for f in probes.morphisms for g in by_dom.get(cat.cod(f), ())]
    return _sample(pairs, budget, seed)


def cospans(cat: Category, probes: ProbeSet, budget: int | None = None, seed: int = 0) -> list:
    by_cod: dict = {}
    for f in probes.morphisms:
        by_cod.setdefault(cat.cod(f), []).append(f)
    out = []
    for c in probes.objects:
        into = by_cod.get(c, ())
        out.extend((f, g) for f in into for g in into)
    return _sample(out, budget, seed)


def check_category(cat: Category, probes: ProbeSet, budget: int | None = DEFAULT_CHECK_BUDGET, seed: int = 0) -> Report:
    rep = Report(f"category {cat.name}")
    law = _Law(rep, "unit laws")
    for f in probes.morphisms:
        a, b = cat.dom(f), cat.cod(f)
        law.check(cat.mor_eq(cat.compose(f, cat.identity(a)), f) and cat.mor_eq(cat.compose(cat.identity(b), f), f), f)
    law.done()
    law = _Law(rep, "associativity")
    by_dom: dict = {}
    for g in probes.morphisms:
        by_dom.setdefault(cat.dom(g), []).append(g)
    triples = [
        (h, g, f)
        for f in probes.morphisms
        for g in by_dom.get(cat.cod(f), ())
        for h in by_dom.get(cat.cod(g), ())
    ]
    for h, g, f in _sample(triples, budget, seed):
        try:
            ok = cat.mor_eq(cat.compose(h, cat.compose(g, f)), cat.compose(cat.compose(h, g), f))
        except ArtinGlueError as exc:
            law.error(exc, (h, g, f))
            continue
        law.check(ok, (h, g, f))
    law.done()
    law = _Law(rep, "hom enumeration without repeats")
    for a in probes.objects:
        for b in probes.objects:
            hs = list(cat.hom(a, b))
            law.check(len(set(hs)) == len(hs), (a, b))
    law.done()
    if isinstance(cat, LexCategory):
        law = _Law(rep, "terminal object")
        t = cat.terminal()
        for a in probes.objects:
            law.check(len(cat.hom(a, t)) == 1, a)
        law.done()
        rep.extend(check_pullbacks(cat, probes, budget=budget, seed=seed))
    return rep


def check_pullback_cone(cat: LexCategory, f, g, probes: ProbeSet, cone=None, law: _Law | None = None) -> Report:
    """Universal property of the chosen pullback of ``f, g`` against probe cones."""
    rep = Report(f"pullback cone in {cat.name}")
    own = law is None
    if own:
        law = _Law(rep, "pullback universal property")
    cone = cone or cat.pullback(f, g)
    p, q = cone.legs
    law.check(cat.mor_eq(cat.compose(f, p), cat.compose(g, q)), ("square", f, g))
    a, b = cat.dom(f), cat.dom(g)
    for x in probes.objects:
        us = [u for u in cat.hom(x, a)]
        vs = [v for v in cat.hom(x, b)]
        hs = cat.hom(x, cone.apex)
        for u in us:
            fu = cat.compose(f, u)
            for v in vs:
                if not cat.mor_eq(fu, cat.compose(g, v)):
                    continue
                sols = [h for h in hs if cat.mor_eq(cat.compose(p, h), u) and cat.mor_eq(cat.compose(q, h), v)]
                med = cone.mediate((u, v))
                law.check(len(sols) == 1 and cat.mor_eq(sols[0], med), (f, g, u, v, len(sols)))
    if own:
        law.done()
    return rep


def check_pullbacks(cat: LexCategory, probes: ProbeSet, budget: int | None = DEFAULT_CHECK_BUDGET, seed: int = 0, cone_budget: int = 40) -> Report:
    rep = Report(f"pullbacks in {cat.name}")
    law = _Law(rep, "pullback universal property")
    for f, g in _sample(cospans(cat, probes), cone_budget, seed):
        try:
            check_pullback_cone(cat, f, g, probes, law=law)
        except ArtinGlueError as exc:
            law.error(exc, (f, g))
    law.done()
    return rep


def check_functor(F: LexFunctor, probes: ProbeSet, budget: int | None = DEFAULT_CHECK_BUDGET, seed: int = 0, lex: bool = True) -> Report:
    rep = Report(f"functor {F.name}")
    src, tgt = F.source, F.target
    law = _Law(rep, "typing")
    for f in probes.morphisms:
        try:
            Ff = F.mor(f)
            ok = tgt.obj_eq(tgt.dom(Ff), F.obj(src.dom(f))) and tgt.obj_eq(tgt.cod(Ff), F.obj(src.cod(f)))
        except ArtinGlueError as exc:
            law.error(exc, f)
            continue
        law.check(ok, f)
    law.done()
    law = _Law(rep, "preserves identities")
    for a in probes.objects:
        law.check(tgt.mor_eq(F.mor(src.identity(a)), tgt.identity(F.obj(a))), a)
    law.done()
    law = _Law(rep, "preserves composition")
    for g, f in composable_pairs(src, probes, budget, seed):
        try:
            ok = tgt.mor_eq(F.mor(src.compose(g, f)), tgt.compose(F.mor(g), F.mor(f)))
        except ArtinGlueError as exc:
            law.error(exc, (g, f))
            continue
        law.check(ok, (g, f))
    law.done()
    if lex and isinstance(src, LexCategory) and isinstance(tgt, LexCategory):
        law = _Law(rep, "preserves terminal")
        law.check(tgt.is_terminal(F.obj(src.terminal())), F.obj(src.terminal()))
        law.done()
        law = _Law(rep, "preserves pullbacks")
        for f, g in cospans(src, probes, budget, seed):
            try:
                cone = src.pullback(f, g)
                image = tgt.pullback(F.mor(f), F.mor(g))
                comparison = image.mediate((F.mor(cone.legs[0]), F.mor(cone.legs[1])))
                law.check(tgt.is_iso(comparison), (f, g))
            except ArtinGlueError as exc:
                law.error(exc, (f, g))
        law.done()
    return rep


def check_nat(alpha: NatTrans, probes: ProbeSet, law_prefix: str = "") -> Report:
    rep = Report(f"natural transformation {alpha.name}")
    F, G = alpha.source, alpha.target
    tgt = alpha.cod_category
    src = alpha.dom_category
    law = _Law(rep, law_prefix + "component typing")
    for a in probes.objects:
        try:
            c = alpha[a]
            ok = tgt.obj_eq(tgt.dom(c), F.obj(a)) and tgt.obj_eq(tgt.cod(c), G.obj(a))
        except ArtinGlueError as exc:
            law.error(exc, a)
            continue
        law.check(ok, a)
    law.done()
    law = _Law(rep, law_prefix + "naturality")
    for f in probes.morphisms:
        a, b = src.dom(f), src.cod(f)
        try:
            ok = tgt.mor_eq(tgt.compose(G.mor(f), alpha[a]), tgt.compose(alpha[b], F.mor(f)))
        except ArtinGlueError as exc:
            law.error(exc, f)
            continue
        law.check(ok, f)
    law.done()
    return rep


def check_nat_iso(alpha: NatTrans, probes: ProbeSet) -> Report:
    rep = Report(f"natural isomorphism {alpha.name}")
    law = _Law(rep, "components are isomorphisms")
    for a in probes.objects:
        law.check(alpha.cod_category.is_iso(alpha[a]), a)
    law.done()
    return rep


def check_adjunction(adj: Adjunction, left_probes: ProbeSet, right_probes: ProbeSet | None = None) -> Report:
    """``left_probes`` live in the source of the left adjoint, ``right_probes`` in its target."""
    rep = Report(f"adjunction {adj.name}")
    L, R = adj.left, adj.right
    C, D = L.source, L.target
    rep.extend(check_nat(adj.unit, left_probes), "unit ")
    if right_probes is not None:
        rep.extend(check_nat(adj.counit, right_probes), "counit ")
    law = _Law(rep, "triangle εL·Lη = id_L")
    for a in left_probes.objects:
        try:
            ok = D.mor_eq(D.compose(adj.counit[L.obj(a)], L.mor(adj.unit[a])), D.identity(L.obj(a)))
        except ArtinGlueError as exc:
            law.error(exc, a)
            continue
        law.check(ok, a)
    law.done()
    if right_probes is not None:
        law = _Law(rep, "triangle Rε·ηR = id_R")
        for b in right_probes.objects:
            try:
                ok = C.mor_eq(C.compose(R.mor(adj.counit[b]), adj.unit[R.obj(b)]), C.identity(R.obj(b)))
            except ArtinGlueError as exc:
                law.error(exc, b)
                continue
            law.check(ok, b)
        law.done()
    return rep


def check_laws(target: str, subject, probes, **kw) -> Report:
    """Dispatch: ``category``, ``functor``, ``nat``, ``adjunction`` or ``limit_cone``.

    For ``adjunction`` pass ``probes`` as a ProbeSet on the left adjoint's
    source or a pair ``(left_probes, right_probes)``.  For ``limit_cone`` the
    subject is ``(category, f, g)`` or ``(category, f, g, cone)``.
    """
    try:
        if target == "category":
            return check_category(subject, probes, **kw)
        if target == "functor":
            return check_functor(subject, probes, **kw)
        if target == "nat":
            return check_nat(subject, probes)
        if target == "adjunction":
            if isinstance(probes, tuple):
                return check_adjunction(subject, *probes)
            return check_adjunction(subject, probes)
        if target == "limit_cone":
            cat, f, g, *rest = subject
            return check_pullback_cone(cat, f, g, probes, cone=rest[0] if rest else None)
    except ArtinGlueError as exc:
        rep = Report(f"{target}")
        rep.add("evaluation", False, 1, (type(exc).__name__, str(exc)))
        return rep
    rep = Report(target)
    rep.add("known target", False, 0, target)
    return rep
