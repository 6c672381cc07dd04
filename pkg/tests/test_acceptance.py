"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

from __future__ import annotations

import random
import time
from pathlib import Path

import pytest

from artinglue import fixtures as fx
from artinglue.category import ProbeSet, const_terminal, functor_compose, whisker_left
from artinglue.cli import main
from artinglue.ext_functor import (
    baer_colimit,
    check_coequalizer_universal,
    check_coproduct_universal,
    collation_check,
    ext_two_mor_left,
)
from artinglue.extensions import (
    AdjointSplitExtension,
    associated_nat,
    enumerate_nats,
    gamma_functor,
    glueing_extension,
    nat_equal,
    psi_left_adjoint,
    two_morphism_exists,
    two_morphism_find,
)
from artinglue.glueing import gl_objects, gl_probes, glue_construct, phi, phi_inverse, pullback_representation_check
from artinglue.laws import Report, check_adjunction, check_functor, check_nat_iso
from artinglue.presheaf import make_mor
from artinglue.runner import run_task
from artinglue.scenario import parse_scenario
from artinglue.subtopos import closed_reflection, cokernel_of, kernel_of, kernel_probes, open_reflection, slice_probes

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"
TOPOSES = fx.TOPOSES
FINSET = fx.FINSET
H = fx.default_probes_for(FINSET)
FIXTURES = fx.fixture_functors()
# F = X^A is represented by |A|
EXPONENT = {"const_terminal": 0, "identity": 1, "square": 2}
Id, One, Sq, Diag = FIXTURES["identity"], FIXTURES["const_terminal"], FIXTURES["square"], fx.builtin_functor("diagonal")
NATS = [fx.bang(Id), fx.diag_nat(), fx.proj_nat(0), fx.proj_nat(1), fx.swap_nat()]


def verdict(capsys, number: int, title: str, ok: bool, detail: str, start: float) -> None:
    with capsys.disabled():
        print(f"\nacceptance {number}: {'PASS' if ok else 'FAIL'}  {title}  ({detail}; {time.perf_counter() - start:.1f}s)")
    assert ok, detail


def failures(reports) -> list:
    return [(rep.subject, r.law, r.witness) for rep in reports for r in rep.results if not r.passed]


def glp(gl, n, h):
    return gl_probes(gl, n, h, max_objects=40)


def wide_probes(topos, size: int, n_morphisms: int = 300, seed: int = 0) -> ProbeSet:
    """Every presheaf with components of size <= ``size``, plus a seeded sample of morphisms."""
    rng = random.Random(seed)
    objs = list(topos.presheaves_up_to(size))
    mors = [topos.identity(X) for X in objs]
    discrete = not topos.base.non_identity
    while len(mors) < n_morphisms:
        a, b = rng.choice(objs), rng.choice(objs)
        if discrete:
            if any(len(sa) and not len(sb) for sa, sb in zip(a.at, b.at)):
                continue
            comps = [{x: rng.choice(list(sb)) for x in sa} for sa, sb in zip(a.at, b.at)]
            mors.append(make_mor(a, b, comps))
        else:
            hom = list(topos.hom(a, b))
            if hom:
                mors.append(rng.choice(hom))
    return ProbeSet(tuple(objs), tuple(mors))


def each_subterminal():
    for name, topos in TOPOSES.items():
        for U in topos.subterminals():
            yield name, topos, U


def test_law_suite(capsys):
    start = time.perf_counter()
    reports = []
    for _, topos, U in each_subterminal():
        probes = fx.default_probes_for(topos)
        o, c = open_reflection(topos, U), closed_reflection(topos, U)
        reports.append(check_adjunction(o.adjunction, probes, slice_probes(o, probes)))
        reports.append(check_adjunction(c.adjunction, probes, kernel_probes(c, probes)))
    for F in FIXTURES.values():
        reports.append(check_functor(F, H))
        glue = glue_construct(F)
        g = glp(glue.category, H, H)
        reports.append(check_adjunction(glue.pi1_adjunction, g, H))
        reports.append(check_adjunction(glue.pi2_adjunction, g, H))
    for psi in NATS:
        m = gamma_functor(psi, H)
        reports.append(check_adjunction(psi_left_adjoint(m).adjunction, m.target.probes().G, m.source.probes().G))
    bad = failures(reports)
    checked = sum(r.checked for rep in reports for r in rep.results)
    verdict(capsys, 1, "law suite", not bad, f"{len(reports)} suites, {checked} checks, {len(bad)} failures", start)


def test_pullback_representation(capsys):
    start = time.perf_counter()
    sizes = {"finset": 49, "finset2": 7, "sierpinski": 3}
    reports, smallest = [], None
    for name, topos, U in each_subterminal():
        probes = wide_probes(topos, sizes[name])
        smallest = min(smallest or len(probes.objects), len(probes.objects))
        reports.append(pullback_representation_check(topos, U, probes))
    bad = failures(reports)
    ok = not bad and smallest >= 50
    verdict(capsys, 2, "pullback representation", ok, f"{len(reports)} subterminals, >= {smallest} probe objects each", start)


def test_kernel_cokernel(capsys):
    start = time.perf_counter()
    rep, factored = Report("kernel and cokernel"), 0
    for name, topos, U in each_subterminal():
        probes = fx.default_probes_for(topos)
        cl = closed_reflection(topos, U)
        cok = cokernel_of(cl.K)
        ker = kernel_of(cok.E)
        agree = all(ker.category.contains(X) == cl.kernel.contains(X) for X in probes.objects)
        rep.add(f"{name}: kernel membership", agree, len(probes.objects))
        E, Es = cok.reflection.E, cok.reflection.E_star
        testers = [E, const_terminal(topos, topos), const_terminal(topos, FINSET), functor_compose(Es, E)]
        for T in testers:
            fac = cok.factorizer(T, probes)
            rep.extend(fac.report, f"{name} {T.name}: ")
            rep.extend(check_nat_iso(fac.iso, probes), f"{name} {T.name}: ")
            factored += 1
    bad = failures([rep])
    verdict(capsys, 3, "kernel and cokernel", not bad, f"{factored} factorizations, {len(bad)} failures", start)


def test_equivalence_round_trips(capsys):
    start = time.perf_counter()
    rep, count = Report("round trips"), 0
    for F1 in FIXTURES.values():
        for F2 in FIXTURES.values():
            for psi in enumerate_nats(F2, F1, H.objects, H.morphisms):
                m = gamma_functor(psi, H)
                rep.extend(m.verify(), f"Γ({psi.name}): ")
                rep.add(f"Γ⁻¹Γ({psi.name})", nat_equal(associated_nat(m), psi, H.objects), len(H.objects))
                count += 1
    for name, topos, U in each_subterminal():
        ext = AdjointSplitExtension.from_subterminal(topos, U)
        m = phi(ext)
        pi = phi_inverse(ext)
        rep.extend(check_nat_iso(pi.unit, ext.probes().G), f"{name} Φ′Φ: ")
        rep.extend(check_nat_iso(pi.counit, m.target.probes().G), f"{name} ΦΦ′: ")
    bad = failures([rep])
    ok = not bad and count == sum(EXPONENT[b] ** EXPONENT[a] for a in EXPONENT for b in EXPONENT)
    verdict(capsys, 4, "equivalence round trips", ok, f"{count} transformations, {len(bad)} failures", start)


def test_hom_ext_bijection(capsys):
    start = time.perf_counter()
    mismatches = []
    for k1, F1 in FIXTURES.items():
        for k2, F2 in FIXTURES.items():
            nats = enumerate_nats(F2, F1, H.objects, H.morphisms)
            classes: list = []
            for m in (gamma_functor(psi, H) for psi in nats):
                if not any(two_morphism_exists(c, m) for c in classes):
                    classes.append(m)
            assoc = [associated_nat(c) for c in classes]
            injective = not any(nat_equal(assoc[i], assoc[j], H.objects) for i in range(len(assoc)) for j in range(i))
            oracle = EXPONENT[k2] ** EXPONENT[k1]
            if not (len(classes) == len(nats) == oracle and injective):
                mismatches.append((F1.name, F2.name, len(classes), len(nats), oracle))
    verdict(capsys, 5, "Hom/Ext bijection", not mismatches, f"9 pairs, mismatches {mismatches}", start)


def test_fibration_lifts(capsys):
    start = time.perf_counter()
    sc = parse_scenario("".join(f"task lifts {name}\n" for name in ("Id", "One", "Sq")))
    reps = [run_task(sc, t) for t in sc.tasks]
    lifts = sum(sum(r.details["lifts"].values()) for r in reps)
    ok = all(r.status == "pass" for r in reps) and all(min(r.details["lifts"].values()) > 0 for r in reps)
    verdict(capsys, 6, "fibration lifts", ok, f"{lifts} lifts over pi1 and pi2", start)


def test_ext_functoriality(capsys):
    start = time.perf_counter()
    H2 = fx.default_probes_for(fx.FINSET2)
    ext = glueing_extension(Id)
    pairs, bad = 0, []
    for T in (Id, One, Sq):
        for S in (Id, One, Sq, Diag):
            rep = collation_check(T, S, ext, H, H, glp, H2 if S is Diag else H)
            pairs += 1
            if not rep.passed:
                bad.append((T.name, S.name))
    for tau in NATS:
        found = two_morphism_find(ext_two_mor_left(tau, ext), gamma_functor(whisker_left(Id, tau)))
        if found is None or not found.report.passed:
            bad.append(("left", tau.name))
    verdict(capsys, 7, "Ext functoriality", not bad and pairs >= 4, f"{pairs} collation pairs, {len(NATS)} left actions, failures {bad}", start)


def test_baer_colimits(capsys):
    start = time.perf_counter()
    testers = list(FIXTURES.values())
    cocone = baer_colimit("coproduct", glueing_extension(Id), glueing_extension(Id), probes=H)
    got = gl_objects(cocone.apex.G, H.objects, H.objects)
    strict = got == gl_objects(glueing_extension(Sq).G, H.objects, H.objects)
    cop = check_coproduct_universal(cocone, testers, H.objects, H.morphisms)
    m1, m2 = gamma_functor(fx.proj_nat(0)), gamma_functor(fx.proj_nat(1))
    co = baer_colimit("coequalizer", m1, m2, probes=H)
    coeq = check_coequalizer_universal(co, (m1, m2), testers, H.objects, H.morphisms)
    ok = strict and cop.passed and coeq.passed
    verdict(capsys, 8, "Baer colimits", ok, f"{len(got)} glueing objects compared, coproduct {cop.passed}, coequalizer {coeq.passed}", start)


def test_cli_determinism(capsys, tmp_path):
    start = time.perf_counter()
    files = sorted(SCENARIOS.glob("*.scn"))
    results = []
    for path in files:
        outs = []
        for _ in range(2):
            code = main(["check", str(path), "--format", "structured"])
            outs.append((code, capsys.readouterr().out))
        results.append(outs[0][0] == outs[1][0] == 0 and outs[0][1] == outs[1][1])
    verdict(capsys, 9, "CLI determinism", bool(files) and all(results), f"{len(files)} scenarios run twice", start)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
