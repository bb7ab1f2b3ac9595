"""Acceptance criteria 1-8, one printed PASS/FAIL line each.

Run on its own with ``pytest tests/test_acceptance.py -s`` or
``python tests/test_acceptance.py``.
"""
import sys
import time

import numpy as np
import pytest

from oracles import dual_numbers_f2_units, invariants_from_orders, zmod_units_orders
from unitspec.barcat import CoDiagramF, DiagramF, FinCat, bar, hocolim, lemmaA2_check, nerve
from unitspec.cli import corpus_names, diagram_from_spec, load_diagram_spec
from unitspec.dkspec import adjunction_audit, em_spectrum, trivial_spectrum
from unitspec.errors import IdentityViolation, LawViolation
from unitspec.gammaunits import (
    gamma_construct,
    gl1_bullet,
    group_completion_pi0,
    group_nerve_h1,
    segal_check,
    segal_machine_delooping,
)
from unitspec.ispace import ISpace, compare_box_with_oracle, free_box_identity, free_ispace, inj_cat, random_ispace
from unitspec.rings import CORPUS, parse_ring
from unitspec.snf import AbelianGroup
from unitspec.sset import FinSSet, homology

N, D, K = 3, 4, 1

# brute-force unit groups, from independent enumeration
EXPECTED_UNITS = {
    "Z/2": AbelianGroup(0, tuple(invariants_from_orders(zmod_units_orders(2)))),
    "Z/4": AbelianGroup(0, tuple(invariants_from_orders(zmod_units_orders(4)))),
    "Z/6": AbelianGroup(0, tuple(invariants_from_orders(zmod_units_orders(6)))),
    "F5": AbelianGroup(0, tuple(invariants_from_orders(zmod_units_orders(5)))),
    "F2[x]/x^2": AbelianGroup(0, (len(dual_numbers_f2_units()),)),
}

_pipelines = {}


def pipeline(name):
    """Omega -> units -> Gamma-space -> completion for one corpus ring, cached."""
    if name not in _pipelines:
        t0 = time.perf_counter()
        U = gl1_bullet(em_spectrum(parse_ring(name), N))
        H = gamma_construct(U, n_max=N, D=D, k_max=K)
        C = group_completion_pi0(H)
        _pipelines[name] = (U, H, C, time.perf_counter() - t0)
    return _pipelines[name]


@pytest.fixture
def say(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
        assert ok, detail

    return emit


def test_criterion_1_units(say):
    rows, ok = [], True
    for name in CORPUS:
        _, _, C, secs = pipeline(name)
        brute = parse_ring(name).unit_group()
        good = C.invariants == brute == EXPECTED_UNITS[name] and secs < 300
        ok &= good
        rows.append(f"{name}:{C.invariants}({secs:.0f}s)")
    say(1, ok, "pi0 gl1 HR = R^x at N=3, D=4: " + ", ".join(rows))


def test_criterion_2_two_paths(say):
    rows, ok = [], True
    for name in CORPUS:
        U, _, C, _ = pipeline(name)
        M = U.meta["pi0_monoid"]
        good = M.is_group and M.size == C.group.size and M.group_invariants() == C.invariants
        ok &= good
        rows.append(f"{name}:{'ok' if good else 'mismatch'}")
    say(2, ok, "units_fcp pi0 vs group completion: " + ", ".join(rows))


def test_criterion_3_segal(say):
    fails, tested = [], 0
    for name in CORPUS:
        _, H, _, _ = pipeline(name)
        for v in segal_check(H, K):
            tested += 1
            if not (v.passed and v.h1_iso is True):
                fails.append(f"{name} n={v.n}: {v.witness}")
    say(3, not fails, f"{tested} Segal maps (n <= 3, pi0 + H_1 + comma certificate), failures: {fails or 0}")


def test_criterion_4_box(say):
    rng = np.random.default_rng(20240601)
    bad = []
    for i in range(20):
        X, Y = random_ispace(rng, 4), random_ispace(rng, 4)
        r = compare_box_with_oracle(X, Y)
        if not r.ok:
            bad.append((i, X.name, Y.name, r.witness))
    free_bad = [(m, n) for m in range(5) for n in range(5 - m) if not free_box_identity(m, n, 4).ok]
    say(4, not bad and not free_bad, f"20 seeded pairs at N=4 vs Kan extension, F_m box F_n = F_(m+n) for m+n <= 4; failures {bad + free_bad or 0}")


def _caught(fn, kind):
    try:
        fn()
    except kind as exc:
        return bool(str(exc)) and exc.witness is not None
    return False


def test_criterion_5_bar_and_lemma(say):
    I2 = inj_cat(2)
    builds = [nerve(I2, D), nerve(FinCat.cyclic_group(3), D), nerve(FinCat.terminal(), D)]
    builds.append(bar(CoDiagramF.represented(I2, 1), I2, DiagramF.represented(I2, 1), D))
    for name in corpus_names():
        X = diagram_from_spec(load_diagram_spec(f"builtin:{name}"), 2)
        builds.append(hocolim(X.base, X, D))
    for b in builds:
        b.sset.check_identities()
    instances = [
        (None, None),
        (None, DiagramF.represented(I2, 1)),
        (CoDiagramF.represented(I2, 1), DiagramF.represented(I2, 1)),
        (CoDiagramF.represented(I2, 2), DiagramF.represented(I2, 0)),
    ]
    relations = sum(lemmaA2_check(Y, I2, X, 3).relations_checked for Y, X in instances)
    bad = FinCat.cyclic_group(3).with_corrupted_composite(1, 1, 0)
    controls = [
        _caught(lambda: bad.check_laws(), LawViolation),
        _caught(lambda: nerve(bad, 3).sset.check_identities(), IdentityViolation),
        _caught(lambda: lemmaA2_check(None, bad, None, 2), IdentityViolation),
    ]
    say(5, all(controls), f"{len(builds)} bar constructions through degree {D}, bar homotopy lemma on 4 I<=2 instances ({relations} relations), negative controls caught {sum(controls)}/3")


def test_criterion_6_delooping(say):
    rows, ok = [], True
    for name, want in (("F5", "Z/4"), ("Z/6", "Z/2")):
        U, H, _, _ = pipeline(name)
        got = homology(segal_machine_delooping(H, K), K).groups
        oracle = group_nerve_h1(U.meta["pi0_monoid"], K)
        good = got == oracle and str(got[1]) == want
        ok &= good
        rows.append(f"{name}: H_1 = {got[1]} (group nerve {oracle[1]})")
    say(6, ok, "; ".join(rows))


def test_criterion_7_adjunction(say):
    pt = FinSSet.point()
    rows, ok = [], True
    for name in CORPUS:
        R = parse_ring(name)
        E = em_spectrum(R, 2)
        small = [("*", ISpace.terminal(2)), ("F_0(*)", free_ispace(0, pt, 2)), ("F_1(*)", free_ispace(1, pt, 2)), ("2 points", ISpace.constant(2, FinSSet.discrete(2)))]
        for label, X in small:
            r = adjunction_audit(X, E, label)
            ok &= r.ok and r.hom_sigma == r.hom_omega
        r = adjunction_audit(ISpace.terminal(2), trivial_spectrum(R, 2), "* vs 0")
        ok &= r.ok and r.hom_sigma == r.hom_omega == 1
        rows.append(name)
    say(7, ok, f"hom-set bijections for *, F_0(*), F_1(*), constant 2 points and the trivial target over {', '.join(rows)}")


def test_criterion_8_truncation(say):
    changed = []
    for name in corpus_names():
        X = diagram_from_spec(load_diagram_spec(f"builtin:{name}"), N)
        lo = homology(hocolim(X.base, X, D, D - 1).sset, D - 2).groups
        hi = homology(hocolim(X.base, X, D + 1, D).sset, D - 2).groups
        if lo != hi:
            changed.append(f"hocolim[{name}]")
    for name in CORPUS:
        U, H, _, _ = pipeline(name)
        H5 = gamma_construct(U, n_max=2, D=D + 1, k_max=K + 1)
        for n in range(3):
            if H.homology(n, K) != H5.homology(n, K + 1)[: K + 1]:
                changed.append(f"gamma[{name}]({n}+)")
        lo = homology(segal_machine_delooping(H, K), K).groups
        hi = homology(segal_machine_delooping(H5, K), K).groups
        if lo != hi:
            changed.append(f"delooping[{name}]")
    say(8, not changed, f"D={D} vs D={D + 1} on corpus hocolims, Gamma values and deloopings; changed: {changed or 0}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
