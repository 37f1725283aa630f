"""Acceptance criteria, one test (and one PASS/FAIL line) per criterion.

Criteria whose stated constants disagree with the computed identities are
kept exactly as stated and marked strict xfail; the identities that do hold
are checked in companion tests.
"""
import time

import pytest

from conftest import ACCEPTANCE_LINES
from weilzeta import checks
from weilzeta.cosets import hecke_right_cosets
from weilzeta.discriminant import A2, discriminant_form
from weilzeta.weil import embed_word, sl2_word

MODULE_NAMES = ("A2", "D2", "A2+A2", "E8")


def record(label: str, results, extra: str = "") -> bool:
    ok = bool(results) and all(r.passed for r in results)
    failed = [r for r in results if not r.passed]
    detail = extra or (f"{len(results)} checks" if ok else
                       "; ".join(f"{r.name} {r.detail}" for r in failed[:3]))
    line = f"criterion {label}: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def test_c01_weil_homomorphism(modules):
    t0 = time.perf_counter()
    results = []
    for name in MODULE_NAMES:
        results += checks.weil_suite(modules[name], words=100, length=8, seed=0)
    elapsed = time.perf_counter() - t0
    assert record("1", results, f"{len(results)} exact checks, {elapsed:.1f} s")
    assert elapsed < 10


def test_c02_embedding_identities(modules):
    results = []
    for name in MODULE_NAMES:
        results += checks.embedding_suite(modules[name])
    # S in the upper slot is U2(b) T2(-b) U2(b) with b = diag(1, 0)
    word = embed_word(sl2_word(((0, -1), (1, 0))), "up")
    s_up = ((0, 0, -1, 0), (0, 1, 0, 0), (1, 0, 0, 0), (0, 0, 0, 1))
    results.append(checks.CheckResult("S up as U2(b) T2(-b) U2(b)", word.matrix() == s_up,
                                      {"word": str(word)}))
    assert record("2", results)


def test_c03_milgram(modules):
    results = []
    for name in MODULE_NAMES:
        results += checks.milgram_suite(modules[name])
    assert record("3", results)


def test_c04_extended_action():
    results = checks.extended_action_suite(discriminant_form(A2), d=3, deltas=5, factorizations=10,
                                           seed=0)
    assert record("4", results)


def test_c05_coset_counts():
    results = checks.coset_suite()
    counts = {d: len(hecke_right_cosets(d)) for d in (1, 2, 3)}
    results.append(checks.CheckResult("hecke counts 1, 6, 12", counts == {1: 1, 2: 6, 3: 12}, counts))
    assert record("5", results)


@pytest.mark.xfail(strict=True, reason="general product formula and explicit closed forms "
                                       "differ on the entries with k > 0 and on (sigma, I0+I1)")
def test_c06_local_factors_all_entries():
    results = checks.local_factor_suite(primes=(3, 5, 7), samples=20, seed=0)
    bad = [r.name for r in results if not r.passed]
    record("6", results, f"{len(results) - len(bad)}/{len(results)} entries agree; "
                         f"mismatching: {', '.join(bad)}")
    assert not bad


def test_c06_local_factors_matching_entries():
    results = checks.local_factor_suite(primes=(3, 5, 7), samples=20, seed=0)
    agree = {r.name for r in results if r.passed}
    expected = {f"p={p} {lab}" for p in (3, 5, 7) for lab in ("(id, I0, 0)", "(sigma, I0, 0)")}
    expected.add("p=3 (id, I0+I1, 1)")
    ok = agree == expected
    label = "6 (agreeing entries)"
    assert record(label, [checks.CheckResult("agreement pattern", ok, {"agree": sorted(agree)})],
                  f"{len(agree)} entries agree at 20 rational s" if ok else "")


def test_c07_pullback(modules):
    results = checks.pullback_suite(modules["E8"], l=12, s=0, tau=1.5j, zeta=1.5j, dmax=8,
                                    heights=(1, 2, 3), tolerance=1e-2)
    detail = ", ".join(f"{r.name}: {r.detail.get('residual', '')}" for r in results)
    assert record("7", results, detail)


@pytest.mark.xfail(strict=True, reason="the stated constant 2^(2-l) pi differs from the "
                                       "computed reproducing constant by a factor 2/11")
def test_c08_reproducing_stated():
    results = checks.reproducing_suite(nodes=24, height=6, reading="stated", tolerance=1e-3)
    record("8", results, str(results[0].detail))
    assert results[0].passed


def test_c08_reproducing_classical():
    results = checks.reproducing_suite(nodes=24, height=6, reading="classical", tolerance=1e-3)
    assert record("8 (classical constant)", results, str(results[0].detail))


def test_c09_orthogonality():
    results = checks.orthogonality_suite(nodes=24, tolerance=1e-3)
    assert record("9", results, str(results[0].detail))


@pytest.mark.xfail(strict=True, reason="the integral follows the weight d^-(2l-4) with the "
                                       "classical constant, not d^-l with K(l, s)")
@pytest.mark.slow
def test_c10_integral_representation_stated():
    results = checks.integral_rep_suite(nodes=24, dmax=6, reading="stated", tolerance=5e-2)
    record("10", results, str(results[0].detail))
    assert results[0].passed


@pytest.mark.slow
def test_c10_integral_representation_classical():
    results = checks.integral_rep_suite(nodes=24, dmax=6, reading="classical", tolerance=5e-2)
    assert record("10 (classical weights)", results, str(results[0].detail))


def test_c11_hecke_eigenvalues():
    results = [r for r in checks.hecke_suite(ds=(2, 3), tolerance=1e-8)]
    assert record("11", results)


def test_c12_xi_stability(modules):
    results = checks.xi_suite(modules["A2+A2"], l=4, s=3.0, bound=1000, tolerance=1e-4)
    assert record("12", results, str(results[0].detail))
