"""Verification suites shared by the command line and the test-suite.

Each suite returns a list of CheckResult; a suite passes when every entry passes.
Exact suites compare two independent routes in the cyclotomic field; numeric suites
record their truncation parameters next to every value.
"""
from __future__ import annotations

import functools
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cosets import (genus1_count_bruteforce, genus1_cosets, genus2_cosets, hecke_count_bruteforce,
                     hecke_right_cosets, pair_classes_bruteforce)
from .cyclotomic import e, sqrt_of_integer
from .discriminant import A2, A2_A2, D2_DIAG, E8, FiniteQuadraticModule, discriminant_form
from .weil import (M, S, Sinv, T, embed_word, hecke_factorization, mat_mul, mcgehee_word,
                   random_gamma_n, random_word, sl2_word, sp4_word, weil_of)

TEST_LATTICES = {"A2": A2, "D2": D2_DIAG, "A2+A2": A2_A2, "E8": E8}


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)


def test_modules() -> dict[str, FiniteQuadraticModule]:
    return {k: discriminant_form(v) for k, v in TEST_LATTICES.items()}


# ---------------------------------------------------------------------------
# exact Weil checks

def weil_suite(fqm: FiniteQuadraticModule, words: int = 100, length: int = 8,
               seed: int = 0) -> list[CheckResult]:
    """Unitarity, the defining relations, triviality on Gamma(N) and the dual."""
    W = weil_of(fqm)
    rng = random.Random(seed)
    out = []
    Sm = W.word(S())
    out.append(CheckResult("S^2 = m(-1)", W.word(S() * S()) == W.word(M(-1))))
    st = W.word(S() * T(1))
    out.append(CheckResult("(ST)^3 = S^2", st @ st @ st == Sm @ Sm))
    for genus in (1, 2):
        bad_unit = bad_dual = 0
        for _ in range(words):
            w = random_word(genus, length, rng)
            R = W.word(w)
            if not (R @ R.adjoint()).is_identity():
                bad_unit += 1
            # dual = conjugate = transpose of rho(gamma^-1) = rho(gamma~)
            conj = R.conjugate()
            if conj != W.word(w.inverse()).T or conj != W.word(w.tilde()):
                bad_dual += 1
        out.append(CheckResult(f"unitarity genus {genus}", bad_unit == 0,
                               {"words": words, "mismatches": bad_unit}))
        out.append(CheckResult(f"dual genus {genus}", bad_dual == 0,
                               {"words": words, "mismatches": bad_dual}))
    bad = sum(0 if W.rho1(random_gamma_n(max(fqm.level, 1), rng)).is_identity() else 1
              for _ in range(10))
    out.append(CheckResult("trivial on Gamma(N)", bad == 0, {"samples": 10, "mismatches": bad}))
    return out


def embedding_suite(fqm: FiniteQuadraticModule) -> list[CheckResult]:
    W = weil_of(fqm)
    out = []
    Sm = W.word(S())
    out.append(CheckResult("rho2(S2) = rho1(S) x rho1(S)", W.word(S(2)) == Sm.kron(Sm)))
    tb = W.word(T(((2, 0), (0, -1)), 2)) == W.word(T(2)).kron(W.word(T(-1)))
    out.append(CheckResult("rho2(T2(diag(2,-1))) = rho1(T^2) x rho1(T^-1)", tb))
    sts = mat_mul(mat_mul(((0, -1), (1, 0)), ((1, -1), (0, 1))), ((0, -1), (1, 0)))
    for name, g in (("S", ((0, -1), (1, 0))), ("T", ((1, 1), (0, 1))), ("ST^-1S", sts)):
        for d in ("up", "down"):
            ok = W.embed(g, d) == W.word(embed_word(sl2_word(g), d))
            out.append(CheckResult(f"embedding {name} {d}", ok))
    for d in (1, 2, 3):
        ok = W.u2_offdiag(d, True) == W.word(S(2) * T(((0, d), (d, 0)), 2) * Sinv(2))
        out.append(CheckResult(f"U2 closed form d={d}", ok))
    for a, d in ((-1, -1), (1, 1)):
        lhs = W.word(mcgehee_word(a, d))
        rhs = W.scale_operator(d).scale(W.gauss_ratio(d)).lift(lhs.conductor)
        out.append(CheckResult(f"McGehee (a,d)=({a},{d})", lhs == rhs))
    return out


def milgram_suite(fqm: FiniteQuadraticModule, d_range=range(1, 25)) -> list[CheckResult]:
    out = []
    g = fqm.gauss_sum(1)
    rhs = sqrt_of_integer(fqm.order) * e(Fraction(fqm.signature_mod_8, 8))
    out.append(CheckResult("Milgram", g == rhs, {"g": str(g)}))
    N = max(fqm.level, 1)
    bad = []
    for d in d_range:
        if np.gcd(d, 8 * N) == 1 and fqm.gauss_sum(d) != g.galois(d):
            bad.append(d)
    out.append(CheckResult("g_d = sigma_d(g)", not bad, {"mismatches": bad}))
    return out


def extended_action_suite(fqm: FiniteQuadraticModule, d: int = 3, deltas: int = 5,
                          factorizations: int = 10, seed: int = 0) -> list[CheckResult]:
    """rho^-1(gamma D' gamma') is independent of the factorisation of delta."""
    W = weil_of(fqm)
    rng = random.Random(seed)
    out = []
    n = d * d
    for i in range(deltas):
        g0 = _random_sl2(rng)
        g1 = _random_sl2(rng)
        delta = mat_mul(mat_mul(g0, ((n, 0), (0, 1))), g1)
        gam, gam_p = hecke_factorization(delta, d)
        ref = W.extended_action(d, gam, gam_p)
        bad = 0
        for _ in range(factorizations):
            # (gamma k) D' (k' gamma') with k in Gamma^0(d^2), k' = D'^-1 k^-1 D'
            b = rng.randint(-2, 2) * n
            c = rng.randint(-3, 3)
            k = ((1, b), (c, 1 + b * c))
            k = mat_mul(k, ((1, n * rng.randint(-1, 1)), (0, 1)))
            (ka, kb), (kc, kd) = k
            kinv = ((kd, -kb), (-kc, ka))
            kp = ((kinv[0][0], kinv[0][1] // n), (kinv[1][0] * n, kinv[1][1]))
            left, right = mat_mul(gam, k), mat_mul(kp, gam_p)
            assert mat_mul(mat_mul(left, ((n, 0), (0, 1))), right) == delta
            if W.extended_action(d, left, right) != ref:
                bad += 1
        out.append(CheckResult(f"delta {i}", bad == 0, {"delta": delta, "mismatches": bad}))
    return out


def _random_sl2(rng: random.Random):
    g = ((1, 0), (0, 1))
    for _ in range(4):
        g = mat_mul(g, ((1, rng.randint(-3, 3)), (0, 1)))
        g = mat_mul(g, ((0, -1), (1, 0)))
    return g


# ---------------------------------------------------------------------------
# cosets

HECKE_COUNTS = {1: 1, 2: 6, 3: 12}


def coset_suite(heights=(1, 2, 3, 4), ds=(1, 2, 3), genus2_heights=(1, 2)) -> list[CheckResult]:
    out = []
    for d in ds:
        n1 = len(hecke_right_cosets(d))
        n2 = hecke_count_bruteforce(d)
        expect = HECKE_COUNTS.get(d)
        out.append(CheckResult(f"hecke d={d}", n1 == n2 and (expect is None or n1 == expect),
                               {"enumerated": n1, "bruteforce": n2, "expected": expect}))
    for h in heights:
        n1 = len(genus1_cosets(h))
        n2 = genus1_count_bruteforce(h)
        out.append(CheckResult(f"genus1 height={h}", n1 == n2, {"census": n1, "bruteforce": n2}))
    for h in genus2_heights:
        n1 = len(genus2_cosets(h))
        n2 = len(pair_classes_bruteforce(h))
        out.append(CheckResult(f"genus2 height={h}", n1 == n2, {"enumerated": n1, "bruteforce": n2}))
    return out


# ---------------------------------------------------------------------------
# numeric suites (trivial module unless stated)

def hecke_suite(fqm: FiniteQuadraticModule | None = None, ds=(2, 3, 4),
                tolerance: float = 1e-8) -> list[CheckResult]:
    """Delta: operator eigenvalues against the q-expansion oracle, plus Gauss-sum ratios."""
    from .hecke import (classical_hecke_eigenvalue, delta_coefficients, delta_expansion,
                        eigenvalue_with_deviation, hecke_relation_scalar)
    from .errors import ZeroGaussSum
    f = delta_expansion(60)
    coeffs = delta_coefficients(80)
    out = []
    for d in ds:
        lam, dev = eigenvalue_with_deviation(f, d)
        ref = float(classical_hecke_eigenvalue(coeffs, d, 12))
        rel = abs(lam - ref) / abs(ref)
        out.append(CheckResult(f"eigenvalue d={d}", rel < tolerance,
                               {"operator": f"{lam.real:.10f}", "oracle": f"{ref:.1f}",
                                "relative_error": f"{rel:.3e}", "probe_deviation": f"{dev:.3e}",
                                "truncation": f.truncation}))
    if fqm is not None:
        for d in range(1, 7):
            try:
                rel = hecke_relation_scalar(fqm, d)
            except ZeroGaussSum:
                out.append(CheckResult(f"gauss ratio d={d}", True, {"g_d": "0"}))
                continue
            ok = abs(abs(complex(rel.kappa)) - 1) < 1e-12
            out.append(CheckResult(f"gauss ratio d={d}", ok,
                                   {"gd_over_g": str(rel.gd_over_g), "kappa": str(rel.kappa),
                                    "root_of_unity_order": rel.order}))
    return out


def local_factor_suite(primes=(3, 5, 7), m: int = 4, samples: int = 20,
                       seed: int = 0) -> list[CheckResult]:
    """General product formula against the explicit closed forms at random rational s."""
    from .zeta import ENTRIES, K_p, entry_label
    rng = random.Random(seed)
    points = [Fraction(rng.randint(-40, 40), rng.randint(1, 7)) for _ in range(samples)]
    out = []
    for p in primes:
        for sigma, part, k in ENTRIES:
            v = K_p(p, sigma, part, k, m)
            bad = [str(s) for s in points if not _same_value(v, s)]
            out.append(CheckResult(f"p={p} {entry_label(sigma, part, k)}",
                                   not bad and v.identical(),
                                   {"samples": samples, "mismatches": len(bad),
                                    "first_mismatch": bad[0] if bad else "-"}))
    return out


def _same_value(v, s: Fraction) -> bool:
    """Exact comparison at integer s; 40-digit comparison when p^-s is irrational."""
    try:
        if s.denominator == 1:
            return v.at(int(s)) == v.at(int(s), "explicit")
        g, x = v.at(float(s)), v.at(float(s), "explicit")
    except ZeroDivisionError:
        return True       # both sides share the zeta pole
    return abs(g - x) <= 1e-40 * max(1, abs(g))


def pullback_suite(fqm: FiniteQuadraticModule, l: int = 12, s: float = 0.0, tau: complex = 1.5j,
                   zeta: complex = 1.5j, dmax: int = 8, heights=(1, 2, 3),
                   tolerance: float = 1e-2) -> list[CheckResult]:
    """Doubling identity on the diagonal under coset-height refinement."""
    from .series import pullback_sides
    out, res = [], []
    method = "lipschitz" if s == 0 else "direct"
    for h in heights:
        sides = pullback_sides(fqm, l, s, tau, zeta, dmax, h, method=method)
        r = (sides["lhs"] - sides["rhs"]).norm_inf()
        res.append(r)
        out.append(CheckResult(f"residual height={h}", r < tolerance,
                               {"residual": f"{r:.3e}", "dmax": dmax, "height": h,
                                "correction": f"{np.max(np.abs(sides['correction'])):.3e}"}))
    mono = all(b <= 1.1 * a for a, b in zip(res, res[1:]))
    out.append(CheckResult("monotone refinement", mono))
    return out


def _delta_setup(nodes: int):
    from .hecke import QuadratureSpec, delta_expansion, eval_form
    f = delta_expansion(60)
    return f, complex(eval_form(f, 1j).coords[0]), QuadratureSpec(nodes, nodes, 8.0)


def reproducing_suite(nodes: int = 24, height: int = 6, reading: str = "classical",
                      tolerance: float = 1e-3) -> list[CheckResult]:
    """int Delta conj(P+(tau, -i)) y^12 dmu against C(12, 0) Delta(i)."""
    from .hecke import petersson_integral, trivial_module
    from .series import poincare_kernel_array
    from .zeta import reproducing_constant
    E = trivial_module()
    f, d_i, q = _delta_setup(nodes)
    val = petersson_integral(f, lambda T: poincare_kernel_array(E, 12, T, -1j, height)[:, 0, 0], 12, q)[0]
    target = reproducing_constant(12, 0, reading) * d_i
    rel = abs(val - target) / abs(target)
    return [CheckResult(f"reproducing ({reading})", rel < tolerance,
                        {"integral": f"{val.real:.10e}", "target": f"{target.real:.10e}",
                         "relative_error": f"{rel:.3e}", "nodes": nodes, "height": height})]


def orthogonality_suite(nodes: int = 24, tolerance: float = 1e-3) -> list[CheckResult]:
    """Delta against the tensor kernel E^1 x E^1 on the diagonal: the integral vanishes."""
    from .hecke import eval_form_array, petersson_integral
    from .series import eisenstein_series_level_one
    f, _, q = _delta_setup(nodes)
    e_zeta = complex(eisenstein_series_level_one(12, np.array([1j]))[0])
    kernel = lambda T: eisenstein_series_level_one(12, T) * e_zeta      # noqa: E731
    val = petersson_integral(f, kernel, 12, q)[0]
    tau, w = q.nodes()
    scale = float(np.sum(w * tau.imag ** 12 * np.abs(eval_form_array(f, tau)[:, 0])
                         * np.abs(kernel(tau))))
    return [CheckResult("orthogonality", abs(val) < tolerance * scale,
                        {"integral": f"{abs(val):.3e}", "scale": f"{scale:.3e}", "nodes": nodes})]


@functools.lru_cache(maxsize=4)
def _diagonal_integral(nodes: int) -> complex:
    # the quadrature is the slow part; both readings share it
    from .hecke import petersson_integral
    from .series import e2_diagonal_trivial
    f, _, q = _delta_setup(nodes)
    return complex(petersson_integral(f, lambda T: e2_diagonal_trivial(12, T, 1j), 12, q)[0])


def integral_rep_suite(nodes: int = 24, dmax: int = 6, reading: str = "classical",
                       tolerance: float = 5e-2) -> list[CheckResult]:
    """int Delta conj(E^2(diag(tau, i))) y^12 dmu against the Hecke zeta sum."""
    from .hecke import eigenvalue
    from .zeta import reproducing_constant
    f, d_i, _ = _delta_setup(nodes)
    val = _diagonal_integral(nodes)
    lam = {d: eigenvalue(f, d) for d in range(1, dmax + 1)}
    w = 12 if reading == "stated" else 20
    target = reproducing_constant(12, 0, reading) * sum(lam[d] * d ** -w for d in lam) * d_i
    rel = abs(val - target) / abs(target)
    return [CheckResult(f"integral representation ({reading})", rel < tolerance,
                        {"integral": f"{val.real:.10e}", "target": f"{target.real:.10e}",
                         "relative_error": f"{rel:.3e}", "nodes": nodes, "dmax": dmax})]


def xi_suite(fqm: FiniteQuadraticModule, l: int = 4, s: float = 3.0, bound: int = 1000,
             tolerance: float = 1e-4) -> list[CheckResult]:
    from .zeta import xi_constant
    a = xi_constant(l, s, fqm, bound)
    b = xi_constant(l, s, fqm, 2 * bound)
    rel = abs(a - b) / max(abs(b), 1e-300)
    return [CheckResult("xi prime-bound doubling", rel < tolerance,
                        {"xi": f"{a.real:.10e}", "xi_doubled": f"{b.real:.10e}",
                         "relative_change": f"{rel:.3e}", "prime_bound": bound})]


# ---------------------------------------------------------------------------
# stable tables

def emit_table(kind: str, fqm: FiniteQuadraticModule | None = None, p: int = 3,
               s_values=(1, 2, 3)) -> list[tuple[str, str]]:
    if kind == "local-factors":
        from .zeta import ENTRIES, K_p
        rank = fqm.rank if fqm is not None else 4
        rows = []
        for sigma, part, k in ENTRIES:
            v = K_p(p, sigma, part, k, rank)
            for s in s_values:
                g, x = _value_or_pole(v, s, "general"), _value_or_pole(v, s, "explicit")
                rows.append((f"p={p} {v.label} s={s}", f"general={g} explicit={x}"))
        return rows
    if kind == "gauss-sums":
        from .cyclotomic import format_cyclo
        fqm = fqm if fqm is not None else discriminant_form(A2)
        return [(f"g_{d}", format_cyclo(fqm.gauss_sum(d))) for d in range(1, 11)]
    if kind == "coset-counts":
        return [(f"d={d}", str(len(hecke_right_cosets(d)))) for d in range(1, 7)]
    raise KeyError(kind)


def _value_or_pole(v, s, which: str) -> str:
    try:
        return str(v.at(s, which))
    except ZeroDivisionError:
        return "pole"


SUITES = ("weil", "weil-embedding", "milgram", "extended", "cosets", "hecke", "local-factors",
          "pullback", "reproducing", "integral-rep", "orthogonality", "xi")


def run_suite(name: str, fqm: FiniteQuadraticModule | None = None, seed: int = 0,
              **kw) -> list[CheckResult]:
    """Dispatch used by the command line."""
    if name == "weil":
        return weil_suite(fqm, seed=seed, **kw)
    if name == "weil-embedding":
        return embedding_suite(fqm)
    if name == "milgram":
        return milgram_suite(fqm)
    if name == "extended":
        return extended_action_suite(fqm, seed=seed, **kw)
    if name == "cosets":
        return coset_suite(**kw)
    if name == "hecke":
        return hecke_suite(fqm, **kw)
    if name == "local-factors":
        return local_factor_suite(seed=seed, **kw)
    if name == "pullback":
        return pullback_suite(fqm, **kw)
    if name == "reproducing":
        return reproducing_suite(**kw)
    if name == "orthogonality":
        return orthogonality_suite(**kw)
    if name == "integral-rep":
        return integral_rep_suite(**kw)
    if name == "xi":
        return xi_suite(fqm, **kw)
    raise KeyError(name)
