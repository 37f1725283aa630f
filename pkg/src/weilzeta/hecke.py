"""Hecke operators on vector-valued q-expansions, eigenvalues and Petersson quadrature.

Slash action for M in GL2+(Q) with a Weil action attached:
    (f | M)(z) = j(M, z)^-l rho^-1(M) f(M z).
T(D') uses the representatives [[a, b], [0, c]] with ac = d^2 and the factor
det^{l/2-1} = d^{2l-4}.  T(D) uses the same representatives scaled by 1/d and the
extended action (g_d/g) rho^-1(M').
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from .cosets import hecke_right_cosets
from .cyclotomic import CycloNum, to_complex
from .discriminant import (A2, A2_A2, D2_DIAG, E8, FiniteQuadraticModule, discriminant_form)
from .errors import (FormatError, NotAnEigenform, QuadratureUnstable, TruncationTooCoarse,
                     ZeroGaussSum)
from .series import VectorValue, weights_of
from .weil import hecke_factorization, weil_of

PROBES = (1j, 0.5 + 1j, 2j)


# ---------------------------------------------------------------------------
# q-expansions

@dataclass
class QExpansion:
    """Truncated Fourier expansion sum_lambda sum_n a(lambda, n) e(n tau) e_lambda.

    components maps the element index of lambda to a list of (n, a) with n a Fraction.
    """
    module: FiniteQuadraticModule
    weight: int
    components: dict[int, list[tuple[Fraction, complex]]]
    truncation: int
    cusp: bool = True

    def __post_init__(self):
        N = max(self.module.level, 1)
        qv = self.module.q_values
        for idx, terms in self.components.items():
            if not 0 <= idx < self.module.order:
                raise FormatError(f"component index {idx} out of range")
            frac = Fraction(int(qv[idx]), N)
            for n, _ in terms:
                if (Fraction(n) - frac).denominator != 1:
                    raise FormatError(f"exponent {n} not in Z + q(lambda) = Z + {frac}")
                if self.cusp and n <= 0:
                    raise FormatError(f"non-positive exponent {n} in a cusp form")

    @property
    def size(self) -> int:
        return self.module.order

    def scale(self, alpha: complex) -> "QExpansion":
        comps = {i: [(n, alpha * a) for n, a in t] for i, t in self.components.items()}
        return QExpansion(self.module, self.weight, comps, self.truncation, self.cusp)

    def __add__(self, other: "QExpansion") -> "QExpansion":
        if other.module is not self.module or other.weight != self.weight:
            raise ValueError("q-expansions live in different spaces")
        comps: dict[int, dict[Fraction, complex]] = {}
        for src in (self, other):
            for i, t in src.components.items():
                acc = comps.setdefault(i, {})
                for n, a in t:
                    acc[n] = acc.get(n, 0) + a
        merged = {i: sorted(acc.items()) for i, acc in comps.items()}
        return QExpansion(self.module, self.weight, merged,
                          min(self.truncation, other.truncation), self.cusp and other.cusp)

    def coefficient(self, idx: int, n) -> complex:
        n = Fraction(n)
        for m, a in self.components.get(idx, []):
            if m == n:
                return a
        return 0


def zero_expansion(module: FiniteQuadraticModule, weight: int, truncation: int = 1) -> QExpansion:
    return QExpansion(module, weight, {}, truncation)


def delta_coefficients(count: int) -> list[int]:
    """tau(1..count) from 1728 Delta = E4^3 - E6^2, exact integers."""
    n = count + 1
    sig3 = [0] * n
    sig5 = [0] * n
    for dd in range(1, n):
        for m in range(dd, n, dd):
            sig3[m] += dd ** 3
            sig5[m] += dd ** 5
    e4 = [1] + [240 * sig3[m] for m in range(1, n)]
    e6 = [1] + [-504 * sig5[m] for m in range(1, n)]

    def mul(a, b):
        out = [0] * n
        for i, x in enumerate(a):
            if x:
                for j in range(n - i):
                    out[i + j] += x * b[j]
        return out

    diff = [x - y for x, y in zip(mul(mul(e4, e4), e4), mul(e6, e6))]
    return [c // 1728 for c in diff[1:]]


def delta_expansion(truncation: int = 60, module: FiniteQuadraticModule | None = None) -> QExpansion:
    """Delta as a form for the trivial Weil representation (default module: E8)."""
    module = module or trivial_module()
    if module.order != 1:
        raise ValueError("Delta lives on a unimodular lattice")
    terms = [(Fraction(m), complex(c)) for m, c in enumerate(delta_coefficients(truncation), 1)]
    return QExpansion(module, 12, {0: terms}, truncation)


def delta_product(tau) -> np.ndarray:
    """q prod (1 - q^n)^24, summed until the factors are numerically 1."""
    tau = np.asarray(tau, dtype=complex)
    q = np.exp(2j * np.pi * tau)
    out = q.copy()
    n = 1
    while True:
        qn = q ** n
        out = out * (1 - qn) ** 24
        if np.max(np.abs(qn)) < 1e-18:
            return out
        n += 1


_TRIVIAL = None


def trivial_module() -> FiniteQuadraticModule:
    global _TRIVIAL
    if _TRIVIAL is None:
        _TRIVIAL = discriminant_form(E8)
    return _TRIVIAL


def _named_modules() -> dict:
    return {(): trivial_module(), (3,): discriminant_form(A2),
            (3, 3): discriminant_form(A2_A2), (2, 2): discriminant_form(D2_DIAG)}


_HEADER = re.compile(r"module:\s*([\d ,]*);\s*weight:\s*(-?\d+);\s*truncation:\s*(\d+)")
_LINE = re.compile(r"lambda=\(([-\d, ]*)\);\s*n=(-?\d+(?:/\d+)?);\s*c=([^,]+),(.+)")


def write_qexpansion(f: QExpansion, path: str | Path) -> None:
    divs = ",".join(str(d) for d in f.module.elementary_divisors) or "1"
    lines = [f"module: {divs}; weight: {f.weight}; truncation: {f.truncation}"]
    elems = f.module.elements()
    for idx in sorted(f.components):
        lam = ",".join(str(x) for x in elems[idx])
        for n, a in f.components[idx]:
            a = complex(a)
            lines.append(f"lambda=({lam}); n={n}; c={a.real!r},{a.imag!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_qexpansion(path: str | Path, module: FiniteQuadraticModule | None = None) -> QExpansion:
    text = Path(path).read_text().splitlines()
    rows = [t for t in text if t.strip() and not t.lstrip().startswith("#")]
    if not rows:
        raise FormatError("empty q-expansion file")
    m = _HEADER.fullmatch(rows[0].strip())
    if not m:
        raise FormatError(f"bad header: {rows[0]!r}")
    divs = tuple(int(x) for x in re.split(r"[ ,]+", m.group(1).strip()) if x and int(x) > 1)
    if module is None:
        module = _named_modules().get(divs)
        if module is None:
            raise FormatError(f"no built-in module with elementary divisors {divs}; pass one")
    elif module.elementary_divisors != divs:
        raise FormatError("header divisors do not match the supplied module")
    comps: dict[int, list] = {}
    for line in rows[1:]:
        lm = _LINE.fullmatch(line.strip())
        if not lm:
            raise FormatError(f"bad line: {line!r}")
        lam = [int(x) for x in lm.group(1).split(",") if x.strip()]
        if len(lam) != len(divs):
            raise FormatError(f"lambda {lam} has the wrong length")
        comps.setdefault(module.index(lam), []).append(
            (Fraction(lm.group(2)), complex(float(lm.group(3)), float(lm.group(4)))))
    return QExpansion(module, int(m.group(2)), comps, int(m.group(3)))


# ---------------------------------------------------------------------------
# evaluation

def reduce_to_fundamental_domain(tau: complex) -> tuple[complex, tuple]:
    """Return (tau0, gamma) with gamma in SL2(Z), tau0 = gamma tau in the standard domain."""
    g = ((1, 0), (0, 1))
    z = complex(tau)
    for _ in range(1000):
        k = math.floor(z.real + 0.5)
        if k:
            z -= k
            g = ((g[0][0] - k * g[1][0], g[0][1] - k * g[1][1]), g[1])
        if abs(z) < 1 - 1e-15:
            z = -1 / z
            g = ((-g[1][0], -g[1][1]), g[0])
        else:
            return z, g
    raise RuntimeError("reduction did not terminate")


def _tail_bound(f: QExpansion, y: float) -> float:
    """Bound for the dropped terms assuming |a(n)| <= A n^l with A fitted on the kept terms."""
    A = 0.0
    for terms in f.components.values():
        for n, a in terms:
            if n > 0:
                A = max(A, abs(a) / float(n) ** f.weight)
    if A == 0:
        return 0.0
    T = f.truncation
    r = math.exp(-2 * math.pi * y)
    total, n = 0.0, T + 1
    while True:
        t = A * n ** f.weight * r ** n
        total += t
        if t < 1e-30 * max(total, 1e-300) or n > T + 10_000:
            return total
        n += 1


def eval_form(f: QExpansion, tau: complex, reduce: bool = False, tol: float = 1e-12) -> VectorValue:
    """Componentwise truncated Fourier sum; with reduce=True, tau is first moved into the
    fundamental domain and the value is transported back by the Weil representation."""
    tau = complex(tau)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half-plane")
    if reduce:
        tau0, g = reduce_to_fundamental_domain(tau)
        v0 = eval_form(f, tau0, reduce=False, tol=tol).coords
        # f(tau) = j(g, tau)^-l rho(g)^-1 f(g tau)
        j = g[1][0] * tau + g[1][1]
        rho_inv = weights_of(f.module).rho1_inv(g)
        return VectorValue(1, f.size, j ** (-f.weight) * (rho_inv @ v0))
    if _tail_bound(f, tau.imag) > tol:
        raise TruncationTooCoarse(f"tail bound exceeds {tol} at Im tau = {tau.imag:.4g}")
    out = np.zeros(f.size, dtype=complex)
    for idx, terms in f.components.items():
        if terms:
            n = np.array([float(t[0]) for t in terms])
            a = np.array([t[1] for t in terms], dtype=complex)
            out[idx] = np.sum(a * np.exp(2j * np.pi * n * tau))
    return VectorValue(1, f.size, out)


def eval_form_array(f: QExpansion, tau: np.ndarray) -> np.ndarray:
    """Vectorised truncated sum at many points (no reduction, no tail check)."""
    tau = np.asarray(tau, dtype=complex)
    out = np.zeros(tau.shape + (f.size,), dtype=complex)
    for idx, terms in f.components.items():
        if terms:
            n = np.array([float(t[0]) for t in terms])
            a = np.array([t[1] for t in terms], dtype=complex)
            out[..., idx] = np.exp(2j * np.pi * tau[..., None] * n) @ a
    return out


# ---------------------------------------------------------------------------
# Hecke operators at a point

def hecke_at_point(f: QExpansion, d: int, zeta: complex, variant: str = "Dprime",
                   tol: float = 1e-12) -> VectorValue:
    """(f | T)(zeta) for T = T(D') (variant "Dprime") or T(D) (variant "D")."""
    if d < 1:
        raise ValueError("d must be positive")
    zeta = complex(zeta)
    l = f.weight
    W = weil_of(f.module)
    trivial = f.size == 1
    total = np.zeros(f.size, dtype=complex)
    for mp in hecke_right_cosets(d).representatives:
        (a, b), (_, c) = mp
        val = eval_form(f, (a * zeta + b) / c, reduce=True, tol=tol).coords
        if trivial:
            weight = complex(to_complex(W.gauss_ratio(d))) if variant == "D" else 1.0
            act = weight * val
        else:
            gam, gam_p = hecke_factorization(mp, d)
            act = W.extended_action(d, gam, gam_p, variant).to_complex() @ val
        if variant == "Dprime":
            total += c ** (-l) * act
        elif variant == "D":
            total += (c / d) ** (-l) * act
        else:
            raise ValueError("variant must be Dprime or D")
    if variant == "Dprime":
        total *= float(d) ** (2 * l - 4)
    return VectorValue(1, f.size, total)


def eigenvalue_with_deviation(f: QExpansion, d: int, probes=PROBES,
                              tol: float = 1e-8) -> tuple[complex, float]:
    """lambda_d from componentwise ratios at the probe points, and their max deviation."""
    ratios = []
    for z in probes:
        fz = eval_form(f, z, reduce=True).coords
        tz = hecke_at_point(f, d, z).coords
        scale = np.max(np.abs(fz))
        if scale == 0:
            raise NotAnEigenform(f"f vanishes at the probe point {z}")
        for i in np.nonzero(np.abs(fz) > 1e-8 * scale)[0]:
            ratios.append(tz[i] / fz[i])
    ratios = np.array(ratios)
    lam = ratios[0]
    dev = float(np.max(np.abs(ratios - lam)) / max(1.0, abs(lam)))
    if dev > tol:
        raise NotAnEigenform(f"eigenvalue ratios disagree (relative deviation {dev:.3e})")
    return complex(lam), dev


def eigenvalue(f: QExpansion, d: int, probes=PROBES, tol: float = 1e-8) -> complex:
    return eigenvalue_with_deviation(f, d, probes, tol)[0]


def classical_hecke_eigenvalue(coeffs: list[int], d: int, l: int) -> Fraction:
    """lambda_d of a level-one Hecke eigenform with a(1) = 1, from its q-expansion alone.

    Applies d^{2l-4} sum_{ac = d^2, b mod c, gcd(a,b,c) = 1} c^-l f((a z + b)/c) to the
    expansion and reads off the coefficient of q^1.  Exact.
    """
    total = Fraction(0)
    n2 = d * d
    for a in range(1, n2 + 1):
        if n2 % a:
            continue
        c = n2 // a
        # coefficient of q^1 receives a(n) with n a / c = 1, i.e. n = c / a
        if c % a:
            continue
        n = c // a
        if n > len(coeffs):
            raise TruncationTooCoarse("q-expansion too short for this d")
        s = _ramanujan_like(a, c, n)
        total += Fraction(coeffs[n - 1]) * Fraction(s) / Fraction(c) ** l
    return total * Fraction(d) ** (2 * l - 4)


def _ramanujan_like(a: int, c: int, n: int) -> int:
    """sum_{b mod c, gcd(a,b,c)=1} e(n b / c), by Moebius inversion over g | gcd(a, c)."""
    total = 0
    h = math.gcd(a, c)
    for g in range(1, h + 1):
        if h % g == 0:
            mu = _moebius(g)
            if mu and n % (c // g) == 0:
                total += mu * (c // g)
    return total


def _moebius(n: int) -> int:
    out, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            out = -out
        p += 1
    return -out if n > 1 else out


# ---------------------------------------------------------------------------
# Gauss-sum relation between T(D) and T(D')

@dataclass(frozen=True)
class HeckeRelation:
    d: int
    g_over_gd: CycloNum | None
    gd_over_g: CycloNum | None
    kappa: CycloNum | None
    root_of_unity: bool
    order: int | None


def hecke_relation_scalar(fqm: FiniteQuadraticModule, d: int) -> HeckeRelation:
    """Exact g/g_d, g_d/g and kappa_d = (g_d/g) / conj(g_d/g).

    kappa_d is the scalar with (f, g | T(D))_1 = kappa_d (f | T(D), g)_1.
    """
    g = fqm.gauss_sum(1)
    gd = fqm.gauss_sum(d)
    if gd.is_zero():
        raise ZeroGaussSum(f"g_{d}(L) = 0")
    r = gd / g
    kappa = r / r.conjugate()
    order = _root_order(g / gd)
    return HeckeRelation(d, g / gd, r, kappa, order is not None and 8 % order == 0, order)


def _root_order(x: CycloNum, bound: int = 240) -> int | None:
    """Multiplicative order of x if it is a root of unity of order <= bound."""
    if x * x.conjugate() != CycloNum.one():
        return None
    p = x
    for k in range(1, bound + 1):
        if p == CycloNum.one():
            return k
        p = p * x
    return None


# ---------------------------------------------------------------------------
# quadrature on the fundamental domain

@dataclass(frozen=True)
class QuadratureSpec:
    """Tensor Gauss-Legendre rule on {|x| <= 1/2, sqrt(1 - x^2) <= y <= Y}, measure dx dy / y^2."""
    nx: int = 40
    ny: int = 40
    y_cut: float = 8.0

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        xg, xw = np.polynomial.legendre.leggauss(self.nx)
        yg, yw = np.polynomial.legendre.leggauss(self.ny)
        x = 0.5 * xg
        wx = 0.5 * xw
        lo = np.sqrt(1 - x ** 2)
        half = (self.y_cut - lo) / 2
        y = lo[:, None] + half[:, None] * (yg[None, :] + 1)
        w = wx[:, None] * half[:, None] * yw[None, :] / y ** 2
        tau = x[:, None] + 1j * y
        return tau.ravel(), w.ravel()

    def volume(self) -> float:
        """Weight total plus the exact area above the cutoff; approximates pi/3."""
        return float(self.nodes()[1].sum()) + 1 / self.y_cut

    def refined(self, factor: float = 1.5) -> "QuadratureSpec":
        return QuadratureSpec(int(self.nx * factor), int(self.ny * factor), self.y_cut)


def petersson_integral(f: QExpansion, G: Callable[[np.ndarray], np.ndarray], l: int,
                       quad: QuadratureSpec = QuadratureSpec(), refine: bool = False,
                       tol: float = 1e-6) -> np.ndarray:
    """result[lambda] = int_F sum_mu f_mu(tau) conj(G(tau)[mu, lambda]) Im(tau)^l dmu(tau).

    G maps an array of m points to an array (m, k, k) (or (m,) when k = 1).
    With refine=True the rule is refined once and QuadratureUnstable is raised if the
    relative change exceeds tol.
    """
    def run(q: QuadratureSpec) -> np.ndarray:
        tau, w = q.nodes()
        fv = eval_form_array(f, tau)                              # (m, k)
        g = np.asarray(G(tau), dtype=complex)
        if g.ndim == 1:
            g = g[:, None, None]
        integrand = np.einsum("mu,mul->ml", fv, np.conj(g))
        return np.einsum("m,ml->l", w * tau.imag ** l, integrand)

    res = run(quad)
    if refine:
        res2 = run(quad.refined())
        scale = max(np.max(np.abs(res2)), 1e-300)
        if np.max(np.abs(res2 - res)) > tol * scale:
            raise QuadratureUnstable(
                f"refinement changed the integral by {np.max(np.abs(res2 - res)) / scale:.2e}")
        res = res2
    return res


def petersson_product(f: QExpansion, g: QExpansion, quad: QuadratureSpec = QuadratureSpec(),
                      g_values: np.ndarray | None = None) -> complex:
    """(f, g)_1 = int_F <f, g> y^l dmu by quadrature (both cusp forms)."""
    tau, w = quad.nodes()
    fv = eval_form_array(f, tau)
    gv = eval_form_array(g, tau) if g_values is None else g_values
    return complex(np.sum(w * tau.imag ** f.weight * np.sum(fv * np.conj(gv), axis=-1)))
