"""Truncated Eisenstein and Poincare series with exact Weil-representation weights.

Weights rho^-1(gamma) e_0 are computed exactly and embedded into complex floats
once per residue class of gamma modulo the level.  All remaining error is
truncation error.

Conventions:
  phi(w) = w^-l |w|^-2s, integer power for w^-l and the real positive base for |w|^-2s;
  y^s for y < 0 is |y|^s e^{i pi s};
  det(Im)^s in the Poincare kernels uses |Im tau Im zeta|^s, so points of the
  lower half-plane are allowed.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .cosets import (complete_row, complete_symplectic, coprime_pairs, genus2_cosets,
                     hecke_right_cosets, lower_blocks, rank1_classes, rank2_classes)
from .discriminant import FiniteQuadraticModule
from .errors import ConvergenceRegionViolation, PoleProximity, WeightParityViolation
from .weil import WeilRep, hecke_factorization, mat_mod, weil_of

POLE_THRESHOLD = 1e-8


# ---------------------------------------------------------------------------
# value types

@dataclass(frozen=True)
class EvalPoint:
    genus: int
    tau: complex | np.ndarray
    tags: tuple[str, ...] = ("upper",)

    def __post_init__(self):
        if self.genus == 1:
            y = complex(self.tau).imag
            want = "upper" if y > 0 else "lower"
            if y == 0 or self.tags[0] != want:
                raise ValueError("point does not match its half-plane tag")
        else:
            y = np.asarray(self.tau).imag
            if np.any(np.linalg.eigvalsh((y + y.T) / 2) <= 0):
                raise ValueError("imaginary part is not positive definite")


@dataclass
class VectorValue:
    genus: int
    size: int
    coords: np.ndarray

    def matrix(self) -> np.ndarray:
        if self.genus != 2:
            raise ValueError("only genus-2 values have a matrix form")
        return self.coords.reshape(self.size, self.size)

    def norm_inf(self) -> float:
        return float(np.max(np.abs(self.coords))) if self.coords.size else 0.0

    def __sub__(self, other: "VectorValue") -> "VectorValue":
        return VectorValue(self.genus, self.size, self.coords - other.coords)

    def __add__(self, other: "VectorValue") -> "VectorValue":
        return VectorValue(self.genus, self.size, self.coords + other.coords)

    def scale(self, c: complex) -> "VectorValue":
        return VectorValue(self.genus, self.size, c * self.coords)

    def conjugate(self) -> "VectorValue":
        return VectorValue(self.genus, self.size, np.conj(self.coords))


def phi(w, l: int, s: complex = 0):
    """w^-l |w|^-2s."""
    w = np.asarray(w, dtype=complex)
    out = w ** (-l)
    if s != 0:
        out = out * np.abs(w) ** (-2 * s)
    return out


def neg_one_power(s: complex) -> complex:
    """(-1)^s := e^{i pi s}."""
    return cmath.exp(1j * math.pi * s)


def real_power(y: float, s: complex) -> complex:
    if s == 0:
        return 1.0
    if y > 0:
        return y ** s
    return abs(y) ** s * neg_one_power(s)


def check_weight(fqm: FiniteQuadraticModule, n: int, l: int, s: complex) -> None:
    if l % 2 or (2 * l + fqm.signature_mod_8) % 4:
        raise WeightParityViolation(f"2l + sig = {2 * l + fqm.signature_mod_8} is not 0 mod 4")
    if complex(s).real <= (n + 1 - l) / 2:
        warnings.warn(f"Re(s) <= {(n + 1 - l) / 2}: outside the region of absolute convergence",
                      ConvergenceRegionViolation, stacklevel=3)


# ---------------------------------------------------------------------------
# complex weights, cached by residue class

class _Weights:
    def __init__(self, W: WeilRep):
        self.W = W
        self.N = W.fqm.level
        self.k = W.size
        self.trivial = W.size == 1 and W.fqm.level == 1
        self._rho_inv: dict = {}
        self._ext: dict = {}
        q = np.array([Fraction(int(v), self.N) for v in W.fqm.q_values], dtype=object)
        self.q = np.array([float(v) for v in q])

    def rho1_inv(self, g) -> np.ndarray:
        key = mat_mod(g, self.N)
        hit = self._rho_inv.get(key)
        if hit is None:
            hit = self.W.rho1_inv(g).to_complex()
            self._rho_inv[key] = hit
        return hit

    def t_power(self, r: int) -> np.ndarray:
        """Diagonal of rho(T)^-r."""
        return np.exp(-2j * np.pi * r * self.q)

    def extended(self, mprime, d: int) -> np.ndarray:
        """rho^-1(M'/d) = (g_d/g) rho^-1(M') for M' in the double coset of diag(d^2, 1)."""
        key = (mprime, d)
        hit = self._ext.get(key)
        if hit is None:
            gam, gam_p = hecke_factorization(mprime, d)
            hit = self.W.extended_action(d, gam, gam_p, "D").to_complex()
            self._ext[key] = hit
        return hit


_weight_cache: dict = {}


def weights_of(fqm: FiniteQuadraticModule) -> _Weights:
    key = id(fqm)
    hit = _weight_cache.get(key)
    if hit is None or hit.W.fqm is not fqm:
        hit = _Weights(weil_of(fqm))
        _weight_cache[key] = hit
    return hit


# ---------------------------------------------------------------------------
# genus 1 Eisenstein series

def _e1_sum(fqm, l, s, tau: complex, height: int, dual: bool, im_factor: complex) -> np.ndarray:
    wts = weights_of(fqm)
    k = wts.k
    out = np.zeros(k, dtype=complex)
    out[0] += im_factor
    if height < 1:
        return out
    pairs = np.array(coprime_pairs(height), dtype=np.int64)
    pairs = pairs[~((pairs[:, 0] == 0) & (pairs[:, 1] == 1))]
    vals = phi(pairs[:, 0] * tau + pairs[:, 1], l, s) * im_factor
    if wts.trivial:
        out[0] += vals.sum()
        return out
    N = wts.N
    groups: dict = {}
    for (c, d), v in zip(pairs.tolist(), vals):
        key = (c % N, d % N)
        acc = groups.get(key)
        if acc is None:
            groups[key] = [complete_row(c, d), v]
        else:
            acc[1] += v
    for key in sorted(groups):
        g, v = groups[key]
        col = wts.rho1_inv(g)[:, 0]
        out += v * (np.conj(col) if dual else col)
    return out


def _e2_sum(fqm, l, s, Z: np.ndarray, height: int, dual: bool, im_factor: complex) -> np.ndarray:
    wts = weights_of(fqm)
    k2 = wts.k ** 2
    out = np.zeros(k2, dtype=complex)
    reps = genus2_cosets(height).representatives
    if wts.trivial:
        cs = np.array([lower_blocks(m)[0] for m in reps], dtype=float)
        ds = np.array([lower_blocks(m)[1] for m in reps], dtype=float)
        j = np.linalg.det(cs @ Z + ds)
        out[0] = im_factor * phi(j, l, s).sum()
        return out
    W = wts.W
    for m in reps:
        c, d = lower_blocks(m)
        j = np.linalg.det(np.array(c, dtype=float) @ Z + np.array(d, dtype=float))
        col = W.rho2_inv_column(m, 0)
        out += im_factor * phi(j, l, s) * (np.conj(col) if dual else col)
    return out


def structured_bounds(height: int) -> dict:
    """Truncation of the rank-parametrised genus-2 sum for a refinement level."""
    return {"u_bound": height, "c_bound": height, "det_bound": min(height, 5),
            "window1": 20 * height, "window2": 2 * height + 2}


def _e2_structured(fqm, l, s, Z: np.ndarray, bounds: dict, dual: bool,
                   im_factor: complex) -> np.ndarray:
    wts = weights_of(fqm)
    W, k, N = wts.W, wts.k, wts.N
    D = fqm
    out = np.zeros(k * k, dtype=complex)
    out[0] += im_factor
    sgn = 1 if dual else -1           # rho*: conjugate phases
    # rank one
    ks = np.arange(-bounds["window1"], bounds["window1"] + 1)
    for u, g, _v in rank1_classes(bounds["u_bound"], bounds["c_bound"]):
        uvec = np.array(u, dtype=float)
        zu = uvec @ Z @ uvec
        c, d0 = g[1]
        vals = im_factor * phi(c * zu + d0 + c * ks, l, s)
        if wts.trivial:
            out[0] += vals.sum()
            continue
        wg = wts.rho1_inv(g)[:, 0]
        if dual:
            wg = np.conj(wg)
        vec = np.zeros(k, dtype=complex)
        for r in range(N):
            vec += vals[(ks % N) == r].sum() * np.exp(sgn * 2j * np.pi * r * wts.q) * wg
        idx = D.scale_map(u[0]) * k + D.scale_map(u[1])
        np.add.at(out, idx, vec)
    # rank two
    kw = bounds["window2"]
    b = np.arange(-kw, kw + 1)
    b11, b12, b22 = (x.ravel() for x in np.meshgrid(b, b, b, indexing="ij"))
    if not wts.trivial:
        q1 = np.repeat(wts.q, k)
        q2 = np.tile(wts.q, k)
        q12 = (D.b_values.reshape(-1) % N) / N
        res = (b11 % N) * N * N + (b12 % N) * N + (b22 % N)
    for c, s0, d0 in rank2_classes(bounds["det_bound"]):
        cm = np.array(c, dtype=float)
        sm = np.array([[float(v) for v in row] for row in s0])
        detc = float(np.linalg.det(cm))
        z = Z + sm
        det = (z[0, 0] + b11) * (z[1, 1] + b22) - (z[0, 1] + b12) ** 2
        vals = im_factor * phi(detc * det, l, s)
        if wts.trivial:
            out[0] += vals.sum()
            continue
        v0 = W.rho2_inv_column(complete_symplectic(c, d0), 0)
        if dual:
            v0 = np.conj(v0)
        sums = np.bincount(res, weights=vals.real, minlength=N ** 3) + \
            1j * np.bincount(res, weights=vals.imag, minlength=N ** 3)
        for rr in np.nonzero(sums)[0]:
            r11, r12, r22 = rr // (N * N), (rr // N) % N, rr % N
            phase = np.exp(sgn * 2j * np.pi * (r11 * q1 + r22 * q2 + r12 * q12))
            out += sums[rr] * phase * v0
    return out


def eisenstein(fqm: FiniteQuadraticModule, n: int, l: int, s: complex, tau, height: int,
               dual: bool = False, method: str = "box") -> VectorValue:
    """Truncated E^n_{l,0}(tau, s) (or the dual-representation series when dual=True).

    Genus 1: coprime (c, d) with max(|c|, |d|) <= height, up to sign.
    Genus 2, method "box": coset classes of symmetric coprime pairs (C, D) with entries
    bounded by height.  Method "structured": classes parametrised by the rank of C,
    truncated by structured_bounds(height).
    """
    check_weight(fqm, n, l, s)
    k = fqm.order
    if n == 1:
        tau = complex(tau)
        if tau.imag <= 0:
            raise ValueError("tau must lie in the upper half-plane")
        vec = _e1_sum(fqm, l, s, tau, height, dual, real_power(tau.imag, s))
        return VectorValue(1, k, vec)
    Z = np.asarray(tau, dtype=complex)
    im = real_power(float(np.linalg.det(Z.imag)), s)
    if method == "structured":
        vec = _e2_structured(fqm, l, s, Z, structured_bounds(height), dual, im)
    elif method == "box":
        vec = _e2_sum(fqm, l, s, Z, height, dual, im)
    else:
        raise ValueError("method must be box or structured")
    return VectorValue(2, k, vec)


def eisenstein_negarg(fqm: FiniteQuadraticModule, n: int, l: int, s: complex, tau, height: int,
                      variant: str = "conj") -> VectorValue:
    """E^n_{l,0}(-tau, s).

    variant "conj": ((-1)^n)^s E^{n*}(tau, s) with (-1)^s = e^{i pi s};
    variant "neg": the defining sum evaluated directly at -tau.
    """
    check_weight(fqm, n, l, s)
    if variant == "conj":
        val = eisenstein(fqm, n, l, s, tau, height, dual=True)
        return val.scale(neg_one_power(n * s) if n % 2 else 1.0)
    if variant != "neg":
        raise ValueError("variant must be conj or neg")
    k = fqm.order
    if n == 1:
        t = -complex(tau)
        vec = _e1_sum(fqm, l, s, t, height, False, real_power(t.imag, s))
        return VectorValue(1, k, vec)
    Z = -np.asarray(tau, dtype=complex)
    vec = _e2_sum(fqm, l, s, Z, height, False, real_power(float(np.linalg.det(Z.imag)), s))
    return VectorValue(2, k, vec)


# ---------------------------------------------------------------------------
# Poincare kernels

def lipschitz_sum(x: np.ndarray, l: int, alpha: np.ndarray, terms: int = 40) -> np.ndarray:
    """sum_n (x + n)^-l e(-n alpha) for Im x > 0, alpha in [0, 1).

    Returns an array of shape x.shape + alpha.shape.
    """
    x = np.asarray(x, dtype=complex)
    alpha = np.asarray(alpha, dtype=float)
    const = (-2j * np.pi) ** l / math.factorial(l - 1)
    m = np.arange(terms)
    mu = alpha[..., None] + m + (alpha[..., None] == 0)          # mu in alpha + Z, mu > 0
    ex = np.exp(2j * np.pi * x[..., None, None] * mu)
    return const * np.sum(mu ** (l - 1) * ex, axis=-1)


def _gamma_bottom_rows(height: int) -> list[tuple[int, int]]:
    """All coprime (c, d) with max(|c|, |d|) <= height, both signs."""
    rows = []
    for c, d in coprime_pairs(height):
        rows.append((c, d))
        rows.append((-c, -d))
    return rows


def _poincare_matrix(wts: _Weights, l: int, s: complex, tau: complex, zeta: complex,
                     height: int, kwindow: int, sign: int, method: str) -> np.ndarray:
    """sum_{gamma in Gamma_1} phi(j(gamma,tau)) phi(gamma tau - sign*zeta) rho^-1(gamma).

    The sum over lambda of rho^-1(gamma) e_lambda (x) e_lambda has matrix rho^-1(gamma).
    """
    k, N = wts.k, wts.N
    out = np.zeros((k, k), dtype=complex)
    target = sign * zeta
    if method == "lipschitz" and s != 0:
        raise ValueError("the Lipschitz path needs s = 0")
    ks = np.arange(-kwindow, kwindow + 1)
    for c, d in _gamma_bottom_rows(height):
        g = ((1, 0), (0, 1)) if (c, d) == (0, 1) else (((-1, 0), (0, -1)) if (c, d) == (0, -1)
                                                     else complete_row(c, d))
        j = c * tau + d
        gt = (g[0][0] * tau + g[0][1]) / j
        pre = phi(j, l, s)
        rho = wts.rho1_inv(g)
        if method == "lipschitz":
            x = gt - target
            if abs(x.imag) < POLE_THRESHOLD:
                raise PoleProximity("kernel evaluated on a pole line")
            # rho^-1(T^k g) = rho^-1(g) rho(T)^-k: column nu picks e(-k q(nu))
            if x.imag > 0:
                lip = lipschitz_sum(x, l, wts.q % 1.0)
            else:
                lip = np.conj(lipschitz_sum(np.conj(x), l, (-wts.q) % 1.0))
            out += pre * rho * lip[None, :]
        else:
            w = gt + ks - target
            if np.min(np.abs(w)) < POLE_THRESHOLD:
                raise PoleProximity("kernel evaluated at a pole")
            vals = pre * phi(w, l, s)
            if wts.trivial:
                out += vals.sum() * rho
            else:
                for r in range(N):
                    sr = vals[(ks % N) == r].sum()
                    out += sr * rho * wts.t_power(r)[None, :]
    return out


def poincare_kernel_array(fqm: FiniteQuadraticModule, l: int, tau: np.ndarray, zeta: complex,
                          height: int = 8, lip_terms: int = 40) -> np.ndarray:
    """P^+_l(tau, zeta, 0) at many points tau, shape (m, k, k).

    Same truncation of Gamma_1 as poincare_plus; the translation sum is done in closed
    form, so s = 0 only.
    """
    wts = weights_of(fqm)
    tau = np.asarray(tau, dtype=complex).ravel()
    out = np.zeros((tau.size, wts.k, wts.k), dtype=complex)
    alpha = wts.q % 1.0
    for c, d in _gamma_bottom_rows(height):
        g = ((1, 0), (0, 1)) if (c, d) == (0, 1) else (((-1, 0), (0, -1)) if (c, d) == (0, -1)
                                                     else complete_row(c, d))
        j = c * tau + d
        x = (g[0][0] * tau + g[0][1]) / j - zeta
        if np.min(np.abs(x.imag)) < POLE_THRESHOLD:
            raise PoleProximity("kernel evaluated on a pole line")
        lip = np.empty((tau.size, wts.k), dtype=complex)
        up = x.imag > 0
        if up.any():
            lip[up] = lipschitz_sum(x[up], l, alpha, lip_terms)
        if (~up).any():
            lip[~up] = np.conj(lipschitz_sum(np.conj(x[~up]), l, (-wts.q) % 1.0, lip_terms))
        out += (j ** (-l))[:, None, None] * wts.rho1_inv(g)[None, :, :] * lip[:, None, :]
    return out


def _im_abs_power(tau: complex, zeta: complex, s: complex) -> complex:
    if s == 0:
        return 1.0
    return abs(tau.imag * zeta.imag) ** s


def poincare_plus(fqm: FiniteQuadraticModule, l: int, s: complex, tau: complex, zeta: complex,
                  height: int, kwindow: int = 60, kind: str = "plus",
                  method: str = "direct") -> VectorValue:
    """Truncated P_l^+(tau, zeta, s) (kind "plus") or P_l (kind "minus", with tau + zeta).

    Gamma_1 is truncated to bottom rows with max(|c|,|d|) <= height and
    translations |k| <= kwindow (method "direct"), or the translation sum is done in
    closed form (method "lipschitz", s = 0 only).
    """
    tau, zeta = complex(tau), complex(zeta)
    if complex(s).real <= (3 - l) / 2:
        warnings.warn("Re(s) outside the region of absolute convergence",
                      ConvergenceRegionViolation, stacklevel=2)
    if kind == "plus":
        if (tau.imag > 0) == (zeta.imag > 0) and abs(tau - zeta) < 1e-6:
            raise PoleProximity("tau and zeta coincide in the same half-plane")
        sign = 1
    elif kind == "minus":
        sign = -1
    else:
        raise ValueError("kind must be plus or minus")
    wts = weights_of(fqm)
    mat = _poincare_matrix(wts, l, s, tau, zeta, height, kwindow, sign, method)
    mat *= _im_abs_power(tau, zeta, s)
    return VectorValue(2, wts.k, mat.reshape(-1))


def script_P_plus(fqm: FiniteQuadraticModule, l: int, s: complex, tau: complex, zeta: complex,
                  d: int, height: int, kwindow: int = 60, method: str = "direct") -> VectorValue:
    """Truncated sum over M in SL2(Z)\\SL2(Z) D SL2(Z) of P^+ slashed by M in (zeta, rho*)."""
    tau, zeta = complex(tau), complex(zeta)
    wts = weights_of(fqm)
    k = wts.k
    total = np.zeros((k, k), dtype=complex)
    for mp in hecke_right_cosets(d).representatives:
        (a, b), (_, c) = mp
        mz = (a * zeta + b) / c
        jm = c / d
        x = _poincare_matrix(wts, l, s, tau, mz, height, kwindow, 1, method)
        x *= _im_abs_power(tau, mz, s)
        bmat = np.conj(wts.extended(mp, d)) if not wts.trivial else np.ones((1, 1))
        total += jm ** (-l) * (x @ bmat.T)
    return VectorValue(2, k, total.reshape(-1))


# ---------------------------------------------------------------------------
# pullback

def pullback_sides(fqm: FiniteQuadraticModule, l: int, s: complex, tau: complex, zeta: complex,
                   d_max: int, height: int, g1_height: int = 200, p_height: int = 12,
                   kwindow: int = 60, method: str = "direct") -> dict:
    """Both sides of the doubling decomposition of E^{2*} on diag(tau, zeta)."""
    from .cyclotomic import to_complex
    W = weil_of(fqm)
    Z = np.array([[tau, 0], [0, zeta]], dtype=complex)
    lhs = eisenstein(fqm, 2, l, s, Z, height, dual=True)
    e1 = eisenstein(fqm, 1, l, s, tau, g1_height, dual=True)
    e2 = eisenstein(fqm, 1, l, s, zeta, g1_height, dual=True)
    tensor = VectorValue(2, fqm.order, np.kron(e1.coords, e2.coords))
    pref = complex(to_complex(W.s_scalar(1).conjugate()))   # e(sig/8) |D|^-1/2
    corr = np.zeros(fqm.order ** 2, dtype=complex)
    terms = {}
    for d in range(1, d_max + 1):
        ratio = complex(to_complex(W.gauss_ratio(d)))
        sp = script_P_plus(fqm, l, s, -complex(tau), zeta, d, p_height, kwindow, method)
        term = pref * ratio * d ** (-l - 2 * s) * sp.coords
        terms[d] = term
        corr += term
    rhs = tensor + VectorValue(2, fqm.order, corr)
    return {"lhs": lhs, "tensor": tensor, "correction": corr, "rhs": rhs, "terms": terms}


def pullback_residual(fqm: FiniteQuadraticModule, l: int, s: complex, tau: complex, zeta: complex,
                      d_max: int, height: int, **kw) -> float:
    sides = pullback_sides(fqm, l, s, tau, zeta, d_max, height, **kw)
    return (sides["lhs"] - sides["rhs"]).norm_inf()


# ---------------------------------------------------------------------------
# fast genus-2 evaluation on the diagonal (trivial module, s = 0)

def eisenstein_series_level_one(l: int, tau: np.ndarray, terms: int = 60) -> np.ndarray:
    """Normalised holomorphic Eisenstein series 1 - (2l/B_l) sum sigma_{l-1}(n) q^n."""
    from sympy import bernoulli
    const = -2 * l / float(bernoulli(l))
    n = np.arange(1, terms + 1)
    sig = np.array([sum(dd ** (l - 1) for dd in range(1, m + 1) if m % dd == 0) for m in n],
                   dtype=float)
    q = np.exp(2j * np.pi * np.asarray(tau, dtype=complex)[..., None] * n)
    return 1 + const * np.sum(sig * q, axis=-1)


def e2_diagonal_trivial(l: int, tau: np.ndarray, zeta: complex, det_bound: int = 4,
                        u_bound: int = 12, window: int = 12, lip_terms: int = 40) -> np.ndarray:
    """E^2_{l,0}(diag(tau, zeta), 0) for unimodular lattices, vectorised over tau.

    Classes are split by the rank of C.  Rank one: sum over primitive u of
    E_l(u Z u^T) - 1.  Rank two: C in Hermite form with det C <= det_bound and
    S = C^-1 D mod 1; the translation over b11 is summed in closed form.
    """
    tau = np.asarray(tau, dtype=complex)
    if tau.size > 16:
        flat = tau.ravel()
        parts = [e2_diagonal_trivial(l, flat[i:i + 16], zeta, det_bound, u_bound, window, lip_terms)
                 for i in range(0, flat.size, 16)]
        return np.concatenate(parts).reshape(tau.shape)
    out = np.ones(tau.shape, dtype=complex)
    # rank one
    seen = set()
    for u1 in range(0, u_bound + 1):
        for u2 in range(-u_bound, u_bound + 1):
            if gcd(u1, u2) != 1 or (u1 == 0 and u2 != 1):
                continue
            if (u1, u2) in seen:
                continue
            seen.add((u1, u2))
            zu = u1 * u1 * tau + u2 * u2 * zeta
            if np.min(zu.imag) > 8:
                continue
            out += eisenstein_series_level_one(l, zu) - 1
    # rank two
    for p in range(1, det_bound + 1):
        for r in range(1, det_bound // p + 1):
            n = p * r
            for x in range(r):
                cmat = np.array([[p, x], [0, r]])
                cinv = np.linalg.inv(cmat)
                for k1 in range(n):
                    for k2 in range(n):
                        for k3 in range(n):
                            smat = np.array([[k1, k2], [k2, k3]]) / n
                            dmat = cmat @ smat
                            di = np.rint(dmat).astype(int)
                            if np.abs(dmat - di).max() > 1e-9:
                                continue
                            if not _coprime_pair(((p, x), (0, r)), tuple(map(tuple, di))):
                                continue
                            out += n ** (-l) * _rank2_sum(l, tau, zeta, smat, window, lip_terms)
    return out


def _coprime_pair(c, d) -> bool:
    row0, row1 = c[0] + d[0], c[1] + d[1]
    g = 0
    for i in range(4):
        for j in range(i + 1, 4):
            g = gcd(g, row0[i] * row1[j] - row0[j] * row1[i])
    return g == 1


def _rank2_sum(l, tau, zeta, smat, window, lip_terms):
    """sum over integral symmetric B of det(Z + S + B)^-l with Z = diag(tau, zeta)."""
    total = np.zeros(tau.shape, dtype=complex)
    b = np.arange(-window, window + 1)
    w = zeta + smat[1, 1] + b                       # b22
    off = smat[0, 1] + b                            # b12
    wg, og = np.meshgrid(w, off, indexing="ij")
    wg, og = wg.ravel(), og.ravel()
    # det = w (tau + s11 + b11 - off^2 / w)
    shift = smat[0, 0] - og ** 2 / wg
    x = tau[..., None] + shift
    keep = np.min(x.imag, axis=tuple(range(x.ndim - 1))) < 12 if x.ndim > 1 else x.imag < 12
    x = x[..., keep]
    lip = lipschitz_sum(x, l, np.zeros(1), lip_terms)[..., 0]
    total += np.sum(wg[keep] ** (-l) * lip, axis=-1)
    return total
