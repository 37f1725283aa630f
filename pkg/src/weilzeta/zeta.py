"""Local factors and constants of the genus-2 functional equation, and the standard zeta function.

Local factors are sympy rational functions of Y = p^-s with exact coefficients, so the
combinatorial formula and the closed forms can be compared as identities and then
evaluated at any s.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from pathlib import Path

import mpmath
import sympy as sp

from .discriminant import FiniteQuadraticModule, kronecker, primes_dividing
from .errors import (DivergenceSuspected, FormatError, GammaPole, InvalidPartition,
                     TruncationUnstable, UnsupportedRank)

Y = sp.Symbol("Y", positive=True)      # p^-s
RHO2 = Fraction(3, 2)

ID = (1, 2)
SWAP = (2, 1)
I0 = ((1, 2),)
I0_I1 = ((1,), (2,))

# (sigma, partition, k) entries of the genus-2 local factor sum
ENTRIES = (
    (ID, I0, 0), (ID, I0, 1),
    (ID, I0_I1, 0), (ID, I0_I1, 1), (ID, I0_I1, 2),
    (SWAP, I0, 0), (SWAP, I0, 1),
)


def entry_label(sigma, partition, k) -> str:
    return f"({'id' if sigma == ID else 'sigma'}, {'I0' if partition == I0 else 'I0+I1'}, {k})"


# ---------------------------------------------------------------------------
# combinatorial data of (sigma, partition)

@dataclass(frozen=True)
class _Combinatorics:
    sigma: tuple[int, ...]
    partition: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.sigma)
        seen = sorted(i for block in self.partition for i in block)
        if seen != list(range(1, n + 1)):
            raise InvalidPartition(f"{self.partition} is not a partition of 1..{n}")
        for block in self.partition:
            if {self.sigma[i - 1] for i in block} != set(block):
                raise InvalidPartition(f"block {block} is not stable under {self.sigma}")
        if any(self.sigma[self.sigma[i] - 1] != i + 1 for i in range(n)):
            raise InvalidPartition("sigma is not an involution")

    def s(self) -> int:
        return len(self.partition) - 1

    def sig(self, i: int) -> int:
        return self.sigma[i - 1]

    def c1(self) -> int:
        return sum(1 for i in range(1, len(self.sigma) + 1) if self.sig(i) == i)

    def c2(self) -> int:
        return len(self.sigma) - self.c1()

    def c1r(self, r: int) -> int:
        return sum(1 for i in self.partition[r] if self.sig(i) == i) if r <= self.s() else 0

    def c2r(self, r: int) -> int:
        return sum(1 for i in self.partition[r] if self.sig(i) > i) if r <= self.s() else 0

    def c1_upper(self, r: int) -> int:
        """Fixed points in I_r u ... u I_s."""
        return sum(self.c1r(j) for j in range(r, self.s() + 1))

    def n_upper(self, r: int) -> int:
        return sum(len(self.partition[j]) for j in range(r, self.s() + 1))

    def n_of(self, r: int) -> int:
        nu = self.n_upper(r)
        return nu * (nu + 1) // 2

    def t(self) -> int:
        total = 0
        for block in self.partition:
            for i in block:
                for j in block:
                    if i < j < self.sig(i) and self.sig(j) < self.sig(i):
                        total += 1
        return total

    def tau(self) -> int:
        total = 0
        for r in range(1, self.s() + 1):
            earlier = [j for b in self.partition[:r] for j in b]
            total += sum(1 for i in self.partition[r] for j in earlier if j < i)
        return total

    def A(self, i: int) -> Fraction:
        return sum((Fraction(self.c1r(j), 2) + self.c2r(j) for j in range(i)), Fraction(0))

    def B(self, i: int, m: int) -> Fraction:
        return -m * self.A(i) + self.n_of(0) - self.n_of(i)


def _comb(sigma, partition) -> _Combinatorics:
    return _Combinatorics(tuple(sigma), tuple(tuple(b) for b in partition))


def _ppow(p: int, e) -> sp.Expr:
    return sp.Integer(p) ** sp.Rational(e)


def _zeta_p(p: int, coeff_s: Fraction, const: Fraction) -> sp.Expr:
    """zeta_p(a s + b) = 1 / (1 - p^-(a s + b)) as a function of Y = p^-s."""
    a = Fraction(coeff_s)
    if a.denominator != 1:
        raise ValueError("non-integral coefficient of s in a local zeta argument")
    return 1 / (1 - Y ** int(a) * _ppow(p, -const))


# ---------------------------------------------------------------------------
# general composition

def kappa_p(p: int, sigma, partition, k: int) -> sp.Rational:
    """kappa_p(sigma, I, k); exact rational."""
    c = _comb(sigma, partition)
    s = c.s()
    if not 0 <= k <= s + 1:
        raise InvalidPartition(f"k = {k} outside 0..{s + 1}")
    P = sp.Integer(p)
    u = 1 - 1 / P
    c1, c2 = c.c1(), c.c2()
    head = sp.Integer(2) ** (-c1) * u ** (c1 + c2) * P ** (-c2) * P ** (-c.tau() - c.t())
    c1k = c.c1_upper(k)
    num = (sp.Integer(2) ** c1k * sp.Integer(2) ** sum(c.c1r(r) for r in range(k))
           * u ** c1k * P ** (-sum(c.n_of(r) for r in range(k + 1, s + 1)))
           * P ** sum(c.c1r(r) + 2 * c.c2r(r) for r in range(k)))
    den = sp.Integer(1)
    for r in range(k, s + 1):
        den *= 1 - P ** (-c.n_of(r))
    return sp.nsimplify(head * num / den)


def p_part_type(fqm: FiniteQuadraticModule, p: int) -> int:
    """1 for Z/p, 2 for (Z/p)^2, 0 for trivial; UnsupportedRank otherwise."""
    divs = [d for d in fqm.elementary_divisors if d % p == 0]
    pd = []
    for d in divs:
        q = 1
        while d % p == 0:
            d //= p
            q *= p
        pd.append(q)
    if any(q != p for q in pd) or len(pd) > 2:
        raise UnsupportedRank(f"p-part {pd} is not Z/p or (Z/p)^2")
    return len(pd)


def delta_p(p: int, sigma, partition, k: int, m: int, p_rank: int = 2) -> sp.Expr:
    """Delta_p(sigma, q, k) as a function of Y = p^-s (sum over subsets of odd positions)."""
    c = _comb(sigma, partition)
    if k == 0:
        return sp.Integer(1)
    if p_rank == 1:
        return sp.Integer(0)
    if p_rank != 2:
        raise UnsupportedRank("Delta_p is only defined for Z/p and (Z/p)^2 p-parts")
    leg_m1 = kronecker(-1, p)
    leg_2 = kronecker(2, p)
    total = sp.Integer(0)
    for d in range(k + 1):
        for odd in combinations(range(k), d):
            # parity of S_r = number of odd components among nu_0..nu_r
            o = [r for r in range(k) if sum(1 for i in odd if i <= r) % 2 == 1]
            e = [r for r in range(k) if r not in o]
            ce = sum(c.c1r(r) for r in e)
            co = sum(c.c1r(r) for r in o)
            term = sp.Integer(-1) ** ce * sp.Integer(leg_2) ** ce
            term *= sp.Integer(leg_m1) ** ((m - 2) // 2 * co)
            coeff = sum((2 * c.A(i) for i in odd), Fraction(0))
            const = sum((-c.B(i, m) for i in odd), Fraction(0))
            if coeff.denominator != 1:
                raise ValueError("non-integral exponent of p^s")
            term *= Y ** (-int(coeff)) * _ppow(p, const)
            total += term
    return total


def D_pj(p: int, sigma, partition, j: int, m: int) -> sp.Expr:
    """D_{p,j}(2s - 3/2) = zeta_p(4 A_j (2s - 3/2 - s0) - 2 B_j), s0 = m/2 - 3/2."""
    c = _comb(sigma, partition)
    A, B = c.A(j), c.B(j, m)
    s0 = Fraction(m, 2) - RHO2
    # 4A (2s - 3/2 - s0) - 2B = 8A s + (4A(-3/2 - s0) - 2B)
    return _zeta_p(p, 8 * A, 4 * A * (-RHO2 - s0) - 2 * B)


def K_p_general(p: int, sigma, partition, k: int, m: int, p_rank: int = 2) -> sp.Expr:
    expr = kappa_p(p, sigma, partition, k) * delta_p(p, sigma, partition, k, m, p_rank)
    for j in range(1, k + 1):
        expr *= D_pj(p, sigma, partition, j, m) - 1
    return sp.simplify(expr)


# ---------------------------------------------------------------------------
# closed forms for n = 2

def K_p_explicit(p: int, sigma, partition, k: int, m: int, p_rank: int = 2) -> sp.Expr:
    P = sp.Integer(p)
    u = 1 - 1 / P
    key = (tuple(sigma), tuple(tuple(b) for b in partition), k)
    if k == 0:
        table = {
            (ID, I0, 0): u ** 4 / (1 - P ** -3),
            (ID, I0_I1, 0): P ** -1 * u ** 3 / (1 - P ** -3),
            (SWAP, I0, 0): P ** -2 * u ** 2 / (1 - P ** -3),
        }
        return table[key]
    if p_rank == 1:
        return sp.Integer(0)
    leg_m1 = sp.Integer(kronecker(-1, p)) ** ((m - 2) // 2)
    leg_2 = sp.Integer(kronecker(2, p))
    z = lambda a, b: _zeta_p(p, Fraction(a), Fraction(b))    # noqa: E731  zeta_p(a s + b)
    if key == (ID, I0, 1):
        return 2 * u ** 4 * (z(8, 6) - 1)
    if key == (SWAP, I0, 1):
        return 2 * u ** 2 * (z(16, -6) - 1)
    if key == (ID, I0_I1, 1):
        return P * u ** 2 * (-leg_2 + leg_m1) * (z(8, -6) - 1)
    if key == (ID, I0_I1, 2):
        ps = Y ** -1 * _ppow(p, Fraction(m, 2) - 2)            # p^{s + m/2 - 2}
        return 4 * P ** 2 * u ** 3 * (1 - leg_m1 * leg_2 * ps) * (z(4, -4) - 1) * (z(8, -6) - 1)
    raise InvalidPartition(f"no closed form for {entry_label(*key)}")


@dataclass(frozen=True)
class LocalFactorValue:
    p: int
    sigma: tuple
    partition: tuple
    k: int
    general: sp.Expr
    explicit: sp.Expr

    @property
    def label(self) -> str:
        return entry_label(self.sigma, self.partition, self.k)

    def identical(self) -> bool:
        return sp.simplify(sp.together(self.general - self.explicit)) == 0

    def at(self, s, which: str = "general", dps: int = 50):
        """Value at s: exact Rational when it is rational, else an mpmath number."""
        expr = self.general if which == "general" else self.explicit
        return evaluate_in_s(expr, self.p, s, dps)


def evaluate_in_s(expr: sp.Expr, p: int, s, dps: int = 50):
    s_sym = sp.nsimplify(s) if not isinstance(s, complex) else None
    if s_sym is not None and s_sym.is_Integer:
        val = sp.nsimplify(expr.subs(Y, sp.Integer(p) ** (-s_sym)))
        if val.has(sp.zoo, sp.oo, sp.nan):
            raise ZeroDivisionError(f"pole at s = {s}")
        if val.is_Rational:
            return val
    with mpmath.workdps(dps):
        y = mpmath.power(p, -mpmath.mpmathify(s))
        f = sp.lambdify(Y, expr, modules="mpmath")
        return f(y)


def K_p(p: int, sigma, partition, k: int, m: int, p_rank: int = 2) -> LocalFactorValue:
    return LocalFactorValue(p, tuple(sigma), tuple(tuple(b) for b in partition), k,
                            K_p_general(p, sigma, partition, k, m, p_rank),
                            K_p_explicit(p, sigma, partition, k, m, p_rank))


def C_p(p: int, m: int, p_rank: int = 2, path: str = "explicit") -> dict[str, sp.Expr]:
    """C_p(id, I0), C_p(id, I0 u I1), C_p(sigma, I0) as functions of Y."""
    out = {"id,I0": sp.Integer(0), "id,I0+I1": sp.Integer(0), "sigma,I0": sp.Integer(0)}
    for sigma, part, k in ENTRIES:
        v = (K_p_explicit if path == "explicit" else K_p_general)(p, sigma, part, k, m, p_rank)
        key = ("id" if sigma == ID else "sigma") + "," + ("I0" if part == I0 else "I0+I1")
        out[key] += v
    return out


def local_factor_table(primes=(3, 5, 7), m: int = 4) -> list[dict]:
    """Rows (p, entry, general, explicit, equal) for (Z/p)^2 p-parts."""
    rows = []
    for p in primes:
        for sigma, part, k in ENTRIES:
            v = K_p(p, sigma, part, k, m)
            rows.append({"p": p, "entry": v.label, "general": sp.sstr(sp.factor(v.general)),
                         "explicit": sp.sstr(sp.factor(v.explicit)), "equal": v.identical()})
    return rows


# ---------------------------------------------------------------------------
# archimedean and unramified constants

def siegel_gamma(n: int, s):
    """Gamma_n(s) = pi^{n(n-1)/4} prod_{j<n} Gamma(s - j/2)."""
    s = mpmath.mpmathify(s)
    out = mpmath.power(mpmath.pi, mpmath.mpf(n * (n - 1)) / 4)
    for j in range(n):
        arg = s - mpmath.mpf(j) / 2
        if _is_gamma_pole(arg):
            raise GammaPole(f"Gamma pole at {arg}")
        out *= mpmath.gamma(arg)
    return out


def _rsiegel_gamma(n: int, s):
    s = mpmath.mpmathify(s)
    out = mpmath.power(mpmath.pi, -mpmath.mpf(n * (n - 1)) / 4)
    for j in range(n):
        out *= mpmath.rgamma(s - mpmath.mpf(j) / 2)
    return out


def _is_gamma_pole(z) -> bool:
    z = mpmath.mpc(z)
    return abs(z.imag) < 1e-30 and z.real <= 0 and abs(z.real - mpmath.nint(z.real)) < 1e-30


def chi_V(fqm: FiniteQuadraticModule, p: int) -> int:
    m = fqm.rank
    return kronecker((-1) ** (m // 2) * fqm.gram_det, p)


@lru_cache(maxsize=None)
def _primes_upto(bound: int) -> tuple[int, ...]:
    return tuple(int(p) for p in sp.primerange(2, bound + 1))


def xi_constant(l: int, s, fqm: FiniteQuadraticModule, prime_bound: int = 1000, n: int = 2,
                check: bool = False, tol: float = 1e-4):
    """xi(s, n, l, P) with the Euler products truncated at prime_bound.

    With check=True the bound is doubled and TruncationUnstable is raised if the
    relative change exceeds tol.
    """
    s = mpmath.mpmathify(s)
    rho = mpmath.mpf(n + 1) / 2
    alpha = (s + rho + l) / 2
    beta = (s + rho - l) / 2
    order = fqm.order
    pre = ((-1) ** (l // 2) * mpmath.power(2, (1 - s) * n)
           * mpmath.power(mpmath.pi, mpmath.mpf(n * (n + 1)) / 2) / mpmath.power(order, mpmath.mpf(n) / 2))
    gam = siegel_gamma(n, s) * _rsiegel_gamma(n, alpha) * _rsiegel_gamma(n, beta)
    value = pre * gam * _euler_ratio(s, fqm, prime_bound, n)
    if check:
        value2 = pre * gam * _euler_ratio(s, fqm, 2 * prime_bound, n)
        rel = abs(value2 - value) / max(abs(value2), mpmath.mpf(10) ** -300)
        if rel > tol:
            raise TruncationUnstable(f"doubling the prime bound changed xi by {float(rel):.2e}")
    return complex(value)


def _euler_ratio(s, fqm, bound: int, n: int):
    """a_n^P(s) / b_n^P(s) over primes p <= bound not dividing |L'/L|."""
    rho = mpmath.mpf(n + 1) / 2
    ratio = mpmath.mpf(1)
    for p in _primes_upto(bound):
        if fqm.order % p == 0:
            continue
        chi = chi_V(fqm, p)
        zp = lambda x: 1 / (1 - mpmath.power(p, -x))     # noqa: E731
        a = 1 - chi * mpmath.power(p, -(s + rho - n))
        b = 1 - chi * mpmath.power(p, -(s + rho))
        for k in range(1, n // 2 + 1):
            a *= zp(2 * s - n + 2 * k)
            b *= zp(2 * s + n - 2 * k + 1)
        ratio *= a / b
    return ratio


def functional_scalar(l: int, s, fqm: FiniteQuadraticModule, prime_bound: int = 1000,
                      path: str = "explicit") -> complex:
    """Scalar of E^2(tau, s - l/2) = scalar * E^2(tau, 3/2 - s - l/2)."""
    if fqm.order % 2 == 0 or not fqm.is_anisotropic():
        warnings.warn("the functional equation is stated for odd anisotropic modules",
                      UserWarning, stacklevel=2)
    s = mpmath.mpmathify(s)
    value = mpmath.mpmathify(xi_constant(l, 2 * s - mpmath.mpf(3) / 2, fqm, prime_bound))
    for p in primes_dividing(fqm.order):
        prank = p_part_type(fqm, p)
        cp = C_p(p, fqm.rank, prank, path)
        total = sum(cp.values(), sp.Integer(0))
        value *= evaluate_in_s(total, p, complex(s) if s.imag else float(s))
    return complex(value)


# ---------------------------------------------------------------------------
# standard zeta function

@dataclass
class EigenvalueSeries:
    values: dict[int, complex]

    def __post_init__(self):
        if abs(self.values.get(1, 0) - 1) > 1e-12:
            raise ValueError("lambda_1 must be 1")

    @property
    def d_max(self) -> int:
        return max(self.values)

    def write(self, path: str | Path) -> None:
        lines = [f"{d} {complex(v).real!r} {complex(v).imag!r}" for d, v in sorted(self.values.items())]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def read(cls, path: str | Path) -> "EigenvalueSeries":
        vals = {}
        for line in Path(path).read_text().splitlines():
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise FormatError(f"bad eigenvalue line: {line!r}")
            vals[int(parts[0])] = complex(float(parts[1]), float(parts[2]))
        return cls(vals)


def _growth_fit(eigs: EigenvalueSeries) -> tuple[float, float]:
    """(C, a) with |lambda_d| <= C d^a on the data, a from the log-log slope of maxima."""
    pts = [(math.log(d), math.log(abs(v))) for d, v in eigs.values.items() if d > 1 and abs(v) > 0]
    if len(pts) < 2:
        return (max([abs(v) for v in eigs.values.values()] + [1.0]), 0.0)
    n = len(pts)
    mx = sum(x for x, _ in pts) / n
    my = sum(y for _, y in pts) / n
    sxx = sum((x - mx) ** 2 for x, _ in pts)
    a = max(0.0, sum((x - mx) * (y - my) for x, y in pts) / sxx) if sxx else 0.0
    C = max(abs(v) / d ** a for d, v in eigs.values.items())
    return C, a


def standard_zeta_with_tail(eigs: EigenvalueSeries, s) -> tuple[complex, float]:
    s = complex(s)
    total = sum(complex(v) * cmath.exp(-s * math.log(d)) for d, v in eigs.values.items())
    C, a = _growth_fit(eigs)
    dm = eigs.d_max
    if s.real <= a + 1:
        raise DivergenceSuspected(f"Re(s) = {s.real} <= growth exponent + 1 = {a + 1:.3g}")
    tail = C * dm ** (a + 1 - s.real) / (s.real - a - 1)
    return total, tail


def standard_zeta(eigs: EigenvalueSeries, s) -> complex:
    return standard_zeta_with_tail(eigs, s)[0]


def reproducing_constant(l: int, s=0, reading: str = "stated") -> complex:
    """C(l, s).

    "stated": (-1)^{l/2} 2^{2-2s-l} pi Gamma(s+1)/Gamma(s+2).
    "classical": (-1)^{l/2} 2^{3-2s-l} pi Gamma(s+l-1)/Gamma(s+l); at s = 0 this is the
    value of the reproducing integral of the kernel summed over all of SL2(Z).
    """
    s = complex(s)
    sign = (-1) ** (l // 2)
    if reading == "stated":
        return sign * 2 ** (2 - 2 * s - l) * math.pi * complex(mpmath.gamma(s + 1) / mpmath.gamma(s + 2))
    if reading == "classical":
        return sign * 2 ** (3 - 2 * s - l) * math.pi * complex(mpmath.gamma(s + l - 1) / mpmath.gamma(s + l))
    raise ValueError("reading must be stated or classical")


def K_constant(l: int, s, fqm: FiniteQuadraticModule, reading: str = "stated") -> complex:
    """e(sig/8) |L'/L|^-1/2 (-1)^-s C(l, s), with (-1)^-s = e^{-i pi s}."""
    s = complex(s)
    pre = cmath.exp(2j * math.pi * fqm.signature_mod_8 / 8) / math.sqrt(fqm.order)
    return pre * cmath.exp(-1j * math.pi * s) * reproducing_constant(l, s, reading)


def completed_zeta(eigs: EigenvalueSeries, l: int, s, fqm: FiniteQuadraticModule,
                   reading: str = "stated") -> complex:
    """K(l, s) Z(w) with w = 2s + l ("stated") or w = 2s + 2l - 4 ("classical").

    The classical reading is the one matched by quadrature of the kernel integral at s = 0.
    """
    s = complex(s)
    w = 2 * s + l if reading == "stated" else 2 * s + 2 * l - 4
    return K_constant(l, s, fqm, reading) * standard_zeta(eigs, w)
