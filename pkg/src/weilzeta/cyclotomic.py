"""Exact arithmetic in cyclotomic fields Q(zeta_M).

Elements are stored as coefficient vectors with respect to the power basis
1, z, ..., z^(phi(M)-1) of Q(zeta_M), where z = exp(2 pi i / M).  Reduction
is modulo the M-th cyclotomic polynomial, which makes the representation
unique.  Every result is pushed down to the smallest cyclotomic field that
contains it, so equal numbers always carry equal conductors.

`CycloMatrix` is a dense matrix over one fixed field, packed as an integer
array of shape (phi(M), rows, cols) over a common denominator.  It is the
fast path used for Weil representation matrices.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .errors import NonCoprimeTwist

_INT64_SAFE = 1 << 62
_FLOAT_EXACT = 1 << 52


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def exponent_field(modulus: int) -> tuple[int, int]:
    """(m, f) with m a normalized conductor and e(k/modulus) = z_m^(k f)."""
    if modulus % 4 == 2:
        return 2 * modulus, 2
    return modulus, 1


def normalize_conductor(m: int) -> int:
    """Smallest m' with Q(zeta_m') = Q(zeta_m)."""
    if m % 4 == 2:
        m //= 2
    return m


@lru_cache(maxsize=None)
def divisors(n: int) -> tuple[int, ...]:
    small = [d for d in range(1, int(n ** 0.5) + 1) if n % d == 0]
    return tuple(sorted(set(small + [n // d for d in small])))


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _poly_divexact(num: list[int], den: Sequence[int]) -> list[int]:
    # num, den: coefficients from low to high degree, den monic
    num = list(num)
    dq = len(den) - 1
    out = [0] * (len(num) - dq)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + dq]
        out[i] = c
        if c:
            for j, dc in enumerate(den):
                num[i + j] -= c * dc
    assert not any(num), "inexact polynomial division"
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Coefficients of Phi_m, lowest degree first."""
    num = [-1] + [0] * (m - 1) + [1]
    for d in divisors(m)[:-1]:
        num = _poly_divexact(num, cyclotomic_polynomial(d))
    return tuple(num)


@lru_cache(maxsize=None)
def power_table(m: int) -> np.ndarray:
    """Row j holds the reduction of z^j, 0 <= j < m, in the power basis."""
    phi = euler_phi(m)
    poly = cyclotomic_polynomial(m)
    table = np.zeros((m, phi), dtype=np.int64)
    vec = [0] * phi
    vec[0] = 1
    for j in range(m):
        table[j] = vec
        lead = vec[-1]
        vec = [0] + vec[:-1]
        if lead:
            for i in range(phi):
                vec[i] -= lead * poly[i]
    table.setflags(write=False)
    return table


@lru_cache(maxsize=None)
def twist_matrix(m: int, d: int) -> np.ndarray:
    """Matrix of z -> z^d on the power basis (column j is the image of z^j)."""
    phi = euler_phi(m)
    table = power_table(m)
    mat = np.zeros((phi, phi), dtype=np.int64)
    for j in range(phi):
        mat[:, j] = table[(j * d) % m]
    mat.setflags(write=False)
    return mat


@lru_cache(maxsize=None)
def lift_matrix(m: int, big: int) -> np.ndarray:
    """Matrix embedding Q(zeta_m) into Q(zeta_big) on power bases."""
    step = big // m
    table = power_table(big)
    cols = [table[(j * step) % big] for j in range(euler_phi(m))]
    mat = np.array(cols, dtype=np.int64).T.copy()
    mat.setflags(write=False)
    return mat


def _as_fraction_list(values: Iterable) -> list[Fraction]:
    return [v if isinstance(v, Fraction) else Fraction(v) for v in values]


def _int_matvec(mat: np.ndarray, vec: Sequence[int]) -> list[int]:
    rows, cols = mat.shape
    out = []
    for i in range(rows):
        row = mat[i]
        acc = 0
        for j in range(cols):
            c = vec[j]
            if c:
                acc += int(row[j]) * c
        out.append(acc)
    return out


def _solve_fraction(mat: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Solve an overdetermined consistent system exactly; None if inconsistent."""
    rows, cols = len(mat), len(mat[0]) if mat else 0
    aug = [list(mat[i]) + [rhs[i]] for i in range(rows)]
    piv_cols = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if aug[i][c] != 0), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [v * inv for v in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
    if any(aug[i][cols] != 0 for i in range(r, rows)):
        return None
    sol = [Fraction(0)] * cols
    for i, c in enumerate(piv_cols):
        sol[c] = aug[i][cols]
    return sol


class CycloNum:
    """An exact element of Q(zeta_M) in canonical reduced form."""

    __slots__ = ("_m", "_num", "_den")

    def __init__(self, conductor: int, coeffs: Sequence, _canonical: bool = False):
        m = int(conductor)
        if m < 1:
            raise ValueError("conductor must be positive")
        if _canonical:
            num, den = coeffs
            self._m, self._num, self._den = m, tuple(num), den
            return
        fr = _as_fraction_list(coeffs)
        m0 = normalize_conductor(m)
        if m0 != m or len(fr) != euler_phi(m):
            # arbitrary exponent vector sum c_j z_m^j, reduce from scratch
            num, den = _reduce_exponents(m, dict(enumerate(fr)))
            m = m
        else:
            den = reduce(lcm, (f.denominator for f in fr), 1)
            num = [int(f * den) for f in fr]
        x = CycloNum._make(m, num, den)
        self._m, self._num, self._den = x._m, x._num, x._den

    @staticmethod
    def _make(m: int, num: Sequence[int], den: int, descend: bool = True) -> "CycloNum":
        m0 = normalize_conductor(m)
        if m0 != m:
            # Q(zeta_m) = Q(zeta_m0); re-express through the embedding
            num = _int_matvec(_embed_half(m), num)
            m = m0
        if not any(num):
            m, num, den = 1, [0], 1
        g = reduce(gcd, num, den)
        if den < 0:
            g = -g
        num = [c // g for c in num]
        den //= g
        obj = object.__new__(CycloNum)
        obj._m, obj._num, obj._den = m, tuple(num), den
        if descend:
            obj = obj._descend()
        return obj

    # -- basic accessors -------------------------------------------------
    @property
    def conductor(self) -> int:
        return self._m

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self._den) for c in self._num)

    @property
    def numerators(self) -> tuple[int, ...]:
        return self._num

    @property
    def denominator(self) -> int:
        return self._den

    @staticmethod
    def rational(q) -> "CycloNum":
        q = Fraction(q)
        return CycloNum._make(1, [q.numerator], q.denominator, descend=False)

    @staticmethod
    def zero() -> "CycloNum":
        return CycloNum.rational(0)

    @staticmethod
    def one() -> "CycloNum":
        return CycloNum.rational(1)

    def is_zero(self) -> bool:
        return not any(self._num)

    def is_rational(self) -> bool:
        return self._m == 1

    def to_rational(self) -> Fraction:
        if self._m != 1:
            raise ValueError("not a rational number")
        return Fraction(self._num[0], self._den)

    # -- field embeddings ------------------------------------------------
    def lift(self, big: int) -> "CycloNum":
        """Same number written over Q(zeta_big); big must be a multiple of the conductor."""
        big = normalize_conductor(big)
        if big % self._m:
            raise ValueError(f"conductor {self._m} does not divide {big}")
        if big == self._m:
            return self
        num = _int_matvec(lift_matrix(self._m, big), self._num)
        obj = object.__new__(CycloNum)
        obj._m, obj._num, obj._den = big, tuple(num), self._den
        return obj

    def lifted_numerators(self, big: int) -> tuple[int, ...]:
        return self.lift(big)._num

    def _descend(self) -> "CycloNum":
        m = self._m
        if m == 1:
            return self
        if not any(self._num[1:]):
            return CycloNum._make(1, [self._num[0]], self._den, descend=False)
        for sub in divisors(m)[1:-1]:
            if normalize_conductor(sub) != sub:
                continue
            if not self._fixed_by_subgroup(sub):
                continue
            coeffs = _descend_coeffs(m, sub, self._num)
            if coeffs is not None:
                return CycloNum._make(sub, coeffs[0], coeffs[1] * self._den, descend=False)
        return self

    def _fixed_by_subgroup(self, sub: int) -> bool:
        m = self._m
        for a in _subgroup_generators(m, sub):
            if _int_matvec(twist_matrix(m, a), self._num) != list(self._num):
                return False
        return True

    # -- arithmetic ------------------------------------------------------
    @staticmethod
    def _coerce(x) -> "CycloNum":
        if isinstance(x, CycloNum):
            return x
        if isinstance(x, (int, Fraction)):
            return CycloNum.rational(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to CycloNum")

    def _common(self, other: "CycloNum") -> tuple[int, "CycloNum", "CycloNum"]:
        m = lcm(self._m, other._m)
        m = normalize_conductor(m)
        return m, self.lift(m), other.lift(m)

    def __add__(self, other) -> "CycloNum":
        try:
            other = CycloNum._coerce(other)
        except TypeError:
            return NotImplemented
        m, a, b = self._common(other)
        den = lcm(a._den, b._den)
        fa, fb = den // a._den, den // b._den
        num = [x * fa + y * fb for x, y in zip(a._num, b._num)]
        return CycloNum._make(m, num, den)

    __radd__ = __add__

    def __neg__(self) -> "CycloNum":
        return CycloNum._make(self._m, [-c for c in self._num], self._den, descend=False)

    def __sub__(self, other) -> "CycloNum":
        try:
            other = CycloNum._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "CycloNum":
        return CycloNum._coerce(other) - self

    def __mul__(self, other) -> "CycloNum":
        try:
            other = CycloNum._coerce(other)
        except TypeError:
            return NotImplemented
        if other._m == 1:
            q = Fraction(other._num[0], other._den)
            return CycloNum._make(self._m, [c * q.numerator for c in self._num],
                                  self._den * q.denominator, descend=False)
        if self._m == 1:
            return other * self
        m, a, b = self._common(other)
        phi = len(a._num)
        prod = [0] * (2 * phi - 1)
        for i, x in enumerate(a._num):
            if x:
                for j, y in enumerate(b._num):
                    if y:
                        prod[i + j] += x * y
        table = power_table(m)
        num = [0] * phi
        for t, c in enumerate(prod):
            if c:
                row = table[t % m]
                for s in range(phi):
                    if row[s]:
                        num[s] += c * int(row[s])
        return CycloNum._make(m, num, a._den * b._den)

    __rmul__ = __mul__

    def galois(self, d: int) -> "CycloNum":
        m = self._m
        if gcd(d, m) != 1:
            raise NonCoprimeTwist(f"gcd({d}, {m}) != 1")
        num = _int_matvec(twist_matrix(m, d % m), self._num)
        return CycloNum._make(m, num, self._den, descend=False)

    def conjugate(self) -> "CycloNum":
        return self.galois(-1)

    def norm(self) -> Fraction:
        """Field norm from Q(zeta_M) down to Q."""
        m = self._m
        acc = CycloNum.one()
        for a in range(1, m + 1):
            if gcd(a, m) == 1:
                acc = acc * self.galois(a)
        return acc.to_rational()

    def inverse(self) -> "CycloNum":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        m = self._m
        if m == 1:
            return CycloNum.rational(1 / Fraction(self._num[0], self._den))
        acc = CycloNum.one()
        for a in range(2, m + 1):
            if gcd(a, m) == 1:
                acc = acc * self.galois(a)
        n = (acc * self).to_rational()
        return acc * CycloNum.rational(1 / n)

    def __truediv__(self, other) -> "CycloNum":
        try:
            other = CycloNum._coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> "CycloNum":
        return CycloNum._coerce(other) * self.inverse()

    def __pow__(self, k: int) -> "CycloNum":
        if k < 0:
            return self.inverse() ** (-k)
        result, base = CycloNum.one(), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        try:
            other = CycloNum._coerce(other)
        except TypeError:
            return NotImplemented
        return (self._m, self._num, self._den) == (other._m, other._num, other._den)

    def __hash__(self) -> int:
        return hash((self._m, self._num, self._den))

    def __complex__(self) -> complex:
        return complex(to_complex(self, 53))

    def __repr__(self) -> str:
        return f"CycloNum({self._m}, {[str(c) for c in self.coeffs]})"

    def __str__(self) -> str:
        return format_cyclo(self)


@lru_cache(maxsize=None)
def _embed_half(m: int) -> np.ndarray:
    # m = 2 mod 4: express z_m^j (j < phi(m)) over Q(zeta_{m/2})
    h = m // 2
    base = (h + 1) // 2  # z_m = -z_h^base
    table = power_table(h)
    phi = euler_phi(m)
    cols = []
    for j in range(phi):
        sign = -1 if j % 2 else 1
        cols.append(sign * table[(j * base) % h])
    return np.array(cols, dtype=np.int64).T.copy()


def _reduce_exponents(m: int, terms: dict[int, Fraction]) -> tuple[list[int], int]:
    den = reduce(lcm, (Fraction(c).denominator for c in terms.values()), 1)
    table = power_table(m)
    num = [0] * euler_phi(m)
    for j, c in terms.items():
        ci = int(Fraction(c) * den)
        if ci:
            row = table[j % m]
            for s in range(len(num)):
                num[s] += ci * int(row[s])
    return num, den


@lru_cache(maxsize=None)
def _subgroup_generators(m: int, sub: int) -> tuple[int, ...]:
    # elements of (Z/m)^* congruent to 1 mod sub; all of them are few enough
    return tuple(a for a in range(1, m) if gcd(a, m) == 1 and a % sub == 1 % sub and a != 1)


@lru_cache(maxsize=None)
def _descent_system(m: int, sub: int):
    mat = lift_matrix(sub, m)
    return [[Fraction(int(v)) for v in row] for row in mat]


def _descend_coeffs(m: int, sub: int, num: Sequence[int]):
    sol = _solve_fraction(_descent_system(m, sub), [Fraction(c) for c in num])
    if sol is None:
        return None
    den = reduce(lcm, (f.denominator for f in sol), 1)
    return [int(f * den) for f in sol], den


def root_of_unity(a: int, b: int) -> CycloNum:
    """e(a/b) as an exact cyclotomic number."""
    if b < 1:
        raise ValueError("b must be positive")
    g = gcd(a, b)
    a, b = (a // g) % (b // g), b // g
    if b == 1:
        return CycloNum.one()
    sign = 1
    if b % 4 == 2:
        h = b // 2
        sign = -1 if a % 2 else 1
        a, b = (a * ((h + 1) // 2)) % h, h
        if b == 1:
            return CycloNum.rational(sign)
    num, den = _reduce_exponents(b, {a: Fraction(sign)})
    return CycloNum._make(b, num, den, descend=False)


def e(x: Fraction | int) -> CycloNum:
    """Shorthand for root_of_unity on a rational exponent."""
    x = Fraction(x)
    return root_of_unity(x.numerator, x.denominator)


def galois_twist(x: CycloNum, d: int) -> CycloNum:
    """Apply zeta_M -> zeta_M^d."""
    return x.galois(d)


def to_complex(x: CycloNum, precision: int = 53):
    """Complex embedding zeta_M -> exp(2 pi i / M) with `precision` bits.

    Returns a Python complex for precision <= 53 and an mpmath mpc otherwise.
    """
    if precision < 32:
        raise ValueError("precision must be at least 32 bits")
    with mpmath.workprec(precision + 16):
        m = x.conductor
        acc = mpmath.mpc(0)
        for j, c in enumerate(x.numerators):
            if c:
                acc += c * mpmath.expjpi(mpmath.mpf(2 * j) / m)
        acc /= x.denominator
    if precision <= 53:
        return complex(acc)
    with mpmath.workprec(precision):
        return +acc


def _factor_small(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _legendre(a: int, p: int) -> int:
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


@lru_cache(maxsize=None)
def sqrt_of_integer(n: int) -> CycloNum:
    """Positive square root of n >= 0 inside a cyclotomic field.

    For an odd prime p the quadratic Gauss sum G_p equals sqrt(p) or
    i sqrt(p) according to p mod 4; sqrt(2) = z_8 + z_8^-1.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return CycloNum.zero()
    result = CycloNum.one()
    for p, k in _factor_small(n).items():
        result = result * CycloNum.rational(p ** (k // 2))
        if k % 2 == 0:
            continue
        if p == 2:
            root = root_of_unity(1, 8) + root_of_unity(-1, 8)
        else:
            gauss = CycloNum.zero()
            for x in range(1, p):
                gauss = gauss + CycloNum.rational(_legendre(x, p)) * root_of_unity(x, p)
            root = gauss if p % 4 == 1 else gauss * root_of_unity(-1, 4)
        result = result * root
    return result


def sqrt_conductor(n: int) -> int:
    return sqrt_of_integer(n).conductor


def format_cyclo(x: CycloNum) -> str:
    """Stable text form: sum of c*z^j terms over the stated conductor."""
    if x.is_zero():
        return "0"
    if x.conductor == 1:
        return str(x.to_rational())
    terms = []
    for j, c in enumerate(x.coeffs):
        if c:
            terms.append(f"{c}*z{x.conductor}^{j}" if j else f"{c}")
    return " + ".join(terms)


class CycloMatrix:
    """Dense matrix over Q(zeta_M) with a fixed conductor.

    Entry (r, c) equals sum_j num[j, r, c] z^j / den.
    """

    __slots__ = ("conductor", "num", "den")

    def __init__(self, conductor: int, num: np.ndarray, den: int = 1, normalize: bool = True):
        self.conductor = normalize_conductor(conductor)
        if num.ndim != 3 or num.shape[0] != euler_phi(self.conductor):
            raise ValueError("packed array has wrong leading dimension")
        self.num = num
        self.den = int(den)
        if normalize:
            self._normalize()

    # -- construction ----------------------------------------------------
    @classmethod
    def identity(cls, size: int, conductor: int) -> "CycloMatrix":
        num = np.zeros((euler_phi(normalize_conductor(conductor)), size, size), dtype=np.int64)
        num[0] = np.eye(size, dtype=np.int64)
        return cls(conductor, num, 1, normalize=False)

    @classmethod
    def from_entries(cls, rows: Sequence[Sequence], conductor: int) -> "CycloMatrix":
        conductor = normalize_conductor(conductor)
        r, c = len(rows), len(rows[0]) if rows else 0
        phi = euler_phi(conductor)
        lifted = [[CycloNum._coerce(v).lift(conductor) for v in row] for row in rows]
        den = reduce(lcm, (v.denominator for row in lifted for v in row), 1)
        big = any(abs(x) * (den // v.denominator) >= _INT64_SAFE
                  for row in lifted for v in row for x in v.numerators)
        num = np.zeros((phi, r, c), dtype=object if big else np.int64)
        for i, row in enumerate(lifted):
            for j, v in enumerate(row):
                f = den // v.denominator
                for k, x in enumerate(v.numerators):
                    if x:
                        num[k, i, j] = x * f
        return cls(conductor, num, den)

    @classmethod
    def from_exponents(cls, exps: np.ndarray, modulus: int, mask: np.ndarray | None = None
                       ) -> "CycloMatrix":
        """Matrix with entries e(exps[r, c] / modulus), optionally zeroed outside mask."""
        m, f = exponent_field(modulus)
        table = power_table(m)
        exps = (np.asarray(exps, dtype=np.int64) * f) % m
        num = np.moveaxis(table[exps], -1, 0).astype(np.int64)
        if mask is not None:
            num = num * mask[None, :, :]
        return cls(m, np.ascontiguousarray(num), 1, normalize=False)

    @classmethod
    def from_exponent_counts(cls, counts: np.ndarray, modulus: int, den: int = 1) -> "CycloMatrix":
        """Entries sum_k counts[r, c, k] e(k / modulus) / den."""
        m, f = exponent_field(modulus)
        table = power_table(m)[(np.arange(modulus) * f) % m]
        num = np.tensordot(table.T, np.moveaxis(counts, 2, 0), axes=([1], [0]))
        return cls(m, num, den)

    @classmethod
    def diagonal_exponents(cls, exps: np.ndarray, modulus: int) -> "CycloMatrix":
        m, f = exponent_field(modulus)
        table = power_table(m)
        size = len(exps)
        num = np.zeros((table.shape[1], size, size), dtype=np.int64)
        idx = np.arange(size)
        num[:, idx, idx] = table[(np.asarray(exps, dtype=np.int64) * f) % m].T
        return cls(m, num, 1, normalize=False)

    # -- shape helpers ---------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.num.shape[1], self.num.shape[2]

    @property
    def phi(self) -> int:
        return self.num.shape[0]

    def _normalize(self) -> None:
        num = self.num
        if self.den < 0:
            num = -num
            self.den = -self.den
        if num.dtype == object:
            g = self.den
            for v in num.flat:
                if v:
                    g = gcd(g, int(v))
                    if g == 1:
                        break
            if g > 1:
                num = num // g
                self.den //= g
            if num.size == 0 or max(abs(int(v)) for v in num.flat) < _INT64_SAFE:
                num = num.astype(np.int64)
        else:
            g = int(np.gcd.reduce(num, axis=None)) if num.size else 0
            g = gcd(g, self.den)
            if g > 1:
                num = num // g
                self.den //= g
        self.num = num

    def lift(self, big: int) -> "CycloMatrix":
        big = normalize_conductor(big)
        if big == self.conductor:
            return self
        if big % self.conductor:
            raise ValueError("conductor does not divide target")
        mat = lift_matrix(self.conductor, big)
        num = np.tensordot(mat.astype(self.num.dtype), self.num, axes=([1], [0]))
        return CycloMatrix(big, num, self.den, normalize=False)

    def _common(self, other: "CycloMatrix") -> tuple["CycloMatrix", "CycloMatrix"]:
        if self.conductor == other.conductor:
            return self, other
        m = normalize_conductor(lcm(self.conductor, other.conductor))
        return self.lift(m), other.lift(m)

    # -- algebra ---------------------------------------------------------
    def __matmul__(self, other: "CycloMatrix") -> "CycloMatrix":
        a, b = self._common(other)
        m, phi = a.conductor, a.phi
        if a.shape[1] != b.shape[0]:
            raise ValueError("shape mismatch")
        ma = _maxabs(a.num)
        mb = _maxabs(b.num)
        table = power_table(m)[np.arange(2 * phi - 1) % m]
        bound = ma * mb * a.shape[1] * phi * max(1, int(np.abs(table).max())) * (2 * phi)
        dtype = np.int64 if bound < _INT64_SAFE else object
        if bound < _FLOAT_EXACT:
            # BLAS on doubles is exact while every partial sum stays below 2^53
            an = a.num.astype(np.float64)
            bn = b.num.astype(np.float64)
            prod_dtype = np.float64
        else:
            an = a.num.astype(dtype)
            bn = b.num.astype(dtype)
            prod_dtype = dtype
        prod = np.zeros((2 * phi - 1, a.shape[0], b.shape[1]), dtype=prod_dtype)
        for i in range(phi):
            ai = an[i]
            if not ai.any():
                continue
            for j in range(phi):
                bj = bn[j]
                if bj.any():
                    prod[i + j] += ai @ bj
        if prod_dtype is np.float64:
            prod = prod.astype(np.int64)
        num = np.tensordot(table.T.astype(dtype), prod, axes=([1], [0]))
        return CycloMatrix(m, num, a.den * b.den)

    def __add__(self, other: "CycloMatrix") -> "CycloMatrix":
        a, b = self._common(other)
        den = lcm(a.den, b.den)
        fa, fb = den // a.den, den // b.den
        dtype = object if (_maxabs(a.num) * fa + _maxabs(b.num) * fb) >= _INT64_SAFE else np.int64
        num = a.num.astype(dtype) * fa + b.num.astype(dtype) * fb
        return CycloMatrix(a.conductor, num, den)

    def __neg__(self) -> "CycloMatrix":
        return CycloMatrix(self.conductor, -self.num, self.den, normalize=False)

    def __sub__(self, other: "CycloMatrix") -> "CycloMatrix":
        return self + (-other)

    def scale(self, x) -> "CycloMatrix":
        """Multiply every entry by the scalar x."""
        x = CycloNum._coerce(x)
        m = normalize_conductor(lcm(self.conductor, x.conductor))
        scalar = CycloMatrix.from_entries([[x]], m)
        a = self.lift(m)
        # multiplication by a scalar acts on the coefficient axis only
        phi = a.phi
        table = power_table(m)
        mult = np.zeros((phi, phi), dtype=object)
        for j in range(phi):
            col = [0] * phi
            for i, c in enumerate(scalar.num[:, 0, 0]):
                c = int(c)
                if c:
                    row = table[(i + j) % m]
                    for s in range(phi):
                        col[s] += c * int(row[s])
            mult[:, j] = col
        big = _maxabs(a.num) * max(1, max(abs(int(v)) for v in mult.flat)) * phi
        dtype = np.int64 if big < _INT64_SAFE else object
        num = np.tensordot(mult.astype(dtype), a.num.astype(dtype), axes=([1], [0]))
        return CycloMatrix(m, num, a.den * scalar.den)

    def galois(self, d: int) -> "CycloMatrix":
        m = self.conductor
        if gcd(d, m) != 1:
            raise NonCoprimeTwist(f"gcd({d}, {m}) != 1")
        tw = twist_matrix(m, d % m)
        dtype = self.num.dtype
        num = np.tensordot(tw.astype(dtype), self.num, axes=([1], [0]))
        return CycloMatrix(m, num, self.den, normalize=False)

    def conjugate(self) -> "CycloMatrix":
        return self.galois(-1)

    @property
    def T(self) -> "CycloMatrix":
        return CycloMatrix(self.conductor, np.ascontiguousarray(self.num.transpose(0, 2, 1)),
                           self.den, normalize=False)

    def adjoint(self) -> "CycloMatrix":
        return self.conjugate().T

    def kron(self, other: "CycloMatrix") -> "CycloMatrix":
        a, b = self._common(other)
        m, phi = a.conductor, a.phi
        table = power_table(m)
        r = a.shape[0] * b.shape[0]
        c = a.shape[1] * b.shape[1]
        bound = _maxabs(a.num) * _maxabs(b.num) * phi * phi * max(1, int(np.abs(table).max()))
        dtype = np.int64 if bound < _INT64_SAFE else object
        num = np.zeros((phi, r, c), dtype=dtype)
        for i in range(phi):
            if not a.num[i].any():
                continue
            for j in range(phi):
                if not b.num[j].any():
                    continue
                block = np.kron(a.num[i].astype(dtype), b.num[j].astype(dtype))
                row = table[(i + j) % m]
                for s in range(phi):
                    if row[s]:
                        num[s] += int(row[s]) * block
        return CycloMatrix(m, num, a.den * b.den)

    def permute_rows(self, perm: Sequence[int]) -> "CycloMatrix":
        """Row i of the result is row perm[i] of self."""
        return CycloMatrix(self.conductor, self.num[:, list(perm), :], self.den, normalize=False)

    def permute_cols(self, perm: Sequence[int]) -> "CycloMatrix":
        return CycloMatrix(self.conductor, self.num[:, :, list(perm)], self.den, normalize=False)

    def column(self, j: int) -> "CycloMatrix":
        return CycloMatrix(self.conductor, self.num[:, :, j:j + 1].copy(), self.den)

    # -- inspection ------------------------------------------------------
    def entry(self, i: int, j: int) -> CycloNum:
        coeffs = [Fraction(int(v), self.den) for v in self.num[:, i, j]]
        return CycloNum(self.conductor, coeffs)

    def entries(self) -> list[list[CycloNum]]:
        r, c = self.shape
        return [[self.entry(i, j) for j in range(c)] for i in range(r)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, CycloMatrix):
            return NotImplemented
        a, b = self._common(other)
        if a.shape != b.shape or a.den != b.den:
            return False
        return bool(np.array_equal(a.num.astype(object), b.num.astype(object)))

    def __hash__(self):
        return hash((self.conductor, self.den, self.num.tobytes()))

    def is_identity(self) -> bool:
        r, c = self.shape
        return r == c and self == CycloMatrix.identity(r, self.conductor)

    def is_zero(self) -> bool:
        return not self.num.any()

    def to_complex(self) -> np.ndarray:
        m, phi = self.conductor, self.phi
        powers = np.exp(2j * np.pi * np.arange(phi) / m)
        if self.num.dtype == object:
            out = np.zeros(self.shape, dtype=complex)
            for j in range(phi):
                out += np.array([[Fraction(int(v), self.den) for v in row] for row in self.num[j]],
                                dtype=float) * powers[j]
            return out
        return np.tensordot(powers, self.num.astype(float), axes=([0], [0])) / self.den

    def __repr__(self) -> str:
        return f"CycloMatrix(conductor={self.conductor}, shape={self.shape}, den={self.den})"


def _maxabs(arr: np.ndarray) -> int:
    if arr.size == 0:
        return 0
    if arr.dtype == object:
        return max(abs(int(v)) for v in arr.flat)
    return int(np.abs(arr).max())
