"""Discriminant forms of even lattices.

A module is described by cyclic generators g_1, ..., g_r of orders d_1 | ... | d_r
and the rational Gram matrix B with b(g_i, g_j) = B_ij mod 1 and
q(g_i) = B_ii / 2 mod 1.  Elements are residue tuples; their enumeration order is
lexicographic, which is also the index order of every Weil matrix.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from math import gcd
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_decomp

from .cyclotomic import CycloNum, e, lcm, normalize_conductor, root_of_unity, sqrt_of_integer
from .errors import DegenerateLattice, FormatError, OddDiagonal, OddRank, OrderTooLarge

DEFAULT_ENUMERATION_CAP = 10_000


@dataclass(frozen=True)
class EvenLattice:
    gram: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        g = tuple(tuple(int(v) for v in row) for row in self.gram)
        object.__setattr__(self, "gram", g)
        n = len(g)
        if any(len(row) != n for row in g):
            raise FormatError("Gram matrix is not square")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(n)):
            raise FormatError("Gram matrix is not symmetric")
        if n % 2:
            raise OddRank(f"rank {n} is odd")
        if any(g[i][i] % 2 for i in range(n)):
            raise OddDiagonal("diagonal entries must be even")
        if n and Matrix(g).det() == 0:
            raise DegenerateLattice("Gram matrix is singular")

    @property
    def rank(self) -> int:
        return len(self.gram)

    @cached_property
    def det(self) -> int:
        return int(Matrix(self.gram).det()) if self.gram else 1

    @cached_property
    def signature(self) -> int:
        """b+ - b- from the characteristic polynomial (Descartes' rule is exact here)."""
        if not self.gram:
            return 0
        coeffs = [int(c) for c in Matrix(self.gram).charpoly().all_coeffs()]
        pos = _sign_changes(coeffs)
        neg = _sign_changes([c * (-1) ** (len(coeffs) - 1 - i) for i, c in enumerate(coeffs)])
        return pos - neg

    def direct_sum(self, other: "EvenLattice") -> "EvenLattice":
        n, m = self.rank, other.rank
        rows = [list(r) + [0] * m for r in self.gram] + [[0] * n + list(r) for r in other.gram]
        return EvenLattice(tuple(tuple(r) for r in rows))


def _sign_changes(coeffs: Sequence[int]) -> int:
    signs = [c > 0 for c in coeffs if c != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def read_gram(path: str | Path) -> EvenLattice:
    """Gram file: first line n, then n rows of n integers."""
    tokens = Path(path).read_text().split()
    if not tokens:
        raise FormatError(f"{path}: empty Gram file")
    try:
        n = int(tokens[0])
        vals = [int(t) for t in tokens[1:]]
    except ValueError as exc:
        raise FormatError(f"{path}: non-integer token") from exc
    if len(vals) != n * n:
        raise FormatError(f"{path}: expected {n * n} entries, found {len(vals)}")
    return EvenLattice(tuple(tuple(vals[i * n:(i + 1) * n]) for i in range(n)))


def write_gram(lattice: EvenLattice, path: str | Path) -> None:
    lines = [str(lattice.rank)] + [" ".join(str(v) for v in row) for row in lattice.gram]
    Path(path).write_text("\n".join(lines) + "\n")


# standard lattices used throughout the tests and the command line
A2 = EvenLattice(((2, 1), (1, 2)))
A2_A2 = A2.direct_sum(A2)
D2_DIAG = EvenLattice(((2, 0), (0, 2)))
HYPERBOLIC = EvenLattice(((0, 1), (1, 0)))
E8 = EvenLattice((
    (2, -1, 0, 0, 0, 0, 0, 0),
    (-1, 2, -1, 0, 0, 0, 0, 0),
    (0, -1, 2, -1, 0, 0, 0, -1),
    (0, 0, -1, 2, -1, 0, 0, 0),
    (0, 0, 0, -1, 2, -1, 0, 0),
    (0, 0, 0, 0, -1, 2, -1, 0),
    (0, 0, 0, 0, 0, -1, 2, 0),
    (0, 0, -1, 0, 0, 0, 0, 2),
))


@dataclass(frozen=True, eq=False)
class FiniteQuadraticModule:
    elementary_divisors: tuple[int, ...]
    q_matrix: tuple[tuple[Fraction, ...], ...]
    signature_mod_8: int
    rank: int = 0
    gram_det: int = 1
    cap: int = DEFAULT_ENUMERATION_CAP
    _elements: list = field(default=None, repr=False, compare=False)

    # -- basic invariants ------------------------------------------------
    @cached_property
    def order(self) -> int:
        return reduce(lambda a, b: a * b, self.elementary_divisors, 1)

    @cached_property
    def level(self) -> int:
        r = len(self.elementary_divisors)
        vals = [self.q_matrix[i][i] / 2 for i in range(r)]
        vals += [self.q_matrix[i][j] for i in range(r) for j in range(i + 1, r)]
        return reduce(lcm, (Fraction(v).denominator for v in vals), 1)

    @cached_property
    def conductor(self) -> int:
        """A cyclotomic conductor containing every Weil matrix entry of the module."""
        sig_cond = 8 // gcd(self.signature_mod_8, 8)
        m = lcm(lcm(self.level, sig_cond), sqrt_of_integer(self.order).conductor)
        return normalize_conductor(m)

    # -- elements --------------------------------------------------------
    def elements(self) -> list[tuple[int, ...]]:
        self._check_cap()
        if self._elements is None:
            els = list(itertools.product(*(range(d) for d in self.elementary_divisors)))
            object.__setattr__(self, "_elements", els)
        return self._elements

    def _check_cap(self) -> None:
        if self.order > self.cap:
            raise OrderTooLarge(f"|L'/L| = {self.order} exceeds enumeration cap {self.cap}")

    def index(self, x: Sequence[int]) -> int:
        idx = 0
        for xi, d in zip(x, self.elementary_divisors):
            idx = idx * d + (xi % d)
        return idx

    @cached_property
    def _coords(self) -> np.ndarray:
        """Residue tuples as an (order, r) integer array."""
        els = self.elements()
        r = len(self.elementary_divisors)
        return np.array(els, dtype=np.int64).reshape(len(els), r)

    @cached_property
    def _bilinear_int(self) -> np.ndarray:
        n = self.level
        r = len(self.elementary_divisors)
        return np.array([[int(self.q_matrix[i][j] * n) for j in range(r)] for i in range(r)],
                        dtype=np.int64).reshape(r, r)

    @cached_property
    def q_values(self) -> np.ndarray:
        """N q(lambda) mod N for every element, N the level."""
        n = self.level
        return np.array([int(self.q(x) * n) for x in self.elements()], dtype=np.int64)

    def q(self, x: Sequence[int]) -> Fraction:
        """q(x) in [0, 1)."""
        r = len(self.elementary_divisors)
        total = Fraction(0)
        for i in range(r):
            total += self.q_matrix[i][i] / 2 * x[i] * x[i]
            for j in range(i + 1, r):
                total += self.q_matrix[i][j] * x[i] * x[j]
        return total - (total.numerator // total.denominator)

    def b(self, x: Sequence[int], y: Sequence[int]) -> Fraction:
        """Bilinear form (x, y) in [0, 1)."""
        r = len(self.elementary_divisors)
        total = sum((self.q_matrix[i][j] * x[i] * y[j] for i in range(r) for j in range(r)),
                    Fraction(0))
        return total - (total.numerator // total.denominator)

    @cached_property
    def b_values(self) -> np.ndarray:
        """N (x, y) mod N as an (order, order) array."""
        x = self._coords
        prod = (x @ self._bilinear_int @ x.T) % self.level
        return prod.astype(np.int64)

    def scale_map(self, d: int) -> np.ndarray:
        """Index array of lambda -> d lambda."""
        x = self._coords
        divs = np.array(self.elementary_divisors, dtype=np.int64)
        y = (x * d) % divs if len(divs) else x
        return self._indices_of(y)

    def _indices_of(self, y: np.ndarray) -> np.ndarray:
        idx = np.zeros(len(y), dtype=np.int64)
        for i, d in enumerate(self.elementary_divisors):
            idx = idx * d + (y[:, i] % d)
        return idx

    def add_table(self) -> np.ndarray:
        x = self._coords
        divs = np.array(self.elementary_divisors, dtype=np.int64)
        out = np.zeros((len(x), len(x)), dtype=np.int64)
        for i in range(len(x)):
            out[i] = self._indices_of((x[i] + x) % divs if len(divs) else x)
        return out

    def neg_map(self) -> np.ndarray:
        return self.scale_map(-1)

    # -- Gauss sums ------------------------------------------------------
    def gauss_sum(self, d: int = 1) -> CycloNum:
        n = self.level
        counts = np.bincount((self.q_values * d) % n, minlength=n)
        total = CycloNum.zero()
        for k, c in enumerate(counts):
            if c:
                total = total + CycloNum.rational(int(c)) * root_of_unity(k, n)
        return total

    def milgram_rhs(self) -> CycloNum:
        return sqrt_of_integer(self.order) * e(Fraction(self.signature_mod_8, 8))

    def is_anisotropic(self) -> bool:
        return int(np.count_nonzero(self.q_values == 0)) == 1

    def p_component(self, p: int) -> "FiniteQuadraticModule":
        divs, scales = [], []
        for d in self.elementary_divisors:
            pp = 1
            while d % (pp * p) == 0:
                pp *= p
            divs.append(pp)
            scales.append(d // pp)
        keep = [i for i, d in enumerate(divs) if d > 1]
        gram = tuple(tuple(self.q_matrix[i][j] * scales[i] * scales[j] for j in keep) for i in keep)
        sub = FiniteQuadraticModule(tuple(divs[i] for i in keep), gram, 0, self.rank, self.gram_det,
                                    self.cap)
        object.__setattr__(sub, "signature_mod_8", signature_from_gauss_sum(sub))
        return sub

    def describe(self) -> str:
        divs = ",".join(str(d) for d in self.elementary_divisors) or "1"
        return f"divisors=({divs}) order={self.order} level={self.level} sig={self.signature_mod_8}"


def signature_from_gauss_sum(fqm: FiniteQuadraticModule) -> int:
    """sig mod 8 read off from the argument of g(L) (Milgram)."""
    g = fqm.gauss_sum(1)
    root = sqrt_of_integer(fqm.order)
    for s in range(8):
        if g == root * e(Fraction(s, 8)):
            return s
    raise ValueError("Gauss sum is not sqrt|D| times an 8th root of unity")


def discriminant_form(lattice: EvenLattice, cap: int = DEFAULT_ENUMERATION_CAP) -> FiniteQuadraticModule:
    """Finite quadratic module L'/L of an even lattice, generators from Smith normal form."""
    m = lattice.rank
    if m == 0:
        return FiniteQuadraticModule((), (), 0, 0, 1, cap)
    gram = Matrix(lattice.gram)
    snf, _u, v = smith_normal_decomp(gram, domain=ZZ)
    diag = [abs(int(snf[i, i])) for i in range(m)]
    gens = v * Matrix.diag(*[Fraction(1, d) for d in diag])
    b = gens.T * gram * gens
    keep = [i for i, d in enumerate(diag) if d >= 2]
    q_matrix = tuple(tuple(Fraction(int(b[i, j].p), int(b[i, j].q)) for j in keep) for i in keep)
    return FiniteQuadraticModule(tuple(diag[i] for i in keep), q_matrix, lattice.signature % 8,
                                 m, lattice.det, cap)


def gauss_sum(fqm: FiniteQuadraticModule, d: int = 1) -> CycloNum:
    return fqm.gauss_sum(d)


def is_anisotropic(fqm: FiniteQuadraticModule) -> bool:
    return fqm.is_anisotropic()


def p_component(fqm: FiniteQuadraticModule, p: int) -> FiniteQuadraticModule:
    return fqm.p_component(p)


def primes_dividing(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) for n > 0."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def iter_elements(fqm: FiniteQuadraticModule) -> Iterator[tuple[int, ...]]:
    return iter(fqm.elements())
