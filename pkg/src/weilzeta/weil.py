"""Exact Weil representation matrices in genus 1 and 2.

Words are sequences of letters S, S^-1, T(b) and m(a).  Matrices act on column
vectors indexed by (L'/L)^n in lexicographic order, so in genus 2 the index of
(l1, l2) is idx(l1) * |D| + idx(l2) and the tensor identification is the
Kronecker product.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .cyclotomic import CycloMatrix, CycloNum, e, sqrt_of_integer
from .discriminant import FiniteQuadraticModule
from .errors import NonUnimodular, WordSyntaxError

Mat = tuple[tuple[int, ...], ...]


# ---------------------------------------------------------------------------
# integer matrix helpers

def as_mat(m) -> Mat:
    if hasattr(m, "tolist"):
        m = m.tolist()
    return tuple(tuple(int(v) for v in row) for row in m)


def mat_mul(a: Mat, b: Mat) -> Mat:
    n, k, c = len(a), len(b), len(b[0])
    return tuple(tuple(sum(a[i][t] * b[t][j] for t in range(k)) for j in range(c)) for i in range(n))


def mat_id(n: int) -> Mat:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def mat_det(a: Mat) -> int:
    n = len(a)
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    return sum((-1) ** j * a[0][j] * mat_det(tuple(r[:j] + r[j + 1:] for r in a[1:]))
               for j in range(n))


def mat_inv_unimodular(a: Mat) -> Mat:
    """Inverse of an integer matrix with determinant +-1."""
    n = len(a)
    d = mat_det(a)
    if abs(d) != 1:
        raise NonUnimodular(f"determinant {d} is not +-1")
    if n == 1:
        return ((a[0][0],),)
    if n == 2:
        return ((a[1][1] * d, -a[0][1] * d), (-a[1][0] * d, a[0][0] * d))
    cof = [[(-1) ** (i + j) * mat_det(tuple(r[:j] + r[j + 1:] for k, r in enumerate(a) if k != i))
            for j in range(n)] for i in range(n)]
    return tuple(tuple(cof[j][i] * d for j in range(n)) for i in range(n))


def mat_transpose(a: Mat) -> Mat:
    return tuple(zip(*a)) if a else a


def mat_neg(a: Mat) -> Mat:
    return tuple(tuple(-v for v in row) for row in a)


def mat_mod(a: Mat, n: int) -> Mat:
    return tuple(tuple(v % n for v in row) for row in a)


def block(a: Mat, b: Mat, c: Mat, d: Mat) -> Mat:
    return tuple(tuple(ra) + tuple(rb) for ra, rb in zip(a, b)) + \
        tuple(tuple(rc) + tuple(rd) for rc, rd in zip(c, d))


def blocks(m: Mat) -> tuple[Mat, Mat, Mat, Mat]:
    n = len(m) // 2
    a = tuple(r[:n] for r in m[:n])
    b = tuple(r[n:] for r in m[:n])
    c = tuple(r[:n] for r in m[n:])
    d = tuple(r[n:] for r in m[n:])
    return a, b, c, d


def symplectic_j(n: int) -> Mat:
    z = tuple((0,) * n for _ in range(n))
    return block(z, mat_neg(mat_id(n)), mat_id(n), z)


def is_symplectic(m: Mat) -> bool:
    n = len(m) // 2
    j = symplectic_j(n)
    return mat_mul(mat_mul(mat_transpose(m), j), m) == j


def up(g: Mat) -> Mat:
    """gamma -> gamma^up acting on the first variable of diag(tau, zeta)."""
    (a, b), (c, d) = g
    return ((a, 0, b, 0), (0, 1, 0, 0), (c, 0, d, 0), (0, 0, 0, 1))


def down(g: Mat) -> Mat:
    (a, b), (c, d) = g
    return ((1, 0, 0, 0), (0, a, 0, b), (0, 0, 1, 0), (0, c, 0, d))


# ---------------------------------------------------------------------------
# letters and words

@dataclass(frozen=True)
class Letter:
    kind: str          # "S", "Sinv", "T" or "m"
    data: Mat = ()

    def matrix(self, n: int) -> Mat:
        one = mat_id(n)
        zero = tuple((0,) * n for _ in range(n))
        if self.kind == "S":
            return block(zero, mat_neg(one), one, zero)
        if self.kind == "Sinv":
            return block(zero, one, mat_neg(one), zero)
        if self.kind == "T":
            return block(one, self.data, zero, one)
        if self.kind == "m":
            a = self.data
            return block(a, zero, zero, mat_transpose(mat_inv_unimodular(a)))
        raise WordSyntaxError(f"unknown letter {self.kind}")

    def inverse(self) -> "Letter":
        if self.kind == "S":
            return Letter("Sinv")
        if self.kind == "Sinv":
            return Letter("S")
        if self.kind == "T":
            return Letter("T", mat_neg(self.data))
        return Letter("m", mat_inv_unimodular(self.data))

    def tilde(self) -> "Letter":
        if self.kind in ("S", "Sinv"):
            return self.inverse()
        if self.kind == "T":
            return Letter("T", mat_neg(self.data))
        return self

    def __str__(self) -> str:
        if self.kind in ("S", "Sinv"):
            return "S" if self.kind == "S" else "Sinv"
        body = "[" + ",".join("[" + ",".join(str(v) for v in r) + "]" for r in self.data) + "]"
        if self.kind == "T":
            return f"T(b={body})"
        return f"m(a={body})"


@dataclass(frozen=True)
class GroupWord:
    genus: int
    letters: tuple[Letter, ...] = ()

    def matrix(self) -> Mat:
        m = mat_id(2 * self.genus)
        for letter in self.letters:
            m = mat_mul(m, letter.matrix(self.genus))
        return m

    def inverse(self) -> "GroupWord":
        return GroupWord(self.genus, tuple(x.inverse() for x in reversed(self.letters)))

    def tilde(self) -> "GroupWord":
        return GroupWord(self.genus, tuple(x.tilde() for x in self.letters))

    def __mul__(self, other: "GroupWord") -> "GroupWord":
        if other.genus != self.genus:
            raise WordSyntaxError("genus mismatch")
        return GroupWord(self.genus, self.letters + other.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return ",".join(str(x) for x in self.letters)


def S(n: int = 1) -> GroupWord:
    return GroupWord(n, (Letter("S"),))


def Sinv(n: int = 1) -> GroupWord:
    return GroupWord(n, (Letter("Sinv"),))


def T(b=1, n: int = 1) -> GroupWord:
    if isinstance(b, int):
        b = ((b,),) if n == 1 else None
    b = as_mat(b)
    if len(b) != n or any(b[i][j] != b[j][i] for i in range(n) for j in range(n)):
        raise WordSyntaxError("T(b) needs a symmetric n x n integer matrix")
    return GroupWord(n, (Letter("T", b),))


def M(a, n: int = 1) -> GroupWord:
    if isinstance(a, int):
        a = ((a,),)
    a = as_mat(a)
    if abs(mat_det(a)) != 1:
        raise NonUnimodular(f"m(a) needs a unimodular a, got det {mat_det(a)}")
    return GroupWord(n, (Letter("m", a),))


def empty_word(n: int = 1) -> GroupWord:
    return GroupWord(n, ())


_TOKEN = re.compile(r"\s*(Sinv|S\^-1|S|T|m)\s*(\(\s*([ab])\s*=\s*([^()]*)\))?\s*(\^\s*(-?\d+))?\s*")


def parse_word(text: str, genus: int) -> GroupWord:
    """Parse "S,T(b=[[1,0],[0,0]]),Sinv,m(a=[[0,1],[1,0]]),T^3" style words."""
    letters: list[Letter] = []
    parts = [p for p in _split_top(text) if p.strip()]
    for part in parts:
        mt = _TOKEN.fullmatch(part)
        if not mt:
            raise WordSyntaxError(f"cannot parse letter {part!r}")
        name, arg, power = mt.group(1), mt.group(4), mt.group(6)
        k = int(power) if power is not None else 1
        if name in ("S", "Sinv", "S^-1"):
            w = S(genus) if name == "S" else Sinv(genus)
            if arg is not None:
                raise WordSyntaxError("S takes no argument")
        elif name == "T":
            val = _parse_matrix(arg, genus) if arg is not None else (((1,),) if genus == 1 else None)
            if val is None:
                raise WordSyntaxError("genus-2 T needs an explicit b")
            w = T(val, genus)
        else:
            if arg is None:
                raise WordSyntaxError("m needs an argument a")
            w = M(_parse_matrix(arg, genus), genus)
        if k < 0:
            w, k = w.inverse(), -k
        for _ in range(k):
            letters.extend(w.letters)
    return GroupWord(genus, tuple(letters))


def _split_top(text: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return out


def _parse_matrix(text: str, genus: int) -> Mat:
    text = text.strip()
    try:
        if text.lstrip("-").isdigit():
            return ((int(text),),)
        rows = re.findall(r"\[([^\[\]]*)\]", text)
        return tuple(tuple(int(v) for v in r.split(",")) for r in rows)
    except ValueError as exc:
        raise WordSyntaxError(f"bad matrix {text!r}") from exc


# ---------------------------------------------------------------------------
# SL2 and Sp4 decompositions

def sl2_word(g: Mat) -> GroupWord:
    """Word in S, T^k for g in SL2(Z) by the Euclidean algorithm on the bottom row."""
    g = as_mat(g)
    if mat_det(g) != 1:
        raise NonUnimodular(f"det {mat_det(g)} != 1")
    letters: list[Letter] = []
    (a, b), (c, d) = g
    while c != 0:
        q = _round_div(a, c)
        if q:
            letters.append(Letter("T", ((q,),)))
        a, b = a - q * c, b - q * d
        # (a b; c d) = S (c d; -a -b)
        letters.append(Letter("S"))
        a, b, c, d = c, d, -a, -b
    if a == 1:
        if b:
            letters.append(Letter("T", ((b,),)))
    else:
        # -(1 -b; 0 1) = S^2 T^-b
        letters.extend([Letter("S"), Letter("S")])
        if b:
            letters.append(Letter("T", ((-b,),)))
    word = GroupWord(1, tuple(letters))
    assert word.matrix() == g
    return word


def _round_div(a: int, c: int) -> int:
    q, r = divmod(a, c)
    if 2 * abs(r) > abs(c):
        q += 1 if (r > 0) == (c > 0) else 0
    return q


def embed_word(word: GroupWord, direction: str) -> GroupWord:
    """Genus-2 word for gamma^up or gamma^down from a genus-1 word.

    S^up = U2(b) T2(-b) U2(b) with U2(a) = S2 T2(-a) S2^-1 and b = diag(1, 0);
    T^up = T2(diag(1, 0)); analogous for down with diag(0, 1).
    """
    e_ = ((1, 0), (0, 0)) if direction == "up" else ((0, 0), (0, 1))
    if direction not in ("up", "down"):
        raise WordSyntaxError("direction must be up or down")

    def u2(a: Mat) -> list[Letter]:
        return [Letter("S"), Letter("T", mat_neg(a)), Letter("Sinv")]

    s_up = u2(e_) + [Letter("T", mat_neg(e_))] + u2(e_)
    out: list[Letter] = []
    for letter in word.letters:
        if letter.kind == "S":
            out.extend(s_up)
        elif letter.kind == "Sinv":
            out.extend(x.inverse() for x in reversed(s_up))
        elif letter.kind == "T":
            k = letter.data[0][0]
            out.append(Letter("T", tuple(tuple(k * v for v in r) for r in e_)))
        else:
            sgn = letter.data[0][0]
            if sgn == -1:
                out.extend(s_up + s_up)
    return GroupWord(2, tuple(out))


def sp4_word(m: Mat) -> GroupWord:
    """Word in S2, S2^-1, T2(b), m2(a) for an element of Sp(2, Z).

    Row reduction from the left: genus-1 Euclid moves on the row pairs (1, 3)
    and (2, 4), then m2(a) to normalize the first column, which forces the
    lower-left block to vanish; the rest is m2(A) T2(A^-1 B).
    """
    m = as_mat(m)
    if not is_symplectic(m):
        raise NonUnimodular("matrix is not symplectic")
    left: list[Mat] = []      # left multipliers L_k, applied in order

    def apply(lm: Mat) -> None:
        nonlocal m
        m = mat_mul(lm, m)
        left.append(lm)

    # first column: clear rows 3 and 4
    g = _euclid_sl2(m[0][0], m[2][0])
    apply(up(g))
    g = _euclid_sl2(m[1][0], m[3][0])
    apply(down(g))
    x1, x2 = m[0][0], m[1][0]
    a = _complete_gl2(x1, x2)          # a @ (x1, x2)^T = e1
    apply(Letter("m", a).matrix(2))
    if m[0][0] != 1:
        raise AssertionError("first column not normalized")
    # symplecticity forces row 3 = e3; clear row 4 of column 2 with a down move
    g = _euclid_sl2(m[1][1], m[3][1])
    apply(down(g))
    a_blk, b_blk, c_blk, _ = blocks(m)
    assert c_blk == ((0, 0), (0, 0)), "lower-left block did not vanish"
    x = mat_mul(mat_inv_unimodular(a_blk), b_blk)
    tail = GroupWord(2, (Letter("m", a_blk), Letter("T", x)))
    assert tail.matrix() == m
    word_letters: list[Letter] = []
    for lm in left:
        word_letters.extend(_sp4_simple_inverse_word(lm).letters)
    # left = [L1, ..., Lk]; original = L1^-1 ... Lk^-1 * tail
    word = GroupWord(2, tuple(word_letters)) * tail
    return word


def _sp4_simple_inverse_word(lm: Mat) -> GroupWord:
    inv = _sp4_inverse(lm)
    if inv[1] == (0, 1, 0, 0) and inv[3] == (0, 0, 0, 1) and inv[0][1] == inv[0][3] == 0 \
            and inv[2][1] == inv[2][3] == 0:
        g = ((inv[0][0], inv[0][2]), (inv[2][0], inv[2][2]))
        return embed_word(sl2_word(g), "up")
    if inv[0] == (1, 0, 0, 0) and inv[2] == (0, 0, 1, 0) and inv[1][0] == inv[1][2] == 0 \
            and inv[3][0] == inv[3][2] == 0:
        g = ((inv[1][1], inv[1][3]), (inv[3][1], inv[3][3]))
        return embed_word(sl2_word(g), "down")
    a, b, c, _ = blocks(inv)
    if b == ((0, 0), (0, 0)) and c == ((0, 0), (0, 0)):
        return GroupWord(2, (Letter("m", a),))
    raise AssertionError("unexpected left multiplier")


def _sp4_inverse(m: Mat) -> Mat:
    a, b, c, d = blocks(m)
    return block(mat_transpose(d), mat_neg(mat_transpose(b)), mat_neg(mat_transpose(c)),
                 mat_transpose(a))


def _euclid_sl2(x: int, y: int) -> Mat:
    """g in SL2(Z) with g (x, y)^T = (g', 0)^T."""
    g = mat_id(2)
    while y != 0:
        q = _round_div(x, y)
        step = ((0, 1), (-1, q))  # (x, y) -> (y, q y - x)
        g = mat_mul(step, g)
        x, y = y, q * y - x
    return g


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


def _complete_gl2(x1: int, x2: int) -> Mat:
    """a in GL2(Z) with a (x1, x2)^T = (1, 0)^T for a primitive pair."""
    g, u, v = _ext_gcd(x1, x2)
    if g != 1:
        raise ValueError("pair is not primitive")
    return ((u, v), (-x2, x1))


# ---------------------------------------------------------------------------
# exact matrices

class WeilRep:
    """Exact Weil representation of one module, with caches."""

    def __init__(self, fqm: FiniteQuadraticModule):
        self.fqm = fqm
        self.conductor = fqm.conductor
        self.size = fqm.order
        self._letter_cache: dict = {}
        self._rho1_cache: dict = {}
        self._col_cache: dict = {}

    # -- scalars -------------------------------------------------------
    def s_scalar(self, n: int) -> CycloNum:
        """e(-n sig/8) / |D|^(n/2)."""
        sig = self.fqm.signature_mod_8
        root = sqrt_of_integer(self.size) ** n
        return e(Fraction(-n * sig, 8)) / root

    def _n_q(self, n: int) -> np.ndarray:
        return self.fqm.q_values

    # -- generators ------------------------------------------------------
    def generator(self, n: int, letter: Letter) -> CycloMatrix:
        key = (n, letter)
        if key not in self._letter_cache:
            self._letter_cache[key] = self._generator(n, letter)
        return self._letter_cache[key]

    def _generator(self, n: int, letter: Letter) -> CycloMatrix:
        D, N = self.fqm, self.fqm.level
        size = self.size ** n
        qv = D.q_values
        bv = D.b_values
        if letter.kind == "T":
            b = letter.data
            if len(b) != n:
                raise WordSyntaxError("letter genus mismatch")
            if n == 1:
                exps = b[0][0] * qv
            else:
                q1 = np.repeat(qv, self.size)
                q2 = np.tile(qv, self.size)
                b12 = bv.reshape(-1)
                exps = b[0][0] * q1 + b[1][1] * q2 + b[0][1] * b12
            return CycloMatrix.diagonal_exponents(exps % N, N).lift(self.conductor)
        if letter.kind in ("S", "Sinv"):
            sign = -1 if letter.kind == "S" else 1
            if n == 1:
                pair = bv
            else:
                pair = (bv[:, None, :, None] + bv[None, :, None, :]).reshape(size, size)
            scal = self.s_scalar(n)
            if letter.kind == "Sinv":
                scal = scal.conjugate()
            mat = CycloMatrix.from_exponents((sign * pair) % N, N)
            return mat.lift(self.conductor).scale(scal).lift(self.conductor)
        if letter.kind == "m":
            a = letter.data
            det = mat_det(a)
            if abs(det) != 1:
                raise NonUnimodular(f"det {det}")
            ainv = mat_inv_unimodular(a)
            perm = self._lambda_times(ainv, n)
            chi = 1 if det == 1 else (-1) ** ((self.fqm.signature_mod_8 // 2) % 2)
            num = np.zeros((1, size, size), dtype=np.int64)
            num[0, perm, np.arange(size)] = chi
            mat = CycloMatrix(1, num, 1, normalize=False)
            return mat.lift(self.conductor)
        raise WordSyntaxError(f"unknown letter {letter.kind}")

    def _lambda_times(self, a: Mat, n: int) -> np.ndarray:
        """Index of lambda a for every index of lambda (lambda a row vector in (L'/L)^n)."""
        D = self.fqm
        coords = D._coords
        divs = np.array(D.elementary_divisors, dtype=np.int64)
        if n == 1:
            return D.scale_map(a[0][0])
        r = len(divs)
        if r == 0:
            return np.zeros(self.size ** 2, dtype=np.int64)
        l1 = np.repeat(coords, self.size, axis=0).reshape(-1, r)
        l2 = np.tile(coords, (self.size, 1)).reshape(-1, r)
        n1 = (l1 * a[0][0] + l2 * a[1][0])
        n2 = (l1 * a[0][1] + l2 * a[1][1])
        if r:
            n1, n2 = n1 % divs, n2 % divs
        return D._indices_of(n1) * self.size + D._indices_of(n2)

    # -- words -----------------------------------------------------------
    def identity(self, n: int) -> CycloMatrix:
        return CycloMatrix.identity(self.size ** n, self.conductor)

    def word(self, w: GroupWord) -> CycloMatrix:
        result = self.identity(w.genus)
        for letter in w.letters:
            result = result @ self.generator(w.genus, letter)
        return result

    def rho1(self, g: Mat) -> CycloMatrix:
        g = as_mat(g)
        if mat_det(g) != 1:
            raise NonUnimodular(f"det {mat_det(g)} != 1")
        key = mat_mod(g, self.fqm.level)
        if key not in self._rho1_cache:
            self._rho1_cache[key] = self.word(sl2_word(g))
        return self._rho1_cache[key]

    def rho1_inv(self, g: Mat) -> CycloMatrix:
        return self.rho1(g).adjoint()

    def rho2(self, m: Mat) -> CycloMatrix:
        return self.word(sp4_word(m))

    def rho2_inv_column(self, m: Mat, col: int = 0) -> np.ndarray:
        """Complex vector rho^-1(m) e_col for m in Sp(2, Z), cached modulo the level."""
        key = (mat_mod(as_mat(m), self.fqm.level), col)
        hit = self._col_cache.get(key)
        if hit is None:
            word = sp4_word(m).inverse()
            size = self.size ** 2
            num = np.zeros((1, size, 1), dtype=np.int64)
            num[0, col, 0] = 1
            vec = CycloMatrix(1, num, 1, normalize=False).lift(self.conductor)
            # rho(w1 ... wk) v = rho(w1)(...(rho(wk) v))
            for letter in reversed(word.letters):
                vec = self.generator(2, letter) @ vec
            hit = vec.to_complex()[:, 0]
            self._col_cache[key] = hit
        return hit

    # -- structured elements -------------------------------------------
    def embed(self, g: Mat, direction: str) -> CycloMatrix:
        r1 = self.rho1(g)
        eye = CycloMatrix.identity(self.size, self.conductor)
        return r1.kron(eye) if direction == "up" else eye.kron(r1)

    def u2_offdiag(self, d: int, inverse: bool = True) -> CycloMatrix:
        """rho^-1(U2([[0,d],[d,0]])) (inverse=True) or rho(U2(...)) from the closed form.

        rho^-1(U2(D)) e_(l1,l2) = |D|^-1 sum_{mu,nu} e((mu, l2 - nu)) e_(d mu + l1, nu);
        rho(U2(D)) = rho^-1(U2(-D)) is the same expression with -d.
        """
        D, N, k = self.fqm, self.fqm.level, self.size
        dd = d if inverse else -d
        add = D.add_table()
        scale = D.scale_map(dd)
        bv = D.b_values
        size = k * k
        # accumulate exponent counts per (row, col, exponent)
        counts = np.zeros((size, size, N), dtype=np.int64)
        for l1 in range(k):
            for l2 in range(k):
                col = l1 * k + l2
                for mu in range(k):
                    row1 = add[scale[mu], l1]
                    for nu in range(k):
                        ex = (bv[mu, l2] - bv[mu, nu]) % N
                        counts[row1 * k + nu, col, ex] += 1
        return CycloMatrix.from_exponent_counts(counts, N, k).lift(self.conductor)

    def scale_operator(self, d: int) -> CycloMatrix:
        """P_d: e_l -> e_(d l)."""
        perm = self.fqm.scale_map(d)
        k = self.size
        num = np.zeros((1, k, k), dtype=np.int64)
        num[0, perm, np.arange(k)] = 1
        return CycloMatrix(1, num, 1, normalize=False).lift(self.conductor)

    def gauss_ratio(self, d: int) -> CycloNum:
        """g_d(L) / g(L)."""
        return self.fqm.gauss_sum(d) / self.fqm.gauss_sum(1)

    def extended_action(self, d: int, left: Mat, right: Mat, variant: str = "Dprime") -> CycloMatrix:
        """rho^-1(gamma D' gamma') = rho^-1(gamma') P_d rho^-1(gamma), D' = diag(d^2, 1)."""
        mat = self.rho1_inv(right) @ self.scale_operator(d) @ self.rho1_inv(left)
        if variant == "D":
            mat = mat.scale(self.gauss_ratio(d)).lift(self.conductor)
        elif variant != "Dprime":
            raise ValueError("variant must be Dprime or D")
        return mat


@lru_cache(maxsize=64)
def weil_of(fqm: FiniteQuadraticModule) -> WeilRep:
    return WeilRep(fqm)


# ---------------------------------------------------------------------------
# functional interface

def rho_generator(fqm: FiniteQuadraticModule, n: int, g: GroupWord | Letter) -> CycloMatrix:
    letter = g.letters[0] if isinstance(g, GroupWord) else g
    return weil_of(fqm).generator(n, letter)


def rho_word(fqm: FiniteQuadraticModule, n: int, w: GroupWord) -> CycloMatrix:
    if w.genus != n:
        raise WordSyntaxError("genus mismatch")
    return weil_of(fqm).word(w)


def rho1_matrix(fqm: FiniteQuadraticModule, g) -> CycloMatrix:
    return weil_of(fqm).rho1(as_mat(g))


def rho2_embed(fqm: FiniteQuadraticModule, g, direction: str) -> CycloMatrix:
    return weil_of(fqm).embed(as_mat(g), direction)


def rho2_U2_offdiag(fqm: FiniteQuadraticModule, d: int, inverse: bool = True) -> CycloMatrix:
    return weil_of(fqm).u2_offdiag(d, inverse)


def dual(m: CycloMatrix) -> CycloMatrix:
    return m.conjugate()


def conjugation_tilde(fqm: FiniteQuadraticModule, n: int, w: GroupWord) -> CycloMatrix:
    """rho(gamma~) for gamma~ = diag(-1, 1) gamma diag(-1, 1); checked against dual(rho(gamma))."""
    wt = w.tilde()
    flip = block(mat_neg(mat_id(n)), tuple((0,) * n for _ in range(n)),
                 tuple((0,) * n for _ in range(n)), mat_id(n))
    assert wt.matrix() == mat_mul(mat_mul(flip, w.matrix()), flip)
    result = rho_word(fqm, n, wt)
    if result != dual(rho_word(fqm, n, w)):
        raise AssertionError("rho(gamma~) differs from the conjugate of rho(gamma)")
    return result


def extended_action(fqm: FiniteQuadraticModule, d: int, left: GroupWord, right: GroupWord,
                    variant: str = "Dprime") -> CycloMatrix:
    return weil_of(fqm).extended_action(d, left.matrix(), right.matrix(), variant)


def mcgehee_word(a: int, d: int) -> GroupWord:
    """S T^d S^-1 T^a S T^d."""
    return S() * T(d) * Sinv() * T(a) * S() * T(d)


def hecke_factorization(m: Mat, d: int) -> tuple[Mat, Mat]:
    """gamma, gamma' in SL2(Z) with m = gamma diag(d^2, 1) gamma' (m primitive of det d^2)."""
    from sympy import Matrix, ZZ
    from sympy.matrices.normalforms import smith_normal_decomp

    snf, u, v = smith_normal_decomp(Matrix(m), domain=ZZ)
    s1, s2 = int(snf[0, 0]), int(snf[1, 1])
    if (abs(s1), abs(s2)) != (1, d * d):
        raise ValueError("matrix is not a primitive element of the double coset")
    signs = ((1 if s1 > 0 else -1, 0), (0, 1 if s2 > 0 else -1))
    u_inv = mat_mul(as_mat(u.inv()), signs)
    v_inv = as_mat(v.inv())
    if mat_det(u_inv) == -1:
        flip = ((-1, 0), (0, 1))
        u_inv, v_inv = mat_mul(u_inv, flip), mat_mul(flip, v_inv)
    s = ((0, -1), (1, 0))
    s_inv = ((0, 1), (-1, 0))
    gamma = mat_mul(u_inv, s)
    gamma_p = mat_mul(s_inv, v_inv)
    dprime = ((d * d, 0), (0, 1))
    assert mat_mul(mat_mul(gamma, dprime), gamma_p) == as_mat(m)
    return gamma, gamma_p


def random_word(genus: int, length: int, rng: random.Random, bound: int = 3) -> GroupWord:
    letters: list[Letter] = []
    for _ in range(length):
        kind = rng.choice(["S", "Sinv", "T", "T", "m"])
        if kind in ("S", "Sinv"):
            letters.append(Letter(kind))
        elif kind == "T":
            if genus == 1:
                letters.append(Letter("T", ((rng.randint(-bound, bound),),)))
            else:
                b11, b22, b12 = (rng.randint(-bound, bound) for _ in range(3))
                letters.append(Letter("T", ((b11, b12), (b12, b22))))
        else:
            letters.append(Letter("m", _random_gl(genus, rng)))
    return GroupWord(genus, tuple(letters))


def _random_gl(genus: int, rng: random.Random) -> Mat:
    if genus == 1:
        return ((rng.choice([1, -1]),),)
    pool = [((1, 1), (0, 1)), ((0, 1), (1, 0)), ((-1, 0), (0, 1)), ((1, 0), (-1, 1)),
            ((2, 1), (1, 1)), ((0, -1), (1, 0))]
    a = mat_id(2)
    for _ in range(rng.randint(1, 3)):
        a = mat_mul(a, rng.choice(pool))
    return a


def random_sl2(rng: random.Random, steps: int = 6, bound: int = 4) -> Mat:
    g = mat_id(2)
    for _ in range(steps):
        k = rng.randint(-bound, bound)
        g = mat_mul(g, ((1, k), (0, 1)))
        g = mat_mul(g, ((0, -1), (1, 0)))
    return g


def random_gamma_n(level: int, rng: random.Random, steps: int = 4) -> Mat:
    """Random element of the principal congruence subgroup of the given level."""
    g = mat_id(2)
    for _ in range(steps):
        h = random_sl2(rng, 3, 3)
        k = rng.choice([-1, 1]) * level
        t = ((1, k), (0, 1)) if rng.random() < 0.5 else ((1, 0), (k, 1))
        g = mat_mul(g, mat_mul(mat_mul(h, t), mat_inv_unimodular(h)))
    return g
