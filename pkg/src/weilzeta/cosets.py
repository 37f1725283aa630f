"""Coset systems for the Eisenstein, Poincare and Hecke sums.

All representatives are integer tuples-of-tuples.  Lists are returned in a
deterministic order so floating-point accumulation downstream is
reproducible.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import numpy as np

from .cyclotomic import divisors
from .errors import NonUnimodular
from .weil import (Mat, _ext_gcd, as_mat, block, down, mat_det, mat_id, mat_inv_unimodular,
                   mat_mul, mat_transpose, up)

KINDS = ("genus1-borel", "genus2-klingen0", "hecke-right", "gamma1d", "offdiag", "garrett")


@dataclass(frozen=True)
class CosetList:
    kind: str
    representatives: tuple
    truncation: int | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __len__(self) -> int:
        return len(self.representatives)

    def __iter__(self):
        return iter(self.representatives)


# ---------------------------------------------------------------------------
# genus 1

def complete_row(c: int, d: int) -> Mat:
    """An element of SL2(Z) with bottom row (c, d)."""
    if gcd(c, d) != 1:
        raise ValueError(f"({c}, {d}) is not coprime")
    g, x, y = _ext_gcd(d, c)      # x d + y c = g = +-1
    if g == -1:
        x, y = -x, -y
    # a d - b c = 1 with a = x, b = -y
    return ((x, -y), (c, d))


def coprime_pairs(height: int) -> list[tuple[int, int]]:
    """Coprime (c, d), max(|c|,|d|) <= height, one of each +- pair."""
    out = []
    for c in range(0, height + 1):
        for d in range(-height, height + 1):
            if gcd(c, d) != 1:
                continue
            if c == 0 and d != 1:
                continue
            out.append((c, d))
    return out


def genus1_cosets(height: int) -> CosetList:
    if height < 1:
        raise ValueError("height must be positive")
    reps = []
    for c, d in coprime_pairs(height):
        reps.append(mat_id(2) if (c, d) == (0, 1) else complete_row(c, d))
    reps.sort(key=_sort_key)
    return CosetList("genus1-borel", tuple(reps), height)


def genus1_count_bruteforce(height: int) -> int:
    """Count bottom rows of SL2(Z) elements reachable by short words, up to sign."""
    seen = set()
    frontier = [mat_id(2)]
    gens = [((0, -1), (1, 0)), ((1, 1), (0, 1)), ((1, -1), (0, 1))]
    visited = {mat_id(2)}
    limit = 4 * height + 6
    for _ in range(limit):
        nxt = []
        for g in frontier:
            for s in gens:
                h = mat_mul(g, s)
                if h in visited or max(abs(v) for r in h for v in r) > 3 * height + 3:
                    continue
                visited.add(h)
                nxt.append(h)
        frontier = nxt
    for g in visited:
        c, d = g[1]
        if max(abs(c), abs(d)) <= height:
            if c < 0 or (c == 0 and d < 0):
                c, d = -c, -d
            seen.add((c, d))
    return len(seen)


def borel_equivalent(g: Mat, h: Mat) -> bool:
    """g h^-1 lies in the Borel subgroup (c = 0)."""
    return mat_mul(g, mat_inv_unimodular(h))[1][0] == 0


# ---------------------------------------------------------------------------
# genus 2: symmetric coprime pairs

def row_hnf(rows) -> tuple:
    """Row Hermite normal form of an integer matrix under left GL(Z) action."""
    a = [list(r) for r in rows]
    nrows, ncols = len(a), len(a[0])
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        while True:
            nz = [i for i in range(r, nrows) if a[i][c] != 0]
            if len(nz) <= 1:
                break
            i0 = min(nz, key=lambda i: abs(a[i][c]))
            for i in nz:
                if i != i0:
                    q = a[i][c] // a[i0][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[i0])]
        nz = [i for i in range(r, nrows) if a[i][c] != 0]
        if not nz:
            continue
        i0 = nz[0]
        a[r], a[i0] = a[i0], a[r]
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
        for i in range(r):
            q = a[i][c] // a[r][c]
            a[i] = [x - q * y for x, y in zip(a[i], a[r])]
        r += 1
    return tuple(tuple(row) for row in a)


def _minor_gcd(row0, row1) -> int:
    g = 0
    for i, j in itertools.combinations(range(len(row0)), 2):
        g = gcd(g, row0[i] * row1[j] - row0[j] * row1[i])
    return g


def is_symmetric_coprime(c: Mat, d: Mat) -> bool:
    cdt = mat_mul(c, mat_transpose(d))
    if cdt[0][1] != cdt[1][0]:
        return False
    return _minor_gcd(c[0] + d[0], c[1] + d[1]) == 1


def complete_symplectic(c: Mat, d: Mat) -> Mat:
    """A symplectic integer matrix with lower blocks (C, D)."""
    from sympy import Matrix, ZZ
    from sympy.matrices.normalforms import smith_normal_decomp

    cd = Matrix([list(c[0]) + list(d[0]), list(c[1]) + list(d[1])])
    snf, u, v = smith_normal_decomp(cd, domain=ZZ)
    # cd = u^-1 snf v^-1, snf = [diag(e1, e2) | 0] with e_i = +-1
    e1, e2 = int(snf[0, 0]), int(snf[1, 1])
    if abs(e1) != 1 or abs(e2) != 1:
        raise ValueError("pair is not coprime")
    pad = Matrix([[e1, 0], [0, e2], [0, 0], [0, 0]])
    x = v * pad * u       # cd * x = I
    assert cd * x == Matrix.eye(2)
    p = [[int(x[i, j]) for j in range(2)] for i in range(2)]
    q = [[int(x[i + 2, j]) for j in range(2)] for i in range(2)]
    a = mat_transpose(as_mat(q))
    b = tuple(tuple(-v for v in row) for row in mat_transpose(as_mat(p)))
    abt = mat_mul(a, mat_transpose(b))
    w = abt[0][1] - abt[1][0]
    k = ((0, w), (0, 0))
    a = _add(a, mat_mul(k, c))
    b = _add(b, mat_mul(k, d))
    m = block(a, b, c, d)
    _check_symplectic(m)
    return m


def _add(x: Mat, y: Mat) -> Mat:
    return tuple(tuple(u + v for u, v in zip(r, s)) for r, s in zip(x, y))


def _check_symplectic(m: Mat) -> None:
    from .weil import is_symplectic
    if not is_symplectic(m):
        raise NonUnimodular("completion failed")


def lower_blocks(m: Mat) -> tuple[Mat, Mat]:
    c = (tuple(m[2][:2]), tuple(m[3][:2]))
    d = (tuple(m[2][2:]), tuple(m[3][2:]))
    return c, d


def pair_classes_bruteforce(height: int) -> list[tuple]:
    """Canonical (C|D) rows of all symmetric coprime pairs with entries bounded by height."""
    rng = np.arange(-height, height + 1)
    grid = np.stack(np.meshgrid(*([rng] * 8), indexing="ij"), -1).reshape(-1, 8)
    c00, c01, c10, c11, d00, d01, d10, d11 = grid.T
    sym = (c00 * d10 + c01 * d11) == (c10 * d00 + c11 * d01)
    grid = grid[sym]
    r0 = grid[:, [0, 1, 4, 5]]
    r1 = grid[:, [2, 3, 6, 7]]
    g = np.zeros(len(grid), dtype=np.int64)
    for i, j in itertools.combinations(range(4), 2):
        g = np.gcd(g, r0[:, i] * r1[:, j] - r0[:, j] * r1[:, i])
    grid = grid[g == 1]
    classes = set()
    for row in grid.tolist():
        classes.add(row_hnf([row[0:2] + row[4:6], row[2:4] + row[6:8]]))
    return sorted(classes)


def genus2_cosets(height: int) -> CosetList:
    """Cosets of the Siegel parabolic (C = 0) with |entries of C, D| <= height."""
    if height < 0:
        raise ValueError("height must be nonnegative")
    if height == 0:
        return CosetList("genus2-klingen0", (mat_id(4),), 0)
    reps = []
    for rows in pair_classes_bruteforce(height):
        c = (rows[0][:2], rows[1][:2])
        d = (rows[0][2:], rows[1][2:])
        if c == ((0, 0), (0, 0)):
            reps.append(mat_id(4))
        else:
            reps.append(complete_symplectic(c, d))
    reps.sort(key=lambda m: (lower_blocks(m) != (((0, 0), (0, 0)), ((1, 0), (0, 1))), _sort_key(m)))
    return CosetList("genus2-klingen0", tuple(reps), height)


def parabolic_equivalent(g: Mat, h: Mat) -> bool:
    """g h^-1 has vanishing lower-left block."""
    cg, dg = lower_blocks(g)
    ch, dh = lower_blocks(h)
    # lower-left block of g h^-1 is C_g D_h^T - D_g C_h^T
    x = _add(mat_mul(cg, mat_transpose(dh)),
             tuple(tuple(-v for v in r) for r in mat_mul(dg, mat_transpose(ch))))
    return x == ((0, 0), (0, 0))


def count_inequivalent_violations(reps) -> int:
    """Number of pairs i < j that lie in the same coset (vectorised)."""
    if len(reps) < 2:
        return 0
    arr = np.array(reps, dtype=np.int64)
    c = arr[:, 2:, :2]
    d = arr[:, 2:, 2:]
    bad = 0
    for i in range(len(reps) - 1):
        x = np.einsum("ab,ncb->nac", c[i], d[i + 1:]) - np.einsum("ab,ncb->nac", d[i], c[i + 1:])
        bad += int(np.count_nonzero(~x.reshape(len(x), -1).any(axis=1)))
    return bad


# ---------------------------------------------------------------------------
# Hecke cosets

def hecke_right_cosets(d: int, variant: str = "Dprime") -> CosetList:
    """Right cosets of SL2(Z) in the double coset of diag(d^2, 1)."""
    if d < 1:
        raise ValueError("d must be positive")
    n = d * d
    reps = []
    for a in divisors(n):
        c = n // a
        for b in range(c):
            if gcd(gcd(a, b), c) == 1:
                reps.append(((a, b), (0, c)))
    reps.sort(key=_sort_key)
    if variant == "D":
        reps = [tuple(tuple(Fraction(v, d) for v in r) for r in m) for m in reps]
    elif variant != "Dprime":
        raise ValueError("variant must be Dprime or D")
    return CosetList("hecke-right", tuple(reps), d, {"variant": variant})


def hecke_count_bruteforce(d: int) -> int:
    """Count SL2(Z)-classes of primitive integer matrices of determinant d^2 by a box scan."""
    n = d * d
    rng = np.arange(-n, n + 1)
    a, b = np.meshgrid(rng, rng, indexing="ij")
    a, b = a.ravel(), b.ravel()
    classes = set()
    for c in range(-n, n + 1):
        for e in range(-n, n + 1):
            ok = (a * e - b * c == n) & (np.gcd(np.gcd(a, b), np.gcd(c, e)) == 1)
            for x, y in zip(a[ok].tolist(), b[ok].tolist()):
                classes.add(row_hnf([[x, y], [c, e]]))
    return len(classes)


# ---------------------------------------------------------------------------
# Gamma_1(d), the off-diagonal variant and the involution

def involution_ell(g) -> Mat:
    """l(g) = [[0,1],[-1,0]] g^-1 [[0,-1],[1,0]]."""
    g = as_mat(g)
    if mat_det(g) != 1:
        raise NonUnimodular(f"det {mat_det(g)} != 1")
    return mat_mul(mat_mul(((0, 1), (-1, 0)), mat_inv_unimodular(g)), ((0, -1), (1, 0)))


def in_gamma1d(g: Mat, d: int) -> bool:
    """Membership in diag(d,1/d)^-1 SL2(Z) diag(d,1/d) intersected with SL2(Z)."""
    conj = ((g[0][0], Fraction(g[0][1] * d * d)), (Fraction(g[1][0], d * d), g[1][1]))
    return all(Fraction(v).denominator == 1 for r in conj for v in r)


def in_offdiag_group(g: Mat, d: int) -> bool:
    """Membership in W SL2(Z) W intersected with SL2(Z), W = [[0, 1/d], [d, 0]]."""
    (a, b), (c, e) = g
    # W g W = [[e, c/d^2], [d^2 b, a]]; W^2 = 1 so membership means W g W integral
    return Fraction(c, d * d).denominator == 1


def _p1_points(n: int) -> list[tuple[int, int]]:
    """Representatives of P^1(Z/n) as coprime pairs."""
    seen = {}
    units = [u for u in range(1, n + 1) if gcd(u, n) == 1] if n > 1 else [1]
    for c in range(n):
        for e in range(n):
            if gcd(gcd(c, e), n) != 1:
                continue
            key = min(((u * c) % n, (u * e) % n) for u in units)
            seen.setdefault(key, (c, e))
    return sorted(seen.values())


def _lift_row(c: int, e: int, n: int) -> Mat:
    """An element of SL2(Z) with bottom row congruent to (c, e) mod n."""
    if n == 1:
        return mat_id(2)
    if c % n == 0 and e % n == 1:
        return mat_id(2)
    c0 = c if c % n else n
    k = 0
    while gcd(c0, e + n * k) != 1:
        k += 1
    return complete_row(c0, e + n * k)


def index_gamma0(n: int) -> int:
    idx = n
    for p in range(2, n + 1):
        if n % p == 0 and all(p % q for q in range(2, p)):
            idx = idx * (p + 1) // p
    return idx


def gamma1d_cosets(d: int) -> CosetList:
    """Right cosets of Gamma_1(d) (lower-left entry divisible by d^2) in SL2(Z)."""
    n = d * d
    reps = [_lift_row(c, e, n) for c, e in _p1_points(n)]
    return CosetList("gamma1d", tuple(reps), d)


def offdiag_cosets(d: int) -> CosetList:
    """Right cosets of the off-diagonal congruence group, found by orbit enumeration."""
    reps: list[Mat] = [mat_id(2)]
    frontier = [mat_id(2)]
    gens = [((0, -1), (1, 0)), ((1, 1), (0, 1))]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = mat_mul(g, s)
                if any(in_offdiag_group(mat_mul(h, mat_inv_unimodular(r)), d) for r in reps):
                    continue
                reps.append(h)
                nxt.append(h)
        frontier = nxt
    return CosetList("offdiag", tuple(reps), d)


def coset_count_bruteforce(d: int, member=in_gamma1d) -> int:
    """Index by orbit enumeration on right cosets mod d^2."""
    return len(offdiag_cosets(d)) if member is in_offdiag_group else len(_orbit_reps(d, member))


def _orbit_reps(d: int, member) -> list[Mat]:
    reps: list[Mat] = [mat_id(2)]
    frontier = [mat_id(2)]
    gens = [((0, -1), (1, 0)), ((1, 1), (0, 1))]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = mat_mul(g, s)
                if any(member(mat_mul(h, mat_inv_unimodular(r)), d) for r in reps):
                    continue
                reps.append(h)
                nxt.append(h)
        frontier = nxt
    return reps


def ell_bijection_check(d: int) -> bool:
    """l maps right cosets H g (H the off-diagonal group) bijectively to left cosets l(g) l(H).

    Checks: l(H) = {h^T}, distinct right cosets go to distinct left cosets, and the image
    count equals the index of the congruence group of the first index set.
    """
    reps = offdiag_cosets(d).representatives
    images = [involution_ell(g) for g in reps]
    for i, x in enumerate(images):
        for y in images[i + 1:]:
            # same left coset of l(H): x^-1 y in l(H), i.e. l(x^-1 y) in H
            if in_offdiag_group(involution_ell(mat_mul(mat_inv_unimodular(x), y)), d):
                return False
    return len(images) == len(gamma1d_cosets(d)) == index_gamma0(d * d)


# ---------------------------------------------------------------------------
# Garrett representatives

def u2_matrix(d: int) -> Mat:
    """U2([[0,d],[d,0]]) = [[1,0],[D,1]]."""
    return ((1, 0, 0, 0), (0, 1, 0, 0), (0, d, 1, 0), (d, 0, 0, 1))


def sl2_box(height: int) -> list[Mat]:
    """All elements of SL2(Z) with entries bounded by height."""
    out = []
    rng = range(-height, height + 1)
    for a, b, c in itertools.product(rng, repeat=3):
        for e in rng:
            if a * e - b * c == 1:
                out.append(((a, b), (c, e)))
    return out


def garrett_reps(d: int, g_height: int, use_ell: bool = False) -> CosetList:
    """Siegel-parabolic coset representatives of the double coset indexed by d."""
    if d < 0:
        raise ValueError("d must be nonnegative")
    reps = []
    if d == 0:
        g1 = genus1_cosets(g_height).representatives
        for g in g1:
            for h in g1:
                reps.append(mat_mul(up(g), down(h)))
    else:
        if use_ell:
            ms = [involution_ell(m) for m in gamma1d_cosets(d).representatives]
        else:
            ms = list(offdiag_cosets(d).representatives)
        u = u2_matrix(d)
        for gam in sl2_box(g_height):
            for m in ms:
                reps.append(mat_mul(mat_mul(u, up(gam)), down(m)))
    reps.sort(key=_sort_key)
    return CosetList("garrett", tuple(reps), g_height, {"d": d})


def _sort_key(m) -> tuple:
    return tuple(v for r in m for v in r)


# ---------------------------------------------------------------------------
# structured parametrisation of the genus-2 classes by the rank of C

def rank1_classes(u_bound: int, c_bound: int) -> list[tuple[tuple[int, int], Mat, Mat]]:
    """(u, g, V): classes up(g T^k) m(V) with V of first row u, g = (*,*; c, d0), 0 <= d0 < c.

    The translation k in Z runs over the remaining freedom and is left to the caller.
    """
    out = []
    us = [(u1, u2) for u1 in range(0, u_bound + 1) for u2 in range(-u_bound, u_bound + 1)
          if gcd(u1, u2) == 1 and not (u1 == 0 and u2 != 1)]
    for u in us:
        x, y = complete_row(*u)[0]
        v = ((u[0], u[1]), (-x, -y))
        for c in range(1, c_bound + 1):
            for d0 in range(c):
                if gcd(c, d0) == 1:
                    out.append((u, complete_row(c, d0), v))
    return out


def rank2_classes(det_bound: int) -> list[tuple[Mat, tuple, Mat]]:
    """(C, S0, D0): C upper-triangular Hermite form, S0 = C^-1 D0 symmetric with entries in [0, 1).

    Translations D0 + C B (B integral symmetric) run over the remaining freedom.
    """
    out = []
    for p in range(1, det_bound + 1):
        for r in range(1, det_bound // p + 1):
            n = p * r
            for x in range(r):
                c = ((p, x), (0, r))
                for k1, k2, k3 in itertools.product(range(n), repeat=3):
                    s = ((Fraction(k1, n), Fraction(k2, n)), (Fraction(k2, n), Fraction(k3, n)))
                    d = tuple(tuple(c[i][0] * s[0][j] + c[i][1] * s[1][j] for j in range(2))
                              for i in range(2))
                    if any(v.denominator != 1 for row in d for v in row):
                        continue
                    d = tuple(tuple(int(v) for v in row) for row in d)
                    if _minor_gcd(c[0] + d[0], c[1] + d[1]) != 1:
                        continue
                    out.append((c, s, d))
    return out


def structured_class_forms(u_bound: int = 3, c_bound: int = 3, det_bound: int = 4,
                           window: int = 3) -> list:
    """Canonical (C|D) forms produced by the rank parametrisation, one per produced class."""
    found = [row_hnf([[0, 0, 1, 0], [0, 0, 0, 1]])]
    zero = ((0, 0), (0, 0))
    for u, g, v in rank1_classes(u_bound, c_bound):
        mv = block(v, zero, zero, mat_transpose(mat_inv_unimodular(v)))
        for k in range(-window, window + 1):
            gk = mat_mul(g, ((1, k), (0, 1)))
            c, d = lower_blocks(mat_mul(up(gk), mv))
            found.append(row_hnf([c[0] + d[0], c[1] + d[1]]))
    for c, s, d0 in rank2_classes(det_bound):
        for b in itertools.product(range(-window, window + 1), repeat=3):
            bm = ((b[0], b[1]), (b[1], b[2]))
            d = _add(d0, mat_mul(c, bm))
            found.append(row_hnf([c[0] + d[0], c[1] + d[1]]))
    return found
