import itertools
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from sympy import Matrix

from weilzeta.cyclotomic import CycloNum
from weilzeta.discriminant import (A2, D2_DIAG, E8, HYPERBOLIC, EvenLattice, discriminant_form, kronecker,
                                   read_gram, signature_from_gauss_sum, write_gram)
from weilzeta.errors import DegenerateLattice, FormatError, OddDiagonal, OddRank

from conftest import DATA


def brute_q_multiset(gram) -> Counter:
    """q-values of L'/L by enumerating G^-1 v for v in a box, reduced mod Z^n."""
    G = Matrix(gram)
    Ginv = G.inv()
    det = abs(int(G.det()))
    n = G.shape[0]
    classes = {}
    for v in itertools.product(range(det), repeat=n):
        x = Ginv * Matrix(v)
        key = tuple(Fraction(int(c.p), int(c.q)) % 1 for c in x)
        if key not in classes:
            xv = Matrix([[c] for c in key])
            q = (xv.T * G * xv)[0, 0] / 2
            classes[key] = Fraction(int(q.p), int(q.q)) % 1
    return Counter(classes.values())


def module_q_multiset(fqm) -> Counter:
    return Counter(Fraction(int(v), fqm.level) for v in fqm.q_values)


def test_a2():
    D = discriminant_form(A2)
    assert D.elementary_divisors == (3,)
    assert D.order == 3 and D.level == 3
    assert D.signature_mod_8 == 2
    assert module_q_multiset(D) == Counter({0: 1, Fraction(1, 3): 2})
    assert D.is_anisotropic()


def test_d2_and_unimodular():
    D = discriminant_form(D2_DIAG)
    assert D.elementary_divisors == (2, 2)
    assert module_q_multiset(D) == Counter({0: 1, Fraction(1, 4): 2, Fraction(1, 2): 1})
    assert not discriminant_form(HYPERBOLIC).elementary_divisors
    E = discriminant_form(E8)
    assert E.order == 1 and E.gauss_sum(1) == CycloNum.one()


def test_gram_file_roundtrip(tmp_path):
    L = read_gram(DATA / "a2.gram")
    assert L == A2
    write_gram(E8, tmp_path / "e8.gram")
    assert read_gram(tmp_path / "e8.gram") == E8


@pytest.mark.parametrize("text,err", [("", FormatError), ("2\n1 2 3", FormatError),
                                      ("2\n2 x\n1 2", FormatError)])
def test_malformed_files(tmp_path, text, err):
    p = tmp_path / "bad.gram"
    p.write_text(text)
    with pytest.raises(err):
        read_gram(p)


def test_invalid_lattices():
    with pytest.raises(OddRank):
        EvenLattice(((2,),))
    with pytest.raises(OddDiagonal):
        EvenLattice(((1, 0), (0, 2)))
    with pytest.raises(DegenerateLattice):
        EvenLattice(((2, 2), (2, 2)))
    with pytest.raises(FormatError):
        EvenLattice(((2, 1), (0, 2)))


def test_kronecker_symbol_small_table():
    # (a/p) for p = 7 from the squares 1, 2, 4
    assert [kronecker(a, 7) for a in range(7)] == [0, 1, 1, -1, 1, -1, -1]
    assert kronecker(-3, 2) == -1 and kronecker(5, 2) == -1 and kronecker(7, 2) == 1


@st.composite
def even_gram(draw, n):
    a = [[0] * n for _ in range(n)]
    for i in range(n):
        a[i][i] = 2 * draw(st.integers(-3, 3))
        for j in range(i + 1, n):
            a[i][j] = a[j][i] = draw(st.integers(-2, 2))
    return tuple(tuple(r) for r in a)


@given(st.one_of(even_gram(2), even_gram(4)))
def test_discriminant_matches_bruteforce(gram):
    det = int(round(np.linalg.det(np.array(gram, dtype=float))))
    assume(det != 0 and abs(det) <= (40 if len(gram) == 2 else 12))
    L = EvenLattice(gram)
    D = discriminant_form(L)
    assert D.order == abs(det)
    assert module_q_multiset(D) == brute_q_multiset(gram)
    # Milgram: the signature read off the Gauss sum equals the lattice signature mod 8
    assert signature_from_gauss_sum(D) == L.signature % 8
    assert D.gauss_sum(1) == D.milgram_rhs()
