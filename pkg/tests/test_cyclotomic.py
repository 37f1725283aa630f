import cmath
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from weilzeta.cyclotomic import (CycloMatrix, CycloNum, e, euler_phi, format_cyclo, root_of_unity,
                                 sqrt_of_integer, to_complex)

conductors = st.sampled_from([1, 3, 4, 5, 8, 12, 15, 24])


@st.composite
def cyclo(draw, m=None):
    m = draw(conductors) if m is None else m
    n = draw(st.integers(1, 4))
    x = CycloNum.zero()
    for _ in range(n):
        c = Fraction(draw(st.integers(-5, 5)), draw(st.integers(1, 4)))
        x = x + CycloNum.rational(c) * root_of_unity(draw(st.integers(0, m - 1)), m)
    return x


def approx(x: CycloNum) -> complex:
    return complex(to_complex(x))


def test_roots_of_unity_embed_correctly():
    for b in (1, 2, 3, 4, 6, 8, 12, 24):
        for a in range(b):
            assert abs(approx(root_of_unity(a, b)) - cmath.exp(2j * cmath.pi * a / b)) < 1e-13


def test_minus_one_and_i():
    assert e(Fraction(1, 2)) == CycloNum.rational(-1)
    i = e(Fraction(1, 4))
    assert i * i == CycloNum.rational(-1)


def test_sqrt_of_integer_squares_back():
    for n in (2, 3, 5, 7, 8, 12, 27, 30):
        r = sqrt_of_integer(n)
        assert r * r == CycloNum.rational(n)
        assert abs(approx(r) - n ** 0.5) < 1e-12


def test_zero_division():
    with pytest.raises(ZeroDivisionError):
        CycloNum.zero().inverse()


def test_format_is_stable():
    assert format_cyclo(CycloNum.zero()) == "0"
    assert format_cyclo(CycloNum.rational(Fraction(-3, 4))) == "-3/4"
    assert format_cyclo(1 + 2 * e(Fraction(1, 3))) == "1 + 2*z3^1"


@given(cyclo(), cyclo(), cyclo())
def test_field_axioms(x, y, z):
    assert (x + y) * z == x * z + y * z
    assert x * y == y * x
    assert (x - x).is_zero()
    if not y.is_zero():
        assert (x / y) * y == x


@given(cyclo(), cyclo())
def test_embedding_is_a_ring_map(x, y):
    assert abs(approx(x * y) - approx(x) * approx(y)) < 1e-9 * (1 + abs(approx(x)) * abs(approx(y)))
    assert abs(approx(x + y) - approx(x) - approx(y)) < 1e-9 * (1 + abs(approx(x)) + abs(approx(y)))


@given(cyclo(m=24), cyclo(m=24), st.sampled_from([1, 5, 7, 11, 13, 17, 19, 23]))
def test_galois_is_an_automorphism(x, y, d):
    assert (x * y).galois(d) == x.galois(d) * y.galois(d)
    assert (x + y).galois(d) == x.galois(d) + y.galois(d)


@given(cyclo())
def test_conjugate_matches_complex_conjugation(x):
    assert abs(approx(x.conjugate()) - approx(x).conjugate()) < 1e-9 * (1 + abs(approx(x)))
    assert (x * x.conjugate()).conjugate() == x * x.conjugate()


@given(cyclo(m=12))
def test_product_of_galois_conjugates_is_rational(x):
    prod = CycloNum.one()
    approx_prod = 1
    for d in (1, 5, 7, 11):
        prod = prod * x.galois(d)
        approx_prod *= approx(x.galois(d))
    assert prod.is_rational()
    assert abs(float(prod.to_rational()) - approx_prod) < 1e-8 * (1 + abs(approx_prod))


def test_matrix_product_matches_complex():
    rng = np.random.default_rng(1)
    rows = [[root_of_unity(int(rng.integers(12)), 12) + int(rng.integers(-2, 3)) for _ in range(3)]
            for _ in range(3)]
    A = CycloMatrix.from_entries(rows, 12)
    B = A.adjoint()
    C = A @ B
    assert np.allclose(C.to_complex(), A.to_complex() @ A.to_complex().conj().T)
    assert (A.conjugate().T - A.adjoint()).to_complex().any() == False  # noqa: E712
    assert CycloMatrix.identity(3, 12).is_identity()


def test_kron_matches_numpy():
    A = CycloMatrix.from_entries([[e(Fraction(1, 3)), 1], [0, e(Fraction(1, 4))]], 12)
    assert np.allclose(A.kron(A).to_complex(), np.kron(A.to_complex(), A.to_complex()))
