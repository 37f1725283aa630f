import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from weilzeta.checks import extended_action_suite, embedding_suite, milgram_suite, weil_suite
from weilzeta.cyclotomic import to_complex
from weilzeta.discriminant import A2, D2_DIAG, discriminant_form
from weilzeta.errors import NonUnimodular, WordSyntaxError
from weilzeta.weil import (S, T, GroupWord, parse_word, random_word, sl2_word, sp4_word,
                           weil_of)

A2_W = weil_of(discriminant_form(A2))
D2_W = weil_of(discriminant_form(D2_DIAG))


def _failures(results):
    return [(r.name, r.detail) for r in results if not r.passed]


@pytest.mark.parametrize("name", ["A2", "D2", "A2+A2", "E8"])
def test_exact_suites(modules, name):
    D = modules[name]
    assert not _failures(weil_suite(D, words=20, length=6, seed=3))
    assert not _failures(embedding_suite(D))
    assert not _failures(milgram_suite(D))


def test_extended_action_a2():
    assert not _failures(extended_action_suite(discriminant_form(A2), d=3, deltas=2,
                                               factorizations=4, seed=5))


def test_t_is_diagonal_with_q_values():
    D = discriminant_form(A2)
    mat = A2_W.word(T(1)).to_complex()
    expect = np.exp(2j * np.pi * D.q_values / D.level)
    assert np.allclose(mat, np.diag(expect))


def test_s_matrix_entries():
    # rho(S) = e(-sig/8) |D|^-1/2 e(-(mu, lambda)); for A2 sig = 2, |D| = 3
    D = discriminant_form(A2)
    mat = A2_W.word(S()).to_complex()
    b = D.b_values / D.level
    expect = np.exp(-2j * np.pi * 2 / 8) / np.sqrt(3) * np.exp(-2j * np.pi * b)
    assert np.allclose(mat, expect)


def test_parse_word_roundtrip():
    w = parse_word("S,T(b=[[1,0],[0,2]]),Sinv,m(a=[[0,1],[1,0]]),T(b=[[1,0],[0,0]])^3", 2)
    assert isinstance(w, GroupWord) and len(w) >= 4
    with pytest.raises(WordSyntaxError):
        parse_word("S,Q", 1)
    with pytest.raises(WordSyntaxError):
        parse_word("S(b=1)", 1)
    with pytest.raises(WordSyntaxError):
        parse_word("T", 2)


def test_sl2_word_rejects_non_unimodular():
    with pytest.raises(NonUnimodular):
        sl2_word(((2, 0), (0, 1)))


def test_gauss_ratio_d3_a2():
    # g_3 / g for A2: g_3 = 3 and g = sqrt(-3)
    assert complex(to_complex(A2_W.gauss_ratio(3))) == pytest.approx(-1j * np.sqrt(3))


words1 = st.integers(0, 10 ** 6).map(lambda s: random_word(1, 6, random.Random(s)))
words2 = st.integers(0, 10 ** 6).map(lambda s: random_word(2, 4, random.Random(s)))


@given(words1, words1)
def test_homomorphism_genus1(u, v):
    assert A2_W.word(u * v) == A2_W.word(u) @ A2_W.word(v)


@given(words1)
def test_word_independence_genus1(w):
    # the Euclidean word of the same matrix gives the same operator
    assert A2_W.word(sl2_word(w.matrix())) == A2_W.word(w)
    assert D2_W.word(sl2_word(w.matrix())) == D2_W.word(w)


@given(words2)
def test_word_independence_genus2(w):
    assert A2_W.word(sp4_word(w.matrix())) == A2_W.word(w)


@given(words2)
def test_unitary_and_dual_genus2(w):
    R = D2_W.word(w)
    assert (R @ R.adjoint()).is_identity()
    assert R.conjugate() == D2_W.word(w.tilde())
