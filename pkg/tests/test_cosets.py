from math import gcd

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from weilzeta.checks import coset_suite
from weilzeta.cosets import (borel_equivalent, complete_row, count_inequivalent_violations,
                             ell_bijection_check, gamma1d_cosets, genus1_cosets, genus2_cosets,
                             hecke_count_bruteforce, hecke_right_cosets, index_gamma0, offdiag_cosets,
                             pair_classes_bruteforce, row_hnf, structured_class_forms)
from weilzeta.weil import is_symplectic, mat_det


def dedekind_psi(n: int) -> int:
    out, m, p = n, n, 2
    while p <= m:
        if m % p == 0:
            out = out * (p + 1) // p
            while m % p == 0:
                m //= p
        p += 1
    return out


def test_suite_passes():
    assert all(r.passed for r in coset_suite(heights=(1, 2, 3), ds=(1, 2, 3), genus2_heights=(1,)))


@pytest.mark.parametrize("d", [1, 2, 3, 4, 5, 6])
def test_hecke_count_is_psi_of_d_squared(d):
    reps = hecke_right_cosets(d)
    assert len(reps) == dedekind_psi(d * d)
    for (a, b), (c0, c) in reps:
        assert c0 == 0 and a * c == d * d and gcd(gcd(a, b), c) == 1 and 0 <= b < c


@pytest.mark.parametrize("d", [1, 2, 3])
def test_hecke_count_matches_box_scan(d):
    assert len(hecke_right_cosets(d)) == hecke_count_bruteforce(d)


def test_hecke_scaled_variant_has_determinant_one():
    for m in hecke_right_cosets(3, variant="D"):
        assert m[0][0] * m[1][1] - m[0][1] * m[1][0] == 1


def test_genus1_representatives_pairwise_inequivalent():
    reps = genus1_cosets(4).representatives
    assert len(reps) == 24
    for i, g in enumerate(reps):
        assert mat_det(g) == 1
        for h in reps[i + 1:]:
            assert not borel_equivalent(g, h)


def test_genus2_reps_are_symplectic_and_inequivalent():
    reps = genus2_cosets(1).representatives
    assert len(reps) == len(pair_classes_bruteforce(1)) == 68
    assert all(is_symplectic(m) for m in reps)
    assert count_inequivalent_violations(reps) == 0


def test_structured_forms_cover_box_classes():
    box = {row_hnf([c[0] + d[0], c[1] + d[1]]) for c, d in
           (((m[2][:2], m[3][:2]), (m[2][2:], m[3][2:])) for m in genus2_cosets(1).representatives)}
    forms = structured_class_forms(u_bound=2, c_bound=2, det_bound=2, window=2)
    assert box <= set(forms)


@pytest.mark.parametrize("d", [2, 3])
def test_index_sets_and_involution(d):
    assert len(gamma1d_cosets(d)) == len(offdiag_cosets(d)) == index_gamma0(d * d)
    assert ell_bijection_check(d)


@given(st.integers(-30, 30), st.integers(-30, 30))
def test_complete_row(c, d):
    if gcd(c, d) != 1:
        with pytest.raises(ValueError):
            complete_row(c, d)
        return
    g = complete_row(c, d)
    assert mat_det(g) == 1 and g[1] == (c, d)


def test_invalid_arguments():
    with pytest.raises(ValueError):
        hecke_right_cosets(0)
    with pytest.raises(ValueError):
        genus1_cosets(0)
