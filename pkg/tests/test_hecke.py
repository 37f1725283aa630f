import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from weilzeta.cyclotomic import CycloNum, to_complex
from weilzeta.discriminant import A2, A2_A2, D2_DIAG, discriminant_form
from weilzeta.errors import FormatError, NotAnEigenform, TruncationTooCoarse, ZeroGaussSum
from weilzeta.hecke import (QExpansion, QuadratureSpec, classical_hecke_eigenvalue, delta_coefficients,
                            delta_expansion, delta_product, eigenvalue, eval_form, eval_form_array,
                            hecke_at_point, hecke_relation_scalar, petersson_product,
                            read_qexpansion, reduce_to_fundamental_domain, trivial_module,
                            write_qexpansion)

DELTA = delta_expansion(60)
COEFFS = delta_coefficients(400)
# Petersson norm of Delta over SL2(Z)\H with dx dy / y^2 (standard tabulated value)
DELTA_NORM = 1.035362056804320922e-6


def test_ramanujan_tau_values():
    assert COEFFS[:6] == [1, -24, 252, -1472, 4830, -6048]
    assert COEFFS[10] == 534612


def test_q_expansion_matches_eta_product():
    for tau in (0.1 + 0.9j, 1j, -0.3 + 1.5j):
        assert abs(eval_form(DELTA, tau).coords[0] - delta_product(tau)) < 1e-14


def test_reduction_lands_in_fundamental_domain():
    for tau in (0.37 + 0.01j, -3.2 + 0.2j, 0.49 + 0.5j):
        z, g = reduce_to_fundamental_domain(tau)
        assert abs(z.real) <= 0.5 + 1e-12 and abs(z) >= 1 - 1e-12
        (a, b), (c, d) = g
        assert a * d - b * c == 1
        assert abs((a * tau + b) / (c * tau + d) - z) < 1e-9


def test_reduced_evaluation_is_modular():
    tau = 0.21 + 0.05j
    ref = delta_product(tau)
    assert abs(eval_form(DELTA, tau, reduce=True).coords[0] - ref) < 1e-12 * abs(ref)


def test_truncation_too_coarse():
    with pytest.raises(TruncationTooCoarse):
        eval_form(delta_expansion(5), 0.3j)


def test_file_roundtrip(tmp_path):
    p = tmp_path / "delta.qexp"
    write_qexpansion(DELTA, p)
    g = read_qexpansion(p)
    assert g.weight == 12 and g.truncation == 60
    assert g.coefficient(0, 11) == COEFFS[10]


def test_exponent_validation():
    D = discriminant_form(A2_A2)
    with pytest.raises(FormatError):
        QExpansion(D, 4, {1: [(Fraction(1), 1.0)]}, 5)      # q(lambda) = 1/3, exponent must be in Z + 1/3
    with pytest.raises(FormatError):
        QExpansion(trivial_module(), 12, {0: [(Fraction(0), 1.0)]}, 5)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_operator_eigenvalue_matches_coefficient_oracle(d):
    exact = classical_hecke_eigenvalue(COEFFS, d, 12)
    assert abs(eigenvalue(DELTA, d) - float(exact)) < 1e-9 * abs(float(exact))


def test_eigenvalues_known_values():
    assert [int(classical_hecke_eigenvalue(COEFFS, d, 12)) for d in range(2, 7)] == \
        [-624, -19188, 155904, -1410594, 11973312]


@given(st.sampled_from([(2, 3), (2, 5), (3, 4), (4, 5), (3, 5), (2, 7)]))
def test_eigenvalues_multiplicative(pair):
    m, n = pair
    lam = lambda d: classical_hecke_eigenvalue(COEFFS, d, 12)      # noqa: E731
    assert lam(m) * lam(n) == lam(m * n)


def test_D_variant_is_scaled_Dprime_variant():
    # T(D) = (g_d/g) d^(4-l) T(D') for the trivial module
    z = 0.2 + 1.1j
    a = hecke_at_point(DELTA, 2, z, "D").coords[0]
    b = hecke_at_point(DELTA, 2, z, "Dprime").coords[0]
    assert abs(a - 2.0 ** (4 - 12) * b) < 1e-12 * abs(b)


def test_not_an_eigenform():
    terms = [(Fraction(n), complex(c + (7 if n == 3 else 0))) for n, c in enumerate(COEFFS[:60], 1)]
    f = QExpansion(trivial_module(), 12, {0: terms}, 60)
    with pytest.raises(NotAnEigenform):
        eigenvalue(f, 2)


def test_gauss_sum_ratios():
    A = discriminant_form(A2)
    r2 = hecke_relation_scalar(A, 2)
    assert r2.gd_over_g == CycloNum.rational(-1) and r2.kappa == CycloNum.one() and r2.root_of_unity
    r3 = hecke_relation_scalar(A, 3)
    assert complex(to_complex(r3.g_over_gd)) == pytest.approx(1j / math.sqrt(3))
    assert r3.kappa == CycloNum.rational(-1) and not r3.root_of_unity
    with pytest.raises(ZeroGaussSum):
        hecke_relation_scalar(discriminant_form(D2_DIAG), 2)


def test_quadrature_volume():
    assert QuadratureSpec(40, 40, 8.0).volume() == pytest.approx(math.pi / 3, rel=1e-12)


def test_petersson_norm_of_delta():
    q = QuadratureSpec(40, 40, 8.0)
    assert petersson_product(DELTA, DELTA, q).real == pytest.approx(DELTA_NORM, rel=1e-7)


def test_vectorised_evaluation():
    tau = np.array([0.1 + 1j, 0.4 + 2j])
    assert np.allclose(eval_form_array(DELTA, tau)[:, 0], delta_product(tau), atol=1e-15)
