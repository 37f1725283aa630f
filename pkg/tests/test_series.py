import warnings

import numpy as np
import pytest

from weilzeta.discriminant import A2, A2_A2, discriminant_form
from weilzeta.errors import ConvergenceRegionViolation, PoleProximity, WeightParityViolation
from weilzeta.hecke import trivial_module
from weilzeta.series import (e2_diagonal_trivial, eisenstein, eisenstein_negarg,
                             eisenstein_series_level_one, lipschitz_sum, phi, poincare_kernel_array,
                             poincare_plus, pullback_sides)
from weilzeta.weil import S, T, weil_of

A2A2 = discriminant_form(A2_A2)
TRIVIAL = trivial_module()


def test_phi_and_parity():
    assert phi(2j, 4, 0) == pytest.approx(1 / 16)
    assert phi(3.0, 2, 1) == pytest.approx(1 / 81)
    with pytest.raises(WeightParityViolation):
        eisenstein(discriminant_form(A2), 1, 4, 0, 1j, 2)


def test_convergence_warning():
    with pytest.warns(ConvergenceRegionViolation):
        eisenstein(A2A2, 1, 4, -2, 1j, 2)


def test_trivial_module_matches_q_expansion():
    for tau in (0.2 + 1.1j, -0.4 + 0.95j, 2j):
        series = eisenstein(TRIVIAL, 1, 12, 0, tau, 60).coords[0]
        qexp = eisenstein_series_level_one(12, np.array([tau]))[0]
        assert abs(series - qexp) < 1e-9


@pytest.mark.parametrize("tau", [2j, 0.3 + 1.2j])
def test_genus1_modularity(tau):
    W = weil_of(A2A2)
    rT, rS = W.word(T(1)).to_complex(), W.word(S()).to_complex()
    res = []
    for h in (20, 40):
        E = eisenstein(A2A2, 1, 4, 0, tau, h).coords
        res.append(np.abs(eisenstein(A2A2, 1, 4, 0, tau + 1, h).coords - rT @ E).max())
        assert np.abs(eisenstein(A2A2, 1, 4, 0, -1 / tau, h).coords - tau ** 4 * rS @ E).max() < 1e-10
    assert res[1] < res[0] and res[1] < 1e-5


def test_dual_series_transforms_with_conjugate():
    W = weil_of(A2A2)
    rT = W.word(T(1)).to_complex()
    tau = 0.3 + 1.2j
    E = eisenstein(A2A2, 1, 4, 0, tau, 40, dual=True).coords
    Et = eisenstein(A2A2, 1, 4, 0, tau + 1, 40, dual=True).coords
    assert np.abs(Et - rT.conj() @ E).max() < 1e-5


def test_negative_argument_variants_agree_on_genus2():
    Z = np.diag([1.3j, 1.6j])
    a = eisenstein_negarg(TRIVIAL, 2, 12, 0, Z, 1, variant="conj").coords
    b = eisenstein_negarg(TRIVIAL, 2, 12, 0, Z, 1, variant="neg").coords
    assert np.allclose(a, b, atol=1e-10)


def test_genus2_box_structured_and_fast_path_agree():
    tau, zeta = 1.5j, 1.5j
    Z = np.diag([tau, zeta])
    box = eisenstein(TRIVIAL, 2, 12, 0, Z, 2).coords[0]
    structured = eisenstein(TRIVIAL, 2, 12, 0, Z, 3, method="structured").coords[0]
    fast = e2_diagonal_trivial(12, np.array([tau]), zeta)[0]
    assert abs(structured - fast) < 1e-7
    assert abs(box - fast) < 1e-4


def test_lipschitz_sum_against_direct_sum():
    x = np.array([0.3 + 0.7j, -0.1 + 1.5j])
    n = np.arange(-4000, 4001)
    direct = np.sum((x[:, None] + n) ** -12, axis=1)
    assert np.allclose(lipschitz_sum(x, 12, np.zeros(1), 40)[:, 0], direct, rtol=1e-10)


def test_poincare_vectorised_matches_scalar():
    t0 = 0.3 + 1.2j
    a = poincare_kernel_array(TRIVIAL, 12, np.array([t0]), -1j, 6)[0, 0, 0]
    b = poincare_plus(TRIVIAL, 12, 0, t0, -1j, 6, method="lipschitz").coords[0]
    assert abs(a - b) < 1e-12 * max(1, abs(b))


def test_poincare_pole():
    with pytest.raises(PoleProximity):
        poincare_plus(TRIVIAL, 12, 0, 1j, 1j, 2)


def test_pullback_trivial_module():
    sides = pullback_sides(TRIVIAL, 12, 0, 1.5j, 1.5j, 8, 1, method="lipschitz")
    assert (sides["lhs"] - sides["rhs"]).norm_inf() < 1e-4
    # the tensor term alone misses the correction
    assert abs(sides["correction"]).max() > 1e-6
