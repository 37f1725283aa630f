import math
import warnings

import mpmath
import pytest
import sympy as sp

from weilzeta.discriminant import A2, A2_A2, D2_DIAG, E8, discriminant_form, kronecker
from weilzeta.errors import DivergenceSuspected, GammaPole, InvalidPartition, UnsupportedRank
from weilzeta.zeta import (ENTRIES, I0, I0_I1, ID, SWAP, EigenvalueSeries, K_p, K_p_explicit, Y,
                           chi_V, completed_zeta, delta_p, functional_scalar, kappa_p,
                           local_factor_table, p_part_type, reproducing_constant, siegel_gamma,
                           standard_zeta, standard_zeta_with_tail, xi_constant)

A2A2 = discriminant_form(A2_A2)
DELTA_EIGS = {1: 1, 2: -624, 3: -19188, 4: 155904, 5: -1410594, 6: 11973312}


def test_entry_set():
    assert len(ENTRIES) == 7
    assert (SWAP, I0_I1, 0) not in ENTRIES     # swap does not preserve the singleton blocks


def test_invalid_partition_and_rank():
    with pytest.raises(InvalidPartition):
        kappa_p(3, SWAP, I0_I1, 0)
    with pytest.raises(InvalidPartition):
        kappa_p(3, ID, I0, 5)
    with pytest.raises(UnsupportedRank):
        p_part_type(discriminant_form(sp_lattice_9()), 3)


def sp_lattice_9():
    from weilzeta.discriminant import EvenLattice
    return EvenLattice(((2, 1), (1, 14)))        # det 27: Z/27 has no (Z/p)^k form


def test_p_part_types():
    assert p_part_type(A2A2, 3) == 2
    assert p_part_type(discriminant_form(A2), 3) == 1
    assert p_part_type(A2A2, 5) == 0


def test_delta_vanishing_rules():
    assert delta_p(3, ID, I0, 0, 4) == 1
    assert delta_p(3, ID, I0, 1, 4, p_rank=1) == 0


@pytest.mark.parametrize("p", [3, 5, 7])
@pytest.mark.parametrize("entry", [(ID, I0, 0), (SWAP, I0, 0)])
def test_general_and_explicit_agree_on_k0(p, entry):
    v = K_p(p, *entry, 4)
    assert v.identical()


def test_known_local_values_p3():
    assert K_p(3, ID, I0, 0, 4).at(2) == sp.Rational(8, 39)
    assert K_p(3, SWAP, I0, 0, 4).at(2) == sp.Rational(2, 39)


def test_bracket_vanishes_only_at_p3():
    # the (id, I0+I1, 1) general entry carries -(2/p) + (-1/p) style brackets
    assert K_p(3, ID, I0_I1, 1, 4).identical()
    assert not K_p(5, ID, I0_I1, 1, 4).identical()


def test_table_rows():
    rows = local_factor_table((3,), 4)
    assert [r["equal"] for r in rows] == [True, False, False, True, False, True, False]


def test_siegel_gamma():
    s = mpmath.mpf("2.3")
    assert siegel_gamma(2, s) == pytest.approx(
        float(mpmath.sqrt(mpmath.pi) * mpmath.gamma(s) * mpmath.gamma(s - 0.5)))
    with pytest.raises(GammaPole):
        siegel_gamma(2, 0.5)


def test_chi_v():
    assert chi_V(A2A2, 5) == kronecker(9, 5) == 1
    assert chi_V(discriminant_form(A2), 5) == kronecker(-3, 5) == -1


def xi_oracle(l, s, fqm, bound):
    """Direct float evaluation of the archimedean factor times the truncated Euler ratio."""
    n = 2
    rho = 1.5
    a, b = (s + rho + l) / 2, (s + rho - l) / 2
    g2 = lambda x: math.sqrt(math.pi) * math.gamma(x) * math.gamma(x - 0.5)      # noqa: E731
    pre = (-1) ** (l // 2) * 2 ** ((1 - s) * n) * math.pi ** 3 / fqm.order
    val = pre * g2(s) / (g2(a) * g2(b))
    for p in sp.primerange(2, bound + 1):
        if fqm.order % p == 0:
            continue
        chi = kronecker(fqm.gram_det, int(p))
        num = (1 - chi * p ** (-(s + rho - 2))) / (1 - p ** (-(2 * s)))
        den = (1 - chi * p ** (-(s + rho))) / (1 - p ** (-(2 * s + 1)))
        val *= num / den
    return val


def test_xi_against_direct_evaluation():
    for s in (3.0, 4.5):
        assert xi_constant(4, s, A2A2, 200).real == pytest.approx(xi_oracle(4, s, A2A2, 200), rel=1e-12)


def test_xi_stability_and_gamma_zero():
    a = xi_constant(4, 3, A2A2, 1000)
    b = xi_constant(4, 3, A2A2, 2000)
    assert abs(a - b) / abs(b) < 1e-4
    # beta = (s + 3/2 - l)/2 = -3 is a pole of Gamma_2, so 1/Gamma_2(beta) = 0
    assert xi_constant(12, 4.5, discriminant_form(E8), 100) == 0


def test_functional_scalar_warns_off_hypothesis():
    with pytest.warns(UserWarning):
        functional_scalar(4, 3, discriminant_form(D2_DIAG), 50)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert functional_scalar(4, 3, A2A2, 1000).real == pytest.approx(7.3145e-4, rel=1e-4)


def test_eigenvalue_file_roundtrip(tmp_path):
    e = EigenvalueSeries({d: complex(v) for d, v in DELTA_EIGS.items()})
    e.write(tmp_path / "eigs.txt")
    assert EigenvalueSeries.read(tmp_path / "eigs.txt").values == e.values
    with pytest.raises(ValueError):
        EigenvalueSeries({1: 2.0})


def test_standard_zeta_and_divergence():
    e = EigenvalueSeries({d: complex(v) for d, v in DELTA_EIGS.items()})
    direct = sum(v * d ** -20.0 for d, v in DELTA_EIGS.items())
    z, tail = standard_zeta_with_tail(e, 20)
    assert z == pytest.approx(direct) and tail < 1e-8
    with pytest.raises(DivergenceSuspected):
        standard_zeta(e, 5)


def test_reproducing_constants():
    assert reproducing_constant(12, 0) == pytest.approx(math.pi / 1024)
    assert reproducing_constant(12, 0, "classical") == pytest.approx(math.pi / 5632)


def test_completed_zeta_readings():
    e = EigenvalueSeries({d: complex(v) for d, v in DELTA_EIGS.items()})
    E = discriminant_form(E8)
    classical = completed_zeta(e, 12, 0, E, "classical")
    assert classical == pytest.approx(math.pi / 5632 * standard_zeta(e, 20))
    assert completed_zeta(e, 12, 0, E) == pytest.approx(math.pi / 1024 * standard_zeta(e, 12))


def test_explicit_expression_is_rational_in_Y():
    expr = K_p_explicit(5, ID, I0_I1, 2, 4)
    assert expr.free_symbols <= {Y}
