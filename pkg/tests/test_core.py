import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from morqw.core import (
    DensityMatrix,
    MultiPhotonViolation,
    NegativeRate,
    NonPhysical,
    NonPositiveGamma,
    ParameterError,
    RATE_FIELDS,
    SystemParams,
    validate_params,
    zeeman_from_field,
)


def test_baseline_is_accepted():
    p = SystemParams(
        omega_plus=1, omega_minus=1, omega_1=1, omega_2=-1, phi=0,
        delta_p=0, delta_pi=0, delta_b=9,
        gamma_31=0.01, gamma_42=0.01, gamma_32=1, gamma_41=1, gamma_d_43=0.05,
    )
    assert validate_params(p) is p
    assert p == SystemParams.baseline()


def test_all_zero_is_accepted():
    p = SystemParams()
    assert validate_params(p) is p


def test_detuning_mismatch_rejected():
    with pytest.raises(MultiPhotonViolation):
        validate_params(SystemParams(delta_p=0.0, delta_pi=1.0))


@pytest.mark.parametrize("name", RATE_FIELDS)
def test_negative_rate_rejected(name):
    with pytest.raises(NegativeRate):
        validate_params(SystemParams(**{name: -1e-3}))


def test_non_finite_rejected():
    with pytest.raises(ParameterError):
        validate_params(SystemParams(delta_b=math.nan))


rates = st.floats(0, 10, allow_nan=False)


@given(
    g31=rates, g32=rates, g41=rates, g42=rates,
    d21=rates, d31=rates, d32=rates, d41=rates, d42=rates, d43=rates,
)
def test_derived_dephasing_totals(g31, g32, g41, g42, d21, d31, d32, d41, d42, d43):
    p = SystemParams(
        gamma_31=g31, gamma_32=g32, gamma_41=g41, gamma_42=g42,
        gamma_d_21=d21, gamma_d_31=d31, gamma_d_32=d32,
        gamma_d_41=d41, gamma_d_42=d42, gamma_d_43=d43,
    )
    g3, g4 = g31 + g32, g41 + g42
    assert p.Gamma_21 == d21
    assert p.Gamma_31 == g3 + d31
    assert p.Gamma_32 == g3 + d32
    assert p.Gamma_41 == g4 + d41
    assert p.Gamma_42 == g4 + d42
    assert p.Gamma_43 == g3 + g4 + d43
    assert validate_params(validate_params(p)) == p


def test_symmetric_constructor_uses_opposite_control_couplings():
    p = SystemParams.symmetric(omega=0.5, omega_pi=2.0, delta=3.0)
    assert (p.omega_plus, p.omega_minus) == (0.5, 0.5)
    assert (p.omega_1, p.omega_2) == (2.0, -2.0)
    assert p.delta_p == p.delta_pi == 3.0
    assert p.delta_lh == 0.0


def test_zeeman_zero_field():
    assert zeeman_from_field(0.0, -1.3, -0.4) == (0.0, 0.0)


def test_zeeman_one_tesla():
    delta_b, delta_lh = zeeman_from_field(1.0, g_s=-1.0, g_j=0.0, gamma_hz=1e11)
    assert delta_b == pytest.approx(0.87941, rel=1e-12)
    assert delta_lh == 0.0


def test_zeeman_ten_tesla_is_about_ten_gamma():
    delta_b, _ = zeeman_from_field(10.0, g_s=-1.14, g_j=0.0, gamma_hz=1e11)
    assert delta_b == pytest.approx(10.025274, rel=1e-9)
    assert 10.0 < delta_b < 10.1


def test_zeeman_rejects_non_positive_gamma():
    with pytest.raises(NonPositiveGamma):
        zeeman_from_field(1.0, -1.0, 0.0, gamma_hz=0.0)


@given(st.floats(-20, 20), st.floats(-3, 3), st.floats(-3, 3), st.floats(-20, 20))
def test_zeeman_linear_and_odd(b, g_s, g_j, b2):
    db, dlh = zeeman_from_field(b, g_s, g_j)
    mdb, mdlh = zeeman_from_field(-b, g_s, g_j)
    assert (mdb, mdlh) == (-db, -dlh)
    sdb, sdlh = zeeman_from_field(b + b2, g_s, g_j)
    db2, dlh2 = zeeman_from_field(b2, g_s, g_j)
    assert sdb == pytest.approx(db + db2, abs=1e-9)
    assert sdlh == pytest.approx(dlh + dlh2, abs=1e-9)


def test_density_matrix_vec_is_row_major():
    arr = np.arange(16).reshape(4, 4).astype(complex)
    rho = DensityMatrix(arr)
    assert rho.vec()[4 * (3 - 1) + (2 - 1)] == rho.element(3, 2) == 9
    assert DensityMatrix.from_vector(rho.vec()) == rho


def test_density_matrix_check():
    DensityMatrix.diagonal([0.25] * 4).check()
    with pytest.raises(NonPhysical):
        DensityMatrix.diagonal([0.5, 0.5, 0.5, 0.0]).check()
    bad = np.diag([0.5, 0.5, 0, 0]).astype(complex)
    bad[0, 1] = 0.1j
    with pytest.raises(NonPhysical):
        DensityMatrix(bad).check()
    with pytest.raises(NonPhysical):
        DensityMatrix.diagonal([1.5, -0.5, 0, 0]).check()


def test_density_matrix_is_read_only():
    rho = DensityMatrix.diagonal([1, 0, 0, 0])
    with pytest.raises(ValueError):
        rho.rho[0, 0] = 0
