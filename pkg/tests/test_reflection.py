import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from casimir_decomp.constants import C
from casimir_decomp.dielectric import AU_GAMMA, AU_OMEGA_P, Drude, Plasma, eval_imag, eval_real
from casimir_decomp.errors import DomainError, NumericalDegeneracyError
from casimir_decomp.reflection import (
    Kinematics,
    Polarization,
    branch_sqrt,
    fresnel,
    kinematics_imag,
    kinematics_real,
    r_te_zero_freq,
    r_tm_zero_freq,
    reflection_coefficient,
)

XI1 = 2.4683e14


def test_polarization_parse():
    assert Polarization.parse("tm") is Polarization.TM
    assert Polarization.parse(Polarization.TE) is Polarization.TE
    assert len(Polarization) == 2
    with pytest.raises(DomainError):
        Polarization.parse("xy")


def test_branch_sqrt():
    assert branch_sqrt(4.0) == 2.0
    assert branch_sqrt(-4.0) == pytest.approx(-2j)
    z = branch_sqrt(-1 + 1e-3j)
    assert z.real >= 0


# --- real axis ---------------------------------------------------------------

def test_kinematics_real_examples():
    assert kinematics_real(0.0, 3.0, 5.0).q == pytest.approx(3.0)
    w = 1e15
    kin = kinematics_real(w, 2 * w / C, 2.0)
    assert kin.q == pytest.approx(math.sqrt(3) * w / C, rel=1e-14)


def test_kinematics_real_evanescent_drude(au_drude):
    w = AU_GAMMA
    eps = eval_real(au_drude, w)
    k = 1.01 * w / C
    kin = kinematics_real(w, k, eps)
    assert kin.q.imag == 0 and kin.q.real > 0
    assert kin.p.real > 0 and kin.p.imag != 0
    assert kin.p**2 == pytest.approx(k * k - eps * (w / C) ** 2, rel=1e-12)


def test_kinematics_real_propagating_branch():
    w = 1e15
    kin = kinematics_real(w, 0.5 * w / C, 1.0)
    assert kin.q.real == 0 and kin.q.imag < 0


# --- imaginary axis ----------------------------------------------------------

def test_kinematics_imag_examples(au_drude):
    kin = kinematics_imag(0.0, 7.0, 100.0)
    assert kin.q == kin.p == 7.0
    kin = kinematics_imag(1e15, 0.0, 4.0)
    assert kin.p == pytest.approx(2 * kin.q) and kin.q == pytest.approx(1e15 / C)
    eps = eval_imag(au_drude, XI1)
    kin = kinematics_imag(XI1, XI1 / C, eps)
    assert kin.q == pytest.approx(1.164e6, rel=1e-3)
    assert kin.p == pytest.approx(4.148e7, rel=1e-3)


def test_kinematics_imag_rejects_eps_below_one():
    with pytest.raises(DomainError):
        kinematics_imag(1e14, 1.0, 0.5)


@given(st.floats(0, 1e17), st.floats(0, 1e9), st.floats(1, 1e8))
def test_kinematics_imag_branch_consistency(xi, k, eps):
    kin = kinematics_imag(xi, k, eps)
    k0 = (xi / C) ** 2
    assert kin.q**2 == pytest.approx(k * k + k0, rel=1e-12, abs=1e-300)
    assert kin.p**2 == pytest.approx(k * k + eps * k0, rel=1e-12, abs=1e-300)
    assert kin.p >= kin.q >= k


# --- Fresnel -----------------------------------------------------------------

def test_fresnel_vacuum():
    kin = kinematics_imag(1e15, 1e6, 1.0)
    assert fresnel(Polarization.TM, 1.0, kin) == 0
    assert fresnel(Polarization.TE, 1.0, kin) == 0


def test_fresnel_example(au_drude):
    eps = eval_imag(au_drude, XI1)
    kin = kinematics_imag(XI1, XI1 / C, eps)
    assert fresnel("TE", eps, kin) == pytest.approx(-0.9454, abs=2e-4)


def test_fresnel_high_frequency_vanishes(au_drude):
    xi = 1e20
    eps = eval_imag(au_drude, xi)
    kin = kinematics_imag(xi, 1e6, eps)
    assert abs(fresnel("TM", eps, kin)) < 1e-6
    assert abs(fresnel("TE", eps, kin)) < 1e-6


def test_fresnel_degenerate_denominator():
    with pytest.raises(NumericalDegeneracyError):
        fresnel("TE", 1.0, Kinematics(0.0, 0.0, 0.0))


@given(st.floats(1e10, 1e18), st.floats(0, 1e9), st.floats(1, 1e8))
def test_imag_axis_coefficient_bounds(xi, k, eps):
    kin = kinematics_imag(xi, k, eps)
    r_te = fresnel("TE", eps, kin)
    r_tm = fresnel("TM", eps, kin)
    assert -1 < r_te <= 0
    assert 0 <= r_tm < 1


def test_reflection_coefficient_vectorized():
    q = np.array([1.0, 2.0])
    p = np.array([3.0, 3.0])
    np.testing.assert_allclose(reflection_coefficient(Polarization.TE, 2.0, q, p),
                               [(1 - 3) / 4, (2 - 3) / 5])


# --- zero frequency ----------------------------------------------------------

def test_r_te_zero_freq(au_drude, au_plasma):
    assert r_te_zero_freq(au_drude, 1e6) == 0
    k = AU_OMEGA_P / C
    assert r_te_zero_freq(au_plasma, k) == pytest.approx((1 - math.sqrt(2)) / (1 + math.sqrt(2)))
    assert r_te_zero_freq(au_plasma, 1e-3) == pytest.approx(-1, abs=1e-9)
    assert r_te_zero_freq(au_plasma, 0.0) == -1


def test_r_tm_zero_freq(au_drude, au_plasma, vacuum):
    assert r_tm_zero_freq(au_drude, 1e6) == 1
    assert r_tm_zero_freq(au_plasma, 1e6) == 1
    assert r_tm_zero_freq(au_drude, 1e3) == r_tm_zero_freq(au_drude, 1e8) == 1
    assert r_tm_zero_freq(vacuum, 1e6) == 0
    with pytest.raises(DomainError):
        r_tm_zero_freq(au_drude, 0.0)


@pytest.mark.parametrize("model_name", ["drude", "plasma"])
def test_zero_frequency_continuity(model_name):
    model = Drude(AU_OMEGA_P, AU_GAMMA) if model_name == "drude" else Plasma(AU_OMEGA_P)
    k = 1e6
    xi = 1e2  # far below every scale in the problem
    eps = eval_imag(model, xi)
    kin = kinematics_imag(xi, k, eps)
    assert fresnel("TM", eps, kin) == pytest.approx(r_tm_zero_freq(model, k), abs=1e-6)
    assert fresnel("TE", eps, kin) == pytest.approx(r_te_zero_freq(model, k), abs=1e-6)
