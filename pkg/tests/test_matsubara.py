import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from casimir_decomp.constants import C, HBAR, K_B, ZETA3
from casimir_decomp.dielectric import AU_GAMMA, AU_OMEGA_P, Drude, Plasma, eval_imag
from casimir_decomp.errors import ConvergenceError, DomainError
from casimir_decomp.matsubara import (
    GeometryThermal,
    classical_limit,
    matsubara_frequency,
    matsubara_term,
    pressure_polarized,
)
from casimir_decomp.quadrature import QuadratureConfig
from casimir_decomp.reflection import Polarization


def test_geometry_validation():
    for a, T in [(0, 300), (-1e-6, 300), (1e-6, 0), (math.nan, 300)]:
        with pytest.raises(DomainError):
            GeometryThermal(a, T)


def test_matsubara_frequency():
    assert matsubara_frequency(300, 0) == 0
    assert matsubara_frequency(300, 1) == pytest.approx(2 * math.pi * K_B * 300 / HBAR, rel=1e-15)
    # quoted example 2.4683e14 agrees to its last digit within 3e-4
    assert matsubara_frequency(300, 1) == pytest.approx(2.4683e14, rel=3e-4)
    assert matsubara_frequency(300, 10) == pytest.approx(10 * matsubara_frequency(300, 1), rel=1e-15)
    with pytest.raises(DomainError):
        matsubara_frequency(300, -1)


def test_classical_limit_examples():
    g = GeometryThermal(1e-6, 300)
    assert classical_limit("drude", g) == pytest.approx(-1.9810e-4, rel=1e-4)
    assert classical_limit("plasma", g) == pytest.approx(-3.9620e-4, rel=1e-4)
    half = GeometryThermal(0.5e-6, 300)
    assert classical_limit("drude", half) == pytest.approx(8 * classical_limit("drude", g), rel=1e-14)
    assert classical_limit(Drude(AU_OMEGA_P, AU_GAMMA), g) == classical_limit("drude", g)
    with pytest.raises(DomainError):
        classical_limit("ideal", g)


def test_ideal_metal_surrogate_tm(cfg):
    g = GeometryThermal(20e-6, 300)
    p = pressure_polarized(Plasma(1e20), Polarization.TM, g, cfg)
    exact = -K_B * 300 * ZETA3 / (8 * math.pi * g.a**3)
    assert p.value == pytest.approx(exact, rel=1e-2)


def test_drude_te_small_at_20um(au_drude, cfg):
    g = GeometryThermal(20e-6, 300)
    p = pressure_polarized(au_drude, "TE", g, cfg)
    assert abs(p.value) < 0.02 * abs(classical_limit("drude", g))


def test_vacuum_is_zero(vacuum, cfg):
    g = GeometryThermal(1e-6, 300)
    for pol in Polarization:
        assert pressure_polarized(vacuum, pol, g, cfg).value == 0.0


def _oracle_term(model, pol, a, T, l):
    """Term l by scipy quad over k, straight from the Lifshitz integrand."""
    xi = 2 * math.pi * K_B * T * l / HBAR
    eps = eval_imag(model, xi)

    def f(k):
        q = math.sqrt(k * k + (xi / C) ** 2)
        p = math.sqrt(k * k + eps * (xi / C) ** 2)
        r = (eps * q - p) / (eps * q + p) if pol == "TM" else (q - p) / (q + p)
        x = r * r * math.exp(-2 * a * q)
        return k * q * x / (1 - x)

    scale = 1 / (2 * a)
    val = quad(f, 0, 80 * scale, epsrel=1e-12, limit=400, points=[scale])[0]
    return -(K_B * T / math.pi) * val


@pytest.mark.parametrize("pol", ["TM", "TE"])
@pytest.mark.parametrize("l", [1, 3, 20])
def test_term_matches_scipy_oracle(au_drude, cfg, pol, l):
    g = GeometryThermal(0.7e-6, 300)
    val, err = matsubara_term(au_drude, pol, g, l, cfg)
    assert val == pytest.approx(_oracle_term(au_drude, pol, g.a, g.T, l), rel=1e-8)
    assert err >= 0


@pytest.mark.parametrize("model", [Drude(AU_OMEGA_P, AU_GAMMA), Plasma(AU_OMEGA_P)])
@pytest.mark.parametrize("pol", ["TM", "TE"])
@pytest.mark.parametrize("l", [0, 1, 7])
def test_routes_agree(model, pol, l, cfg):
    g = GeometryThermal(1.3e-6, 300)
    v1, _ = matsubara_term(model, pol, g, l, cfg, route="substituted")
    v2, _ = matsubara_term(model, pol, g, l, cfg, route="direct")
    assert v1 == pytest.approx(v2, rel=cfg.rel_tol, abs=1e-300)


@given(st.floats(0.3e-6, 10e-6), st.floats(50, 600))
@settings(max_examples=10, deadline=None)
def test_terms_nonpositive_and_sums_monotone(a, T):
    g = GeometryThermal(a, T)
    for pol in Polarization:
        res = pressure_polarized(Drude(AU_OMEGA_P, AU_GAMMA), pol, g, QuadratureConfig())
        assert np.all(res.terms <= 0)
        assert np.all(np.diff(np.cumsum(res.terms)) <= 0)
        assert res.est_error >= 0
        assert res.value <= 0


def test_tm_drude_plasma_close(au_drude, au_plasma, cfg):
    for a in np.linspace(0.5e-6, 4e-6, 4):
        g = GeometryThermal(a, 300)
        d = pressure_polarized(au_drude, "TM", g, cfg).value
        p = pressure_polarized(au_plasma, "TM", g, cfg).value
        assert abs(d - p) / abs(p) < 5e-3


def test_gamma_continuity(au_plasma, cfg):
    g = GeometryThermal(1e-6, 300)
    small = Drude(AU_OMEGA_P, 1e-6 * AU_OMEGA_P)
    tm_d = pressure_polarized(small, "TM", g, cfg).value
    tm_p = pressure_polarized(au_plasma, "TM", g, cfg).value
    assert tm_d == pytest.approx(tm_p, rel=1e-4)
    te_d = pressure_polarized(small, "TE", g, cfg).value
    te_p = pressure_polarized(au_plasma, "TE", g, cfg).value
    half_l0 = 0.5 * matsubara_term(au_plasma, "TE", g, 0, cfg)[0]
    assert half_l0 < 0
    assert te_d - te_p == pytest.approx(-half_l0, rel=1e-3)


def test_doubling_subdivisions_within_error(au_drude, cfg):
    g = GeometryThermal(0.8e-6, 300)
    for pol in Polarization:
        a = pressure_polarized(au_drude, pol, g, cfg)
        b = pressure_polarized(au_drude, pol, g, replace(cfg, max_subdivisions=2 * cfg.max_subdivisions))
        assert abs(a.value - b.value) <= a.est_error


def test_convergence_error_carries_diagnostics(au_drude):
    cfg = QuadratureConfig(max_matsubara_terms=3)
    with pytest.raises(ConvergenceError) as info:
        pressure_polarized(au_drude, "TM", GeometryThermal(1e-6, 300), cfg)
    assert info.value.diagnostics["terms_used"] == 3


def test_deterministic(au_drude, cfg):
    g = GeometryThermal(1e-6, 300)
    a = pressure_polarized(au_drude, "TE", g, cfg)
    b = pressure_polarized(au_drude, "TE", g, cfg)
    assert a.value == b.value
