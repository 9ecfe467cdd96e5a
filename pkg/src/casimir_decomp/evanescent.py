"""Evanescent-wave part of the Casimir pressure on the real frequency axis.

    P_evan = -(hbar / 2 pi^2) int_0^inf dw coth(hbar w / 2 k_B T)
             int_{w/c}^inf dk k q Im[r^2 e^{-2aq} / (1 - r^2 e^{-2aq})]

With ``k dk = q dq`` the inner integral runs over real ``q`` in (0, inf).
Both integrals are done on logarithmic variables: ``ln w`` outside and
``ln(2 a q)`` inside, each with adaptive Gauss-Kronrod panels.

For a Drude metal the integrand decays only like ``1/w`` at large ``w``
(near-grazing evanescent waves keep reflecting), so the frequency integral
is cut at ``omega_max_factor * omega_p``; the density per e-fold at the
cutoff is reported so that the cutoff sensitivity is visible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import C, HBAR, K_B
from .dielectric import DielectricModel, Plasma, Tabulated, susceptibility_real, tail_model
from .errors import CapabilityError, ConvergenceError, DomainError
from .matsubara import GeometryThermal
from .quadrature import QuadratureConfig, gauss_kronrod
from .reflection import Polarization

PREFACTOR = -HBAR / (2 * math.pi**2)

# resonance pre-scan resolution (points per unit of ln y)
_SCAN_DENSITY = 24


@dataclass(frozen=True)
class EvanescentResult:
    value: float
    est_error: float
    omega_cutoff_low: float
    omega_cutoff_high: float
    uv_density_per_efold: float = 0.0


def _coth(x):
    return 1.0 / np.tanh(x)


def _im_ratio(pol: Polarization, chi, omega, q, y):
    """Im[x / (1 - x)] with x = r^2 e^{-y}, in cancellation-free form.

    ``chi = eps - 1`` (complex, broadcastable), ``q`` real > 0, ``y = 2 a q``.
    """
    k0sq = (omega / C) ** 2
    p = np.sqrt(q * q - chi * k0sq)  # p^2 = q^2 + (1 - eps) w^2/c^2, principal branch
    if pol is Polarization.TM:
        eq = (1.0 + chi) * q
        one_minus_r2 = 4 * eq * p / (eq + p) ** 2
    else:
        one_minus_r2 = 4 * q * p / (q + p) ** 2
    e = np.exp(-y)
    im_x = -e * one_minus_r2.imag
    one_minus_x = -np.expm1(-y) + e * one_minus_r2
    return im_x / (one_minus_x.real**2 + one_minus_x.imag**2)


def _check_model(model):
    if isinstance(model, Tabulated):
        return tail_model(model)
    return model


def evanescent_integrand(model: DielectricModel, pol, omega, q, g: GeometryThermal):
    """Spectral density of the evanescent pressure, Pa s m.

    Integrating over ``omega`` in (0, inf) and ``q`` in (0, inf) gives
    :func:`evanescent_pressure`; the ``-hbar / 2 pi^2`` prefactor and the
    ``coth`` weight are included.
    """
    pol = Polarization.parse(pol)
    w = np.asarray(omega, dtype=float)
    qq = np.asarray(q, dtype=float)
    if np.any(~np.isfinite(w)) or np.any(w <= 0):
        raise DomainError("omega must be > 0")
    if np.any(~np.isfinite(qq)) or np.any(qq <= 0):
        raise DomainError("q must be > 0")
    if isinstance(model, Tabulated) and np.any(w >= model.table.omega_min):
        raise CapabilityError("real-axis permittivity undefined inside the tabulated range")
    m = _check_model(model)
    if isinstance(m, Plasma):
        return np.zeros(np.broadcast(w, qq).shape)[()]
    chi = susceptibility_real(m, w)
    weight = _coth(HBAR * w / (2 * K_B * g.T))
    out = PREFACTOR * weight * qq * qq * _im_ratio(pol, chi, w, qq, 2 * g.a * qq)
    return out[()]


class _InnerIntegral:
    """q-integral at fixed omega, integrated in s = ln(2 a q)."""

    def __init__(self, model, pol, g, cfg):
        self.model = model
        self.pol = pol
        self.a = g.a
        self.T = g.T
        self.cfg = cfg
        self.s_hi = math.log(cfg.q_exponent_max)
        self.rel_tol = cfg.rel_tol * 0.1
        self.evaluations = 0

    def _integrand(self, omega, chi):
        a, pol = self.a, self.pol

        def f(s):
            y = np.exp(s)
            q = y / (2 * a)
            # dq = y ds / 2a
            return q * q * _im_ratio(pol, chi, omega, q, y) * y / (2 * a)
        return f

    def _breakpoints(self, omega, chi, s_lo):
        """Edges bracketing the guided-mode resonances (minima of |1 - x|)."""
        n = max(64, int(_SCAN_DENSITY * (self.s_hi - s_lo)))
        s = np.linspace(s_lo, self.s_hi, n)
        y = np.exp(s)
        q = y / (2 * self.a)
        p = np.sqrt(q * q - chi * (omega / C) ** 2)
        if self.pol is Polarization.TM:
            eq = (1.0 + chi) * q
            d = 4 * eq * p / (eq + p) ** 2
        else:
            d = 4 * q * p / (q + p) ** 2
        gap = np.abs(-np.expm1(-y) + np.exp(-y) * d)
        inner = (gap[1:-1] < gap[:-2]) & (gap[1:-1] <= gap[2:]) & (gap[1:-1] < 0.5)
        idx = np.nonzero(inner)[0] + 1
        if idx.size == 0:
            return np.empty(0)
        return np.concatenate([s[idx - 1], s[idx], s[idx + 1]])

    def __call__(self, omega: float):
        """Return (value, error) of the q-integral, in Pa s (per unit omega, no prefactor)."""
        chi = complex(susceptibility_real(tail_model(self.model), omega))
        y_ref = min(1.0, 2 * self.a * omega / C)
        s_lo = math.log(1e-4 * y_ref)
        f = self._integrand(omega, chi)
        n_init = max(8, int(math.ceil(self.s_hi - s_lo)))
        edges = np.concatenate([
            np.linspace(s_lo, self.s_hi, n_init + 1)[1:-1],
            self._breakpoints(omega, chi, s_lo),
        ])
        res = gauss_kronrod(
            f, s_lo, self.s_hi, rel_tol=self.rel_tol, abs_tol=0.0,
            max_panels=self.cfg.max_subdivisions, breakpoints=edges, l1_norm=True,
        )
        self.evaluations += res.n_panels
        if not res.converged:
            raise ConvergenceError(
                f"q-integral did not converge at omega={omega:.6g} rad/s",
                omega=omega, value=res.value, error=res.error, panels=res.n_panels,
            )
        # below s_lo the integrand (in s) falls off like y^2
        edge = abs(float(f(np.array([s_lo]))[0]))
        return res.value, res.error + 0.5 * edge


def _outer_density(inner: _InnerIntegral, T: float):
    """Integrand in sigma = ln(omega), with per-node errors, excluding the prefactor."""
    def f(sig):
        flat = sig.ravel()
        vals = np.empty_like(flat)
        errs = np.empty_like(flat)
        for i, s in enumerate(flat):
            w = math.exp(s)
            v, e = inner(w)
            weight = w / math.tanh(HBAR * w / (2 * K_B * T))
            vals[i] = weight * v
            errs[i] = weight * e
        return vals.reshape(sig.shape), errs.reshape(sig.shape)
    return f


def evanescent_pressure(model: DielectricModel, pol, g: GeometryThermal,
                        cfg: QuadratureConfig = QuadratureConfig()) -> EvanescentResult:
    """Evanescent contribution of one polarization, in Pa.

    Zero for the plasma model (its reflection coefficients are real for
    evanescent waves). For tabulated models the real-axis permittivity is the
    extrapolation tail, so the frequency window ends at the first tabulated
    sample.
    """
    pol = Polarization.parse(pol)
    m = tail_model(model)
    if isinstance(m, Plasma):
        return EvanescentResult(0.0, 0.0, 0.0, 0.0)

    w_lo = cfg.omega_min_factor * m.gamma
    w_hi = cfg.omega_max_factor * m.omega_p
    if isinstance(model, Tabulated):
        w_hi = min(w_hi, model.table.omega_min * (1 - 1e-12))
        if w_hi <= w_lo:
            raise CapabilityError(
                "tabulated model leaves no tail window for the real-frequency integral "
                f"(first sample {model.table.omega_min:.6g} rad/s <= omega_low {w_lo:.6g})"
            )
    if w_hi <= w_lo:
        raise DomainError("empty frequency window: raise omega_max_factor or lower omega_min_factor")

    inner = _InnerIntegral(model, pol, g, cfg)
    f = _outer_density(inner, g.T)
    panel = cfg.log_grid_decades_per_panel * math.log(10)

    def integrate(lo, hi):
        n = max(1, int(math.ceil((hi - lo) / panel)))
        res = gauss_kronrod(
            f, lo, hi, rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol / abs(PREFACTOR),
            max_panels=cfg.max_subdivisions, initial_panels=n, l1_norm=True,
        )
        if not res.converged:
            raise ConvergenceError(
                "frequency integral of the evanescent pressure did not converge",
                value=PREFACTOR * res.value, error=abs(PREFACTOR) * res.error,
                panels=res.n_panels,
            )
        return res

    sig_hi = math.log(w_hi)
    sig_lo = math.log(w_lo)
    res = integrate(sig_lo, sig_hi)
    total, error = res.value, res.error

    # Extend the window downward while the part below omega_low is not negligible.
    # The density per unit omega has a finite limit at 0; it is extrapolated from
    # omega_low and omega_low / 2.
    while True:
        d1, e1 = (x / math.exp(sig_lo) for x in f(np.array([[sig_lo]])))
        d2, e2 = (x / math.exp(sig_lo - math.log(2)) for x in f(np.array([[sig_lo - math.log(2)]])))
        d1, d2 = float(d1.ravel()[0]), float(d2.ravel()[0])
        w0 = math.exp(sig_lo)
        d0 = 2 * d2 - d1
        tail = 0.5 * w0 * (d0 + d1)
        tail_err = 0.5 * w0 * abs(d1 - d0) + 0.5 * w0 * (float(e1.ravel()[0]) + float(e2.ravel()[0]))
        if abs(tail) <= 0.1 * cfg.rel_tol * max(abs(total), 1e-300) or sig_lo < math.log(1e-300) + 50:
            break
        new_lo = sig_lo - 3 * math.log(10)
        ext = integrate(new_lo, sig_lo)
        total += ext.value
        error += ext.error
        sig_lo = new_lo
    total += tail
    error += tail_err

    uv_val, _ = f(np.array([[sig_hi]]))
    return EvanescentResult(
        value=float(PREFACTOR * total),
        est_error=float(abs(PREFACTOR) * error),
        omega_cutoff_low=math.exp(sig_lo),
        omega_cutoff_high=w_hi,
        uv_density_per_efold=float(PREFACTOR * uv_val.ravel()[0]),
    )
