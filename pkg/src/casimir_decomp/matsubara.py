"""Casimir pressure per polarization from the Matsubara-frequency Lifshitz formula.

Each term ``l`` of the series is the transverse-momentum integral

    integral_0^inf k dk q_l r^2 e^(-2 a q_l) / (1 - r^2 e^(-2 a q_l)),

evaluated in the variable ``y = 2 a q_l`` where it becomes
``(1 / 8a^3) integral_{y_l}^inf y^2 r^2 e^-y / (1 - r^2 e^-y) dy`` with
``y_l = 2 a xi_l / c``. The ``l = 0`` term is halved and uses the exact
zero-frequency reflection coefficients.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import C, HBAR, K_B, ZETA3, thermal_energy
from .dielectric import DielectricModel, Drude, Plasma, eval_imag, tail_model
from .errors import ConvergenceError, DomainError
from .quadrature import QuadratureConfig, gauss_kronrod
from .reflection import Polarization, r_te_zero_freq, r_tm_zero_freq, reflection_coefficient

__all__ = [
    "GeometryThermal",
    "PolarizedPressure",
    "QuadratureConfig",
    "classical_limit",
    "matsubara_frequency",
    "matsubara_term",
    "pressure_polarized",
]


@dataclass(frozen=True)
class GeometryThermal:
    a: float  # separation, m
    T: float  # temperature, K

    def __post_init__(self):
        if not math.isfinite(self.a) or self.a <= 0:
            raise DomainError(f"separation must be > 0, got {self.a!r}")
        if not math.isfinite(self.T) or self.T <= 0:
            raise DomainError(f"temperature must be > 0, got {self.T!r}")


@dataclass(frozen=True)
class PolarizedPressure:
    value: float
    est_error: float
    terms_used: int
    terms: np.ndarray = field(repr=False, compare=False, default_factory=lambda: np.empty(0))


def matsubara_frequency(T: float, l: int) -> float:
    if l < 0:
        raise DomainError("Matsubara index must be >= 0")
    return 2 * math.pi * thermal_energy(T) * l / HBAR


def _is_vacuum(model) -> bool:
    return isinstance(model, Plasma) and model.omega_p == 0


def _term_integrand(model, pol, a, xi, eps_l):
    """Integrand in y over [y_l, inf), without the 1/(8a^3) factor."""
    if xi == 0:
        def f(y):
            k = y / (2 * a)
            if pol is Polarization.TM:
                r = r_tm_zero_freq(model, np.maximum(k, np.finfo(float).tiny))
            else:
                r = r_te_zero_freq(model, k)
            r2 = r * r
            e = np.exp(-y)
            return y * y * r2 * e / (1 - r2 * e)
        return f

    k0sq = (xi / C) ** 2
    dk = (eps_l - 1) * k0sq

    def f(y):
        q = y / (2 * a)
        p = np.sqrt(q * q + dk)
        r2 = reflection_coefficient(pol, eps_l, q, p) ** 2
        e = np.exp(-y)
        return y * y * r2 * e / (1 - r2 * e)
    return f


def matsubara_term(model: DielectricModel, pol, g: GeometryThermal, l: int,
                   cfg: QuadratureConfig = QuadratureConfig(), route: str = "substituted"):
    """One series term (without the prime's factor 1/2) and its error, in Pa.

    ``route="substituted"`` integrates in ``y = 2 a q``; ``route="direct"``
    integrates over the transverse wave number itself and serves as an
    independent cross-check.
    """
    pol = Polarization.parse(pol)
    if _is_vacuum(model):
        return 0.0, 0.0
    a = g.a
    xi = matsubara_frequency(g.T, l)
    eps_l = float(eval_imag(model, xi)) if l > 0 else math.inf
    prefactor = -(K_B * g.T / math.pi)
    y_l = 2 * a * xi / C
    span = cfg.q_exponent_max

    if route == "substituted":
        f = _term_integrand(model, pol, a, xi, eps_l)
        res = gauss_kronrod(
            f, y_l, y_l + span, rel_tol=cfg.rel_tol * 1e-2, abs_tol=0.0,
            max_panels=cfg.max_subdivisions, initial_panels=8,
        )
        # neglected tail beyond y_l + span: r^2 <= 1, so bounded by the vacuum-limit form
        y_end = y_l + span
        tail = (y_end**2 + 2 * y_end + 2) * math.exp(-y_end) / (1 - math.exp(-y_end))
        scale = prefactor / (8 * a**3)
        value, error = scale * res.value, abs(scale) * (res.error + tail)
    elif route == "direct":
        k0sq = (xi / C) ** 2
        # upper k where 2 a q reaches y_l + span
        q_end = (y_l + span) / (2 * a)
        k_end = math.sqrt(max(q_end**2 - k0sq, 0.0))
        if l == 0:
            def f(k):
                if pol is Polarization.TM:
                    r = r_tm_zero_freq(model, np.maximum(k, np.finfo(float).tiny))
                else:
                    r = r_te_zero_freq(model, k)
                r2 = r * r
                e = np.exp(-2 * a * k)
                return k * k * r2 * e / (1 - r2 * e)
        else:
            def f(k):
                q = np.sqrt(k * k + k0sq)
                p = np.sqrt(k * k + eps_l * k0sq)
                r2 = reflection_coefficient(pol, eps_l, q, p) ** 2
                e = np.exp(-2 * a * q)
                return k * q * r2 * e / (1 - r2 * e)
        res = gauss_kronrod(
            f, 0.0, k_end, rel_tol=cfg.rel_tol * 1e-2,
            max_panels=cfg.max_subdivisions, initial_panels=16,
        )
        value, error = prefactor * res.value, abs(prefactor) * res.error
    else:
        raise DomainError(f"unknown route {route!r}")
    if not res.converged:
        raise ConvergenceError(
            f"k-integral of Matsubara term l={l} did not converge",
            l=l, value=value, error=error, panels=res.n_panels,
        )
    return value, error


def pressure_polarized(model: DielectricModel, pol, g: GeometryThermal,
                       cfg: QuadratureConfig = QuadratureConfig()) -> PolarizedPressure:
    """Pressure (Pa) contributed by one polarization, summed over Matsubara terms.

    The series stops once three consecutive terms are below
    ``cfg.matsubara_tail_tol`` times the running sum. The error estimate
    adds the quadrature errors and a geometric extrapolation of the
    truncated tail.
    """
    pol = Polarization.parse(pol)
    if _is_vacuum(model):
        return PolarizedPressure(0.0, 0.0, 1, np.zeros(1))

    terms: list[float] = []
    total = 0.0
    quad_err = 0.0
    small_run = 0
    l = 0
    while True:
        t, e = matsubara_term(model, pol, g, l, cfg)
        if l == 0:
            t, e = 0.5 * t, 0.5 * e
        terms.append(t)
        total += t
        quad_err += e
        if abs(t) <= cfg.matsubara_tail_tol * abs(total):
            small_run += 1
        else:
            small_run = 0
        l += 1
        if small_run >= 3:
            break
        if l >= cfg.max_matsubara_terms:
            raise ConvergenceError(
                f"Matsubara series not converged after {l} terms",
                partial_sum=total, terms_used=l, last_term=t,
            )

    arr = np.array(terms)
    last, prev = arr[-1], arr[-2]
    ratio = last / prev if prev != 0 else 0.0
    if 0 <= ratio < 1:
        tail = abs(last) * ratio / (1 - ratio)
    else:
        tail = abs(last) * cfg.max_matsubara_terms
    rounding = 4 * np.finfo(float).eps * np.abs(arr).sum() * math.sqrt(arr.size)
    return PolarizedPressure(
        value=float(total),
        est_error=float(quad_err + tail + rounding),
        terms_used=len(terms),
        terms=arr,
    )


def pressure_total(model: DielectricModel, g: GeometryThermal,
                   cfg: QuadratureConfig = QuadratureConfig()):
    """(P_TM, P_TE) for one configuration."""
    return (pressure_polarized(model, Polarization.TM, g, cfg),
            pressure_polarized(model, Polarization.TE, g, cfg))


def classical_limit(model_kind, g: GeometryThermal) -> float:
    """Large-separation pressure: -k_B T zeta(3) / (8 pi a^3) for a Drude metal,
    twice that for the plasma model (ideal-metal value)."""
    kind = model_kind
    if not isinstance(kind, str):
        kind = "drude" if isinstance(tail_model(kind), Drude) else "plasma"
    kind = kind.lower()
    base = -thermal_energy(g.T) * ZETA3 / (8 * math.pi * g.a**3)
    if kind == "drude":
        return base
    if kind == "plasma":
        return 2 * base
    raise DomainError(f"model kind must be 'drude' or 'plasma', got {model_kind!r}")
