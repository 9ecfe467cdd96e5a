"""Kinematic factors and Fresnel reflection coefficients of a metal half-space.

On the imaginary axis ``omega = i*xi``::

    q = sqrt(k**2 + xi**2/c**2),   p = sqrt(k**2 + eps(i*xi) * xi**2/c**2)

and on the real axis::

    q = sqrt(k**2 - omega**2/c**2), p = sqrt(k**2 - eps(omega) * omega**2/c**2)

with ``r_TM = (eps*q - p)/(eps*q + p)`` and ``r_TE = (q - p)/(q + p)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .constants import C
from .dielectric import DielectricModel, Drude, tail_model
from .errors import DomainError, NumericalDegeneracyError


class Polarization(enum.Enum):
    TM = "TM"
    TE = "TE"

    @classmethod
    def parse(cls, value) -> "Polarization":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise DomainError(f"polarization must be TM or TE, got {value!r}") from None


@dataclass(frozen=True)
class Kinematics:
    k_perp: float
    q: complex
    p: complex


def _check_nonneg(name, value):
    v = np.asarray(value, dtype=float)
    if np.any(~np.isfinite(v)) or np.any(v < 0):
        raise DomainError(f"{name} must be finite and >= 0")


def branch_sqrt(z):
    """Square root with Re >= 0 and, on the cut Re = 0, Im <= 0.

    The Im <= 0 choice on the propagating sector keeps ``exp(-2 a q)`` an
    outgoing wave for the ``exp(-i omega t)`` convention.
    """
    w = np.sqrt(np.asarray(z, dtype=complex))
    on_cut = (w.real == 0) & (w.imag > 0)
    return np.where(on_cut, np.conj(w), w)[()]


def kinematics_real(omega: float, k_perp: float, eps: complex) -> Kinematics:
    _check_nonneg("omega", omega)
    _check_nonneg("k_perp", k_perp)
    k0sq = (omega / C) ** 2
    q = branch_sqrt(k_perp**2 - k0sq)
    p = branch_sqrt(k_perp**2 - eps * k0sq)
    return Kinematics(float(k_perp), complex(q), complex(p))


def kinematics_imag(xi: float, k_perp: float, eps_imag_axis: float) -> Kinematics:
    _check_nonneg("xi", xi)
    _check_nonneg("k_perp", k_perp)
    if not math.isfinite(eps_imag_axis) or eps_imag_axis < 1:
        raise DomainError("eps on the imaginary axis must be a real number >= 1")
    k0 = xi / C
    q = math.hypot(k_perp, k0)
    p = math.hypot(k_perp, math.sqrt(eps_imag_axis) * k0)
    return Kinematics(float(k_perp), q, p)


def fresnel(pol: Polarization, eps, kin: Kinematics):
    """Reflection coefficient for ``pol`` at the point described by ``kin``."""
    pol = Polarization.parse(pol)
    return reflection_coefficient(pol, eps, kin.q, kin.p)


def reflection_coefficient(pol: Polarization, eps, q, p):
    """Array form of :func:`fresnel`; broadcasts over ``eps``, ``q`` and ``p``."""
    if pol is Polarization.TM:
        num, den = eps * q - p, eps * q + p
    else:
        num, den = q - p, q + p
    den = np.asarray(den)
    if np.any(den == 0):
        raise NumericalDegeneracyError("vanishing Fresnel denominator")
    out = num / den
    return out[()] if isinstance(out, np.ndarray) else out


def r_te_zero_freq(model: DielectricModel, k_perp):
    """TE coefficient at zero frequency: 0 for Drude-like metals, the
    plasma-model closed form otherwise."""
    _check_nonneg("k_perp", k_perp)
    m = tail_model(model)
    k = np.asarray(k_perp, dtype=float)
    if isinstance(m, Drude):
        return np.zeros_like(k)[()]
    ck = C * k
    root = np.sqrt(ck * ck + m.omega_p**2)
    with np.errstate(invalid="ignore", divide="ignore"):
        r = (ck - root) / (ck + root)
    # k = 0 with omega_p > 0 is the -1 limit; omega_p = 0 (vacuum) is 0
    r = np.where(ck + root == 0, 0.0, r)
    return r[()]


def r_tm_zero_freq(model: DielectricModel, k_perp):
    """TM coefficient at zero frequency.

    The eps -> infinity limit of the TM coefficient is 1 for every conducting
    model; this value makes the halved l = 0 TM term equal the classical
    Drude-model pressure -k_B T zeta(3) / (8 pi a^3). Vacuum gives 0.
    """
    k = np.asarray(k_perp, dtype=float)
    if np.any(~np.isfinite(k)) or np.any(k <= 0):
        raise DomainError("k_perp must be > 0")
    if tail_model(model).omega_p == 0:
        return np.zeros_like(k)[()]
    return np.ones_like(k)[()]
