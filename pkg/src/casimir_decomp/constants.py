"""Physical constants (SI, CODATA exact/recommended values).

Every other module takes hbar, k_B and c from here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = 1.054571817e-34  # J s
    k_B: float = 1.380649e-23  # J / K
    c: float = 2.99792458e8  # m / s


CONSTANTS = PhysicalConstants()

HBAR = CONSTANTS.hbar
K_B = CONSTANTS.k_B
C = CONSTANTS.c

#: Apery's constant, zeta(3).
ZETA3 = 1.2020569031595942


def thermal_energy(T: float) -> float:
    """Return k_B * T in joules."""
    if not math.isfinite(T) or T <= 0:
        raise DomainError(f"temperature must be positive and finite, got {T!r}")
    return K_B * T
