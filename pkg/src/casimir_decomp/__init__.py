"""Casimir pressure between metal plates with a TM/TE x propagating/evanescent split."""
from .constants import CONSTANTS, PhysicalConstants
from .decomposition import (
    PressureComponents,
    SweepRow,
    decompose,
    ratio_to_classical,
    relative_deviation_models,
    sweep,
)
from .dielectric import (
    Drude,
    DrudeTail,
    OpticalTable,
    Plasma,
    PlasmaTail,
    Tabulated,
    eval_imag,
    eval_real,
    kk_transform,
    load_optical_table,
)
from .errors import (
    CapabilityError,
    CasimirError,
    ConvergenceError,
    DomainError,
    NumericalDegeneracyError,
    ValidationError,
)
from .evanescent import EvanescentResult, evanescent_pressure
from .matsubara import GeometryThermal, classical_limit, pressure_polarized
from .quadrature import QuadratureConfig
from .reflection import Polarization

__version__ = "0.1.0"

__all__ = [
    "CONSTANTS", "PhysicalConstants", "PressureComponents", "SweepRow", "decompose",
    "ratio_to_classical", "relative_deviation_models", "sweep", "Drude", "DrudeTail",
    "OpticalTable", "Plasma", "PlasmaTail", "Tabulated", "eval_imag", "eval_real",
    "kk_transform", "load_optical_table", "CapabilityError", "CasimirError",
    "ConvergenceError", "DomainError", "NumericalDegeneracyError", "ValidationError",
    "EvanescentResult", "evanescent_pressure", "GeometryThermal", "classical_limit",
    "pressure_polarized", "QuadratureConfig", "Polarization",
]
