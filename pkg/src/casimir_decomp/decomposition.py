"""Four-channel decomposition of the Casimir pressure and derived metrics.

Totals per polarization come from the Matsubara series, evanescent parts from
the real-frequency integral, and propagating parts by subtraction:

    P_prop = P_total - P_evan    (per polarization)

The propagating-wave integral itself is never evaluated.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Sequence

from .dielectric import DielectricModel
from .errors import DomainError
from .evanescent import evanescent_pressure
from .matsubara import GeometryThermal, classical_limit, pressure_polarized
from .quadrature import QuadratureConfig
from .reflection import Polarization


@dataclass(frozen=True)
class PressureComponents:
    tm_prop: float
    tm_evan: float
    te_prop: float
    te_evan: float
    tm_total: float
    te_total: float
    total: float
    est_error: float
    tm_error: float = 0.0
    te_error: float = 0.0
    tm_evan_error: float = 0.0
    te_evan_error: float = 0.0

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SweepRow:
    a: float
    components: PressureComponents
    ratio_to_classical: float


def decompose(model: DielectricModel, g: GeometryThermal,
              cfg: QuadratureConfig = QuadratureConfig()) -> PressureComponents:
    tm = pressure_polarized(model, Polarization.TM, g, cfg)
    te = pressure_polarized(model, Polarization.TE, g, cfg)
    tm_ev = evanescent_pressure(model, Polarization.TM, g, cfg)
    te_ev = evanescent_pressure(model, Polarization.TE, g, cfg)
    tm_err = math.hypot(tm.est_error, tm_ev.est_error)
    te_err = math.hypot(te.est_error, te_ev.est_error)
    return PressureComponents(
        tm_prop=tm.value - tm_ev.value,
        tm_evan=tm_ev.value,
        te_prop=te.value - te_ev.value,
        te_evan=te_ev.value,
        tm_total=tm.value,
        te_total=te.value,
        total=tm.value + te.value,
        est_error=math.hypot(tm_err, te_err),
        tm_error=tm.est_error,
        te_error=te.est_error,
        tm_evan_error=tm_ev.est_error,
        te_evan_error=te_ev.est_error,
    )


def ratio_to_classical(components: PressureComponents, g: GeometryThermal) -> float:
    """Total pressure over the classical Drude-model limit at the same (a, T)."""
    return components.total / classical_limit("drude", g)


def relative_deviation_models(pD: float, pP: float) -> float:
    """``(pD - pP) / pP``."""
    if pP == 0 or not math.isfinite(pP):
        raise DomainError("reference pressure must be finite and non-zero")
    return (pD - pP) / pP


def _row(args) -> SweepRow:
    model, a, T, cfg = args
    g = GeometryThermal(a, T)
    comps = decompose(model, g, cfg)
    return SweepRow(a=a, components=comps, ratio_to_classical=ratio_to_classical(comps, g))


def sweep(model: DielectricModel, a_grid: Sequence[float], T: float,
          cfg: QuadratureConfig = QuadratureConfig(), workers: int = 1) -> list[SweepRow]:
    """Decompose at every separation of a strictly increasing grid.

    Rows are independent; with ``workers > 1`` they are computed in worker
    processes and returned in grid order.
    """
    grid = [float(a) for a in a_grid]
    if not grid:
        raise DomainError("separation grid is empty")
    if any(a <= 0 or not math.isfinite(a) for a in grid):
        raise DomainError("separations must be finite and > 0")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("separation grid must be strictly increasing")
    jobs = [(model, a, T, cfg) for a in grid]
    if workers <= 1 or len(jobs) == 1:
        return [_row(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_row, jobs))
