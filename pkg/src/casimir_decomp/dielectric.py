"""Dielectric permittivity models on the real and imaginary frequency axes.

Three model families are supported:

* :class:`Drude` -- dissipative free-electron gas,
  ``eps(w) = 1 - wp**2 / (w * (w + i*gamma))``;
* :class:`Plasma` -- the dissipationless ``gamma = 0`` limit;
* :class:`Tabulated` -- imaginary part of eps sampled on the real axis
  (optical data), continued to low frequencies by a Drude or plasma tail and
  mapped onto the imaginary axis with the Kramers-Kronig relation.

All frequencies are angular, in rad/s.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Union

import numpy as np

from .errors import CapabilityError, DomainError, ValidationError
from .quadrature import gauss_kronrod

#: Plasma frequency of Au, rad/s.
AU_OMEGA_P = 1.37e16
#: Relaxation parameter of Au at 300 K, rad/s.
AU_GAMMA = 0.53e14


@dataclass(frozen=True)
class DrudeParams:
    omega_p: float
    gamma: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.omega_p) or self.omega_p < 0:
            raise ValidationError(f"omega_p must be >= 0, got {self.omega_p!r}")
        if not math.isfinite(self.gamma) or self.gamma < 0:
            raise ValidationError(f"gamma must be >= 0, got {self.gamma!r}")


@dataclass(frozen=True)
class Drude:
    omega_p: float = AU_OMEGA_P
    gamma: float = AU_GAMMA

    def __post_init__(self):
        DrudeParams(self.omega_p, self.gamma)
        if self.omega_p == 0:
            raise ValidationError("Drude model needs omega_p > 0 (use Plasma(0) for vacuum)")
        if self.gamma == 0:
            raise ValidationError("Drude model needs gamma > 0; gamma = 0 is the Plasma model")

    @property
    def params(self) -> DrudeParams:
        return DrudeParams(self.omega_p, self.gamma)


@dataclass(frozen=True)
class Plasma:
    """Plasma model. ``omega_p = 0`` gives vacuum (eps identically 1)."""

    omega_p: float = AU_OMEGA_P

    def __post_init__(self):
        DrudeParams(self.omega_p, 0.0)

    @property
    def params(self) -> DrudeParams:
        return DrudeParams(self.omega_p, 0.0)


@dataclass(frozen=True)
class DrudeTail:
    omega_p: float = AU_OMEGA_P
    gamma: float = AU_GAMMA

    def __post_init__(self):
        DrudeParams(self.omega_p, self.gamma)
        if self.gamma <= 0:
            raise ValidationError("DrudeTail requires gamma > 0")


@dataclass(frozen=True)
class PlasmaTail:
    omega_p: float = AU_OMEGA_P

    def __post_init__(self):
        DrudeParams(self.omega_p, 0.0)


ExtrapolationKind = Union[DrudeTail, PlasmaTail]


@dataclass(frozen=True, eq=False)
class OpticalTable:
    """Samples of Im eps(omega) on the real axis, strictly increasing in omega."""

    omega: np.ndarray
    im_eps: np.ndarray
    source: str = field(default="<memory>", compare=False)

    def __post_init__(self):
        w = np.asarray(self.omega, dtype=float)
        e = np.asarray(self.im_eps, dtype=float)
        if w.ndim != 1 or w.shape != e.shape:
            raise ValidationError("omega and im_eps must be 1-D arrays of equal length")
        if w.size < 2:
            raise ValidationError("optical table needs at least 2 samples")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(e))):
            raise ValidationError("optical table contains non-finite values")
        if np.any(w <= 0):
            raise ValidationError("optical table frequencies must be > 0")
        if np.any(e < 0):
            raise ValidationError("optical table Im eps values must be >= 0")
        bad = np.nonzero(np.diff(w) <= 0)[0]
        if bad.size:
            raise ValidationError(
                f"optical table frequencies must be strictly increasing "
                f"(sample {bad[0] + 1} -> {bad[0] + 2})"
            )
        w.setflags(write=False)
        e.setflags(write=False)
        object.__setattr__(self, "omega", w)
        object.__setattr__(self, "im_eps", e)

    @classmethod
    def from_pairs(cls, samples: Iterable[tuple[float, float]], source="<memory>"):
        arr = np.asarray(list(samples), dtype=float).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1], source=source)

    @property
    def omega_min(self) -> float:
        return float(self.omega[0])

    @property
    def omega_max(self) -> float:
        return float(self.omega[-1])

    def interpolate(self, w: np.ndarray) -> np.ndarray:
        """Im eps inside the tabulated range, log-log linear between samples.

        Segments touching a zero sample fall back to linear interpolation.
        """
        w = np.asarray(w, dtype=float)
        idx = np.clip(np.searchsorted(self.omega, w, side="right") - 1, 0, self.omega.size - 2)
        w0, w1 = self.omega[idx], self.omega[idx + 1]
        e0, e1 = self.im_eps[idx], self.im_eps[idx + 1]
        positive = (e0 > 0) & (e1 > 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            t_log = np.log(w / w0) / np.log(w1 / w0)
            loglog = np.exp(np.log(np.where(positive, e0, 1.0)) * (1 - t_log)
                            + np.log(np.where(positive, e1, 1.0)) * t_log)
        lin = e0 + (e1 - e0) * (w - w0) / (w1 - w0)
        return np.where(positive, loglog, lin)


@dataclass(frozen=True)
class Tabulated:
    table: OpticalTable
    tail: ExtrapolationKind

    def __post_init__(self):
        if not isinstance(self.tail, (DrudeTail, PlasmaTail)):
            raise ValidationError(f"unsupported extrapolation tail {self.tail!r}")


DielectricModel = Union[Drude, Plasma, Tabulated]


def tail_model(model: DielectricModel) -> Union[Drude, Plasma]:
    """The analytic model governing the lowest frequencies of ``model``."""
    if isinstance(model, Tabulated):
        t = model.tail
        if isinstance(t, DrudeTail):
            return Drude(t.omega_p, t.gamma)
        return Plasma(t.omega_p)
    return model


def is_dissipative_at_zero(model: DielectricModel) -> bool:
    """True when the zero-frequency behaviour is Drude-like."""
    return isinstance(tail_model(model), Drude)


def eval_real(model: DielectricModel, omega):
    """Complex permittivity on the real frequency axis (``omega > 0``).

    For tabulated models only the extrapolation region below the first sample
    is defined; it returns the tail model's value.
    """
    w = np.asarray(omega, dtype=float)
    if np.any(~np.isfinite(w)) or np.any(w <= 0):
        raise DomainError("real-axis permittivity requires omega > 0")
    if isinstance(model, Tabulated):
        if np.any(w >= model.table.omega_min):
            raise CapabilityError(
                "real-axis permittivity of a tabulated model is defined only below "
                f"the first tabulated frequency {model.table.omega_min:.6g} rad/s"
            )
    return 1.0 + susceptibility_real(model, w)


def susceptibility_real(model: DielectricModel, omega):
    """``eps(omega) - 1`` on the real axis, free of cancellation for large omega."""
    m = tail_model(model)
    w = np.asarray(omega, dtype=float)
    if isinstance(m, Drude):
        return -m.omega_p**2 / (w * (w + 1j * m.gamma))
    return -(m.omega_p**2 / w**2) + 0j


def eval_imag(model: DielectricModel, xi):
    """Real permittivity eps(i*xi) on the imaginary frequency axis.

    ``xi = 0`` is only admissible for the plasma model with omega_p = 0; the
    zero-frequency reflection coefficients handle the ``xi -> 0`` limit.
    """
    x = np.asarray(xi, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < 0):
        raise DomainError("imaginary-axis frequency must be finite and >= 0")
    if isinstance(model, Plasma):
        if model.omega_p == 0:
            return np.ones_like(x)[()]
        if np.any(x == 0):
            raise DomainError(
                "eps(i*0) is infinite; use the zero-frequency reflection coefficients"
            )
        return 1.0 + model.omega_p**2 / x**2
    if np.any(x == 0):
        raise DomainError(
            "eps(i*0) diverges for this model; use r_te_zero_freq / r_tm_zero_freq"
        )
    if isinstance(model, Drude):
        return 1.0 + model.omega_p**2 / (x * (x + model.gamma))
    if np.ndim(x) == 0:
        return kk_transform(model.table, model.tail, float(x))
    return np.array([kk_transform(model.table, model.tail, float(v)) for v in x.ravel()]).reshape(x.shape)


# --- Kramers-Kronig ---------------------------------------------------------

def _drude_tail_integral(omega_p: float, gamma: float, w1: float, xi: float) -> float:
    """Integral of w * Im eps_D(w) / (w**2 + xi**2) over (0, w1)."""
    # integrand = wp^2 gamma / ((w^2 + gamma^2)(w^2 + xi^2))
    def g(z):
        return math.atan(w1 / z) / z

    if abs(xi - gamma) > 1e-4 * (xi + gamma):
        return omega_p**2 * gamma * (g(gamma) - g(xi)) / (xi**2 - gamma**2)
    # removable singularity: (g(gamma) - g(xi)) / (xi^2 - gamma^2) -> -g'(z) / (2z)
    z = 0.5 * (xi + gamma)
    dg = -w1 / (z * (z * z + w1 * w1)) - math.atan(w1 / z) / (z * z)
    return -omega_p**2 * gamma * dg / (2 * z)


def _power_tail_integral(im_last: float, w_last: float, xi: float) -> float:
    """Integral of w * Im eps(w) / (w**2 + xi**2) over (w_last, inf) for an
    ``w**-3`` continuation matched at the last sample."""
    t = xi / w_last
    if t < 1e-2:
        # series of (1/t^2)(1 - atan(t)/t); avoids cancellation for small t
        series = 1.0 / 3 - t**2 / 5 + t**4 / 7 - t**6 / 9
    else:
        series = (1.0 - math.atan(t) / t) / t**2
    return im_last * series


def kk_transform(table: OpticalTable, tail: ExtrapolationKind, xi: float, *,
                 rel_tol: float = 1e-10) -> float:
    """eps(i*xi) from tabulated Im eps via the Kramers-Kronig relation.

    ``1 + (2/pi) * integral_0^inf w * Im eps(w) / (w**2 + xi**2) dw`` with the
    tail model's Im eps below the table, log-log interpolated samples inside
    it and an ``w**-3`` decay above it. A plasma tail contributes its
    zero-frequency delta-function term ``omega_p**2 / xi**2``.
    """
    if not isinstance(table, OpticalTable):
        raise ValidationError("kk_transform needs an OpticalTable")
    if not math.isfinite(xi) or xi <= 0:
        raise DomainError(f"xi must be > 0, got {xi!r}")
    w_lo, w_hi = table.omega_min, table.omega_max

    if isinstance(tail, DrudeTail):
        low = _drude_tail_integral(tail.omega_p, tail.gamma, w_lo, xi)
        delta_term = 0.0
    elif isinstance(tail, PlasmaTail):
        low = 0.0
        delta_term = tail.omega_p**2 / xi**2
    else:
        raise ValidationError(f"unsupported extrapolation tail {tail!r}")

    # tabulated range, integrated in s = ln(w); samples are panel edges
    def integrand(s):
        w = np.exp(s)
        return w * w * table.interpolate(w) / (w * w + xi * xi)

    edges = np.log(table.omega)
    mid = gauss_kronrod(
        integrand, edges[0], edges[-1], rel_tol=rel_tol,
        breakpoints=edges[1:-1], max_panels=max(4 * edges.size, 2000),
    )
    high = _power_tail_integral(float(table.im_eps[-1]), w_hi, xi)
    return 1.0 + delta_term + (2.0 / math.pi) * (low + mid.value + high)


def junction_sensitivity(table: OpticalTable, tail: ExtrapolationKind, xi: float,
                         shift: float = 0.1) -> float:
    """Relative change of eps(i*xi) when the tail/table junction moves.

    The first tabulated sample is dropped and replaced by the tail up to the
    second sample; a small return value means the hard switch at the lowest
    tabulated frequency is immaterial at this ``xi``. ``shift`` is unused
    unless the table has only two samples, in which case the junction moves
    up by that fraction of the first segment instead.
    """
    base = kk_transform(table, tail, xi)
    if table.omega.size > 2:
        trimmed = OpticalTable(table.omega[1:], table.im_eps[1:], source=table.source)
    else:
        w0 = table.omega[0] + shift * (table.omega[1] - table.omega[0])
        e0 = float(table.interpolate(np.array([w0]))[0])
        trimmed = OpticalTable(np.array([w0, table.omega[1]]),
                               np.array([e0, table.im_eps[1]]), source=table.source)
    return (kk_transform(trimmed, tail, xi) - base) / base


# --- table I/O ----------------------------------------------------------------

_COLUMNS_RE = re.compile(r"^#\s*columns\s*:\s*(.*)$", re.IGNORECASE)


def parse_optical_table(text: str, source: str = "<string>") -> OpticalTable:
    """Parse the optical-table text format.

    ``#`` starts a comment line. A ``# columns: omega_rad_s, im_eps`` or
    ``# columns: omega_rad_s, n, k`` header selects the layout (``im_eps`` is
    assumed when absent); with ``n, k`` Im eps = 2 n k. Data rows are comma
    or whitespace separated and must be sorted ascending in omega.
    """
    layout = None
    rows: list[tuple[float, float]] = []
    last_w = -math.inf
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _COLUMNS_RE.match(line)
            if m:
                cols = [c.strip().lower() for c in m.group(1).split(",") if c.strip()]
                if cols == ["omega_rad_s", "im_eps"]:
                    layout = "im_eps"
                elif cols == ["omega_rad_s", "n", "k"]:
                    layout = "nk"
                else:
                    raise ValidationError(f"{source}:{lineno}: unknown columns {cols}")
            continue
        fields = [f for f in re.split(r"[,\s]+", line) if f]
        want = 3 if layout == "nk" else 2
        if len(fields) != want:
            raise ValidationError(
                f"{source}:{lineno}: expected {want} values, got {len(fields)}"
            )
        try:
            vals = [float(f) for f in fields]
        except ValueError:
            raise ValidationError(f"{source}:{lineno}: non-numeric value in {line!r}") from None
        w = vals[0]
        im = 2 * vals[1] * vals[2] if layout == "nk" else vals[1]
        if not (math.isfinite(w) and math.isfinite(im)):
            raise ValidationError(f"{source}:{lineno}: non-finite value")
        if w <= 0:
            raise ValidationError(f"{source}:{lineno}: omega must be > 0")
        if im < 0:
            raise ValidationError(f"{source}:{lineno}: Im eps must be >= 0")
        if w <= last_w:
            raise ValidationError(f"{source}:{lineno}: rows not sorted ascending in omega")
        last_w = w
        rows.append((w, im))
    if len(rows) < 2:
        raise ValidationError(f"{source}: optical table needs at least 2 data rows")
    return OpticalTable.from_pairs(rows, source=source)


def load_optical_table(path) -> OpticalTable:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ValidationError(f"optical table not found: {path}") from None
    return parse_optical_table(text, source=str(path))


def format_optical_table(table: OpticalTable, header: str = "") -> str:
    lines = [f"# {h}" for h in header.splitlines()]
    lines.append("# columns: omega_rad_s, im_eps")
    lines += [f"{w:.10e}, {e:.10e}" for w, e in zip(table.omega, table.im_eps)]
    return "\n".join(lines) + "\n"


def synthetic_drude_table(omega_p: float = AU_OMEGA_P, gamma: float = AU_GAMMA,
                          w_min: float = 1e11, w_max: float = 1e18,
                          per_decade: int = 40) -> OpticalTable:
    """Im eps of the Drude model sampled log-uniformly on ``[w_min, w_max]``."""
    n = int(round(per_decade * math.log10(w_max / w_min))) + 1
    w = np.logspace(math.log10(w_min), math.log10(w_max), n)
    im = omega_p**2 * gamma / (w * (w * w + gamma * gamma))
    return OpticalTable(w, im, source="synthetic-drude")


def shipped_synthetic_table() -> OpticalTable:
    """The Drude-consistent Au table bundled with the package."""
    return load_optical_table(Path(__file__).with_name("data") / "au_synthetic_drude.txt")
