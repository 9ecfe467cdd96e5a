"""Command-line front end.

Subcommands: ``pressure``, ``decompose``, ``sweep``, ``kk``, ``figures``.
Settings resolve as: command-line flags, then ``--config`` JSON file, then
built-in Au defaults. Exit status is 0 on success, 2 for configuration or
validation errors and 3 when a numerical procedure fails to converge.
"""
from __future__ import annotations

import argparse
import io
import json
import logging
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .decomposition import relative_deviation_models, sweep
from .dielectric import (
    AU_GAMMA,
    AU_OMEGA_P,
    Drude,
    DrudeTail,
    Plasma,
    PlasmaTail,
    Tabulated,
    eval_imag,
    load_optical_table,
    shipped_synthetic_table,
)
from .errors import CasimirError, ConvergenceError, ValidationError
from .matsubara import GeometryThermal, classical_limit, pressure_polarized
from .quadrature import QuadratureConfig
from .reflection import Polarization

log = logging.getLogger("casimir_decomp")

WORKERS_ENV = "CASIMIR_DECOMP_WORKERS"
DEFAULT_FIGURE_GRID = "0.5e-6:4e-6:15"


@dataclass
class RunConfig:
    model: str = "drude"
    omega_p: float = AU_OMEGA_P
    gamma: float = AU_GAMMA
    table: Optional[str] = None
    tail: Optional[str] = None
    T: float = 300.0
    a: Optional[float] = None
    a_grid: Optional[str] = None
    xi_grid: str = "1e13:1e17:20:log"
    rel_tol: Optional[float] = None
    quadrature: dict = field(default_factory=dict)
    out: Optional[str] = None

    def resolved(self) -> dict:
        d = asdict(self)
        d["quadrature"] = asdict(self.quadrature_config())
        return d

    def quadrature_config(self) -> QuadratureConfig:
        overrides = dict(self.quadrature)
        if self.rel_tol is not None:
            overrides["rel_tol"] = self.rel_tol
        try:
            return QuadratureConfig(**overrides)
        except TypeError as exc:
            raise ValidationError(f"bad quadrature override: {exc}") from None

    def build_model(self):
        kind = self.model.lower()
        if kind == "drude":
            return Drude(self.omega_p, self.gamma)
        if kind == "plasma":
            return Plasma(self.omega_p)
        if kind == "tabulated":
            table = load_optical_table(self.table) if self.table else shipped_synthetic_table()
            return Tabulated(table, self.build_tail())
        raise ValidationError(f"unknown model {self.model!r} (drude|plasma|tabulated)")

    def build_tail(self):
        tail = (self.tail or "drude").lower()
        if tail == "drude":
            return DrudeTail(self.omega_p, self.gamma)
        if tail == "plasma":
            return PlasmaTail(self.omega_p)
        raise ValidationError(f"unknown tail {self.tail!r} (drude|plasma)")

    def separations(self) -> list[float]:
        if self.a_grid is not None:
            return parse_grid(self.a_grid, "--a-grid")
        if self.a is not None:
            if not (math.isfinite(self.a) and self.a > 0):
                raise ValidationError("--a must be > 0")
            return [self.a]
        raise ValidationError("give a separation with --a or --a-grid")


def parse_grid(spec: str, flag: str = "grid") -> list[float]:
    """``start:stop:count[:log]`` -> list of floats (linear spacing by default)."""
    parts = spec.split(":")
    if len(parts) not in (3, 4):
        raise ValidationError(f"{flag} must look like start:stop:count[:log], got {spec!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ValidationError(f"{flag}: cannot parse {spec!r}") from None
    spacing = parts[3].lower() if len(parts) == 4 else "linear"
    if spacing not in ("log", "linear", "lin"):
        raise ValidationError(f"{flag}: spacing must be 'log' or 'linear'")
    if count < 1:
        raise ValidationError(f"{flag}: empty grid")
    if not (start > 0 and stop > 0):
        raise ValidationError(f"{flag}: start and stop must be > 0")
    if count > 1 and stop <= start:
        raise ValidationError(f"{flag}: stop must exceed start")
    if count == 1:
        return [start]
    if spacing == "log":
        return list(np.logspace(math.log10(start), math.log10(stop), count))
    return list(np.linspace(start, stop, count))


# --- output ---------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.8e}"


def render_csv(command: str, cfg: RunConfig, columns, rows, notes=()) -> str:
    buf = io.StringIO()
    buf.write(f"# casimir-decomp {__version__} {command}\n")
    buf.write("# config: " + json.dumps(cfg.resolved(), sort_keys=True) + "\n")
    for note in notes:
        buf.write(f"# {note}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def write_atomic(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        write_atomic(cfg.out, text)
    else:
        sys.stdout.write(text)


def _workers() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw:
        try:
            n = int(raw)
        except ValueError:
            raise ValidationError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
        return max(1, n)
    return os.cpu_count() or 1


# --- commands --------------------------------------------------------------

def cmd_pressure(cfg: RunConfig) -> int:
    model = cfg.build_model()
    qc = cfg.quadrature_config()
    rows = []
    for a in cfg.separations():
        g = GeometryThermal(a, cfg.T)
        tm = pressure_polarized(model, Polarization.TM, g, qc)
        te = pressure_polarized(model, Polarization.TE, g, qc)
        rows.append((a, tm.value + te.value, tm.value, te.value, tm.est_error + te.est_error))
    emit(cfg, render_csv("pressure", cfg,
                         ["a_m", "P_total_Pa", "P_TM_Pa", "P_TE_Pa", "est_error_Pa"], rows))
    return 0


DECOMPOSE_COLUMNS = ["a_m", "tm_prop", "tm_evan", "te_prop", "te_evan", "total",
                     "ratio_to_classical", "est_error"]
SWEEP_COLUMNS = ["a_m", "tm_total", "te_total", "total", "tm_prop", "tm_evan", "te_prop",
                 "te_evan", "ratio_to_classical", "est_error"]


def _evanescent_notes(model, qc: QuadratureConfig):
    if isinstance(model, Plasma):
        return []
    return [f"evanescent frequency window ends at omega_max_factor={qc.omega_max_factor:g} "
            "x omega_p (tabulated: first sample)"]


def cmd_decompose(cfg: RunConfig) -> int:
    model = cfg.build_model()
    qc = cfg.quadrature_config()
    rows = sweep(model, cfg.separations(), cfg.T, qc, workers=_workers())
    out = [(r.a, c.tm_prop, c.tm_evan, c.te_prop, c.te_evan, c.total,
            r.ratio_to_classical, c.est_error) for r in rows for c in [r.components]]
    emit(cfg, render_csv("decompose", cfg, DECOMPOSE_COLUMNS, out,
                         notes=["pressures in Pa"] + _evanescent_notes(model, qc)))
    return 0


def cmd_sweep(cfg: RunConfig) -> int:
    model = cfg.build_model()
    qc = cfg.quadrature_config()
    rows = sweep(model, cfg.separations(), cfg.T, qc, workers=_workers())
    out = [(r.a, c.tm_total, c.te_total, c.total, c.tm_prop, c.tm_evan, c.te_prop, c.te_evan,
            r.ratio_to_classical, c.est_error) for r in rows for c in [r.components]]
    emit(cfg, render_csv("sweep", cfg, SWEEP_COLUMNS, out,
                         notes=["pressures in Pa"] + _evanescent_notes(model, qc)))
    return 0


def cmd_kk(cfg: RunConfig) -> int:
    table = load_optical_table(cfg.table) if cfg.table else shipped_synthetic_table()
    model = Tabulated(table, cfg.build_tail())
    xis = parse_grid(cfg.xi_grid, "--xi-grid")
    rows = [(xi, float(eval_imag(model, xi))) for xi in xis]
    emit(cfg, render_csv("kk", cfg, ["xi_rad_s", "eps_imag_axis"], rows,
                         notes=[f"table: {table.source}"]))
    return 0


_GNUPLOT = {
    "fig1": """set logscale x
set xlabel 'a (m)'
set ylabel 'P / P_D^0'
set datafile separator ','
plot 'fig1.csv' using 1:2 with lines title 'Drude', \\
     'fig1.csv' using 1:3 with lines title 'plasma'
""",
    "fig2": """set xlabel 'a (m)'
set ylabel 'relative deviation'
set datafile separator ','
plot 'fig2.csv' using 1:2 with lines title 'Drude vs Drude-extrapolated table', \\
     'fig2.csv' using 1:3 with lines title 'plasma vs plasma-extrapolated table'
""",
    "fig3": """set xlabel 'a (m)'
set datafile separator ','
set multiplot layout 2,1
set ylabel 'P_TM / P_D^0'
plot 'fig3.csv' using 1:2 with lines title 'Drude', 'fig3.csv' using 1:3 with lines dt 2 title 'plasma'
set ylabel 'delta P_TM'
plot 'fig3.csv' using 1:4 with lines title 'delta P_TM'
unset multiplot
""",
    "fig45": """set xlabel 'a (m)'
set ylabel 'P / P_D^0'
set datafile separator ','
set multiplot layout 2,1
plot 'fig45.csv' using 1:2 with lines title 'TM total (Drude)', \\
     'fig45.csv' using 1:3 with lines dt 2 title 'TM total (plasma)', \\
     'fig45.csv' using 1:4 with lines dt 3 title 'TM prop (Drude)', \\
     'fig45.csv' using 1:5 with lines dt 4 title 'TM evan (Drude)'
plot 'fig45.csv' using 1:6 with lines title 'TE total (Drude)', \\
     'fig45.csv' using 1:7 with lines dt 2 title 'TE total (plasma)', \\
     'fig45.csv' using 1:8 with lines dt 3 title 'TE prop (Drude)', \\
     'fig45.csv' using 1:9 with lines dt 4 title 'TE evan (Drude)'
unset multiplot
""",
}


def figure_tables(cfg: RunConfig) -> dict[str, tuple[list, list, list]]:
    """Rows for every figure file: name -> (columns, rows, notes)."""
    qc = cfg.quadrature_config()
    grid = parse_grid(cfg.a_grid or DEFAULT_FIGURE_GRID, "--a-grid")
    workers = _workers()
    drude = sweep(Drude(cfg.omega_p, cfg.gamma), grid, cfg.T, qc, workers=workers)
    plasma = sweep(Plasma(cfg.omega_p), grid, cfg.T, qc, workers=workers)
    p0 = [classical_limit("drude", GeometryThermal(a, cfg.T)) for a in grid]

    fig1 = [(a, d.ratio_to_classical, p.ratio_to_classical)
            for a, d, p in zip(grid, drude, plasma)]
    fig3 = [(a, d.components.tm_total / n, p.components.tm_total / n,
             relative_deviation_models(d.components.tm_total, p.components.tm_total))
            for a, d, p, n in zip(grid, drude, plasma, p0)]
    fig45 = []
    for a, d, p, n in zip(grid, drude, plasma, p0):
        c, cp = d.components, p.components
        fig45.append((a, c.tm_total / n, cp.tm_total / n, c.tm_prop / n, c.tm_evan / n,
                      c.te_total / n, cp.te_total / n, c.te_prop / n, c.te_evan / n))

    table = load_optical_table(cfg.table) if cfg.table else shipped_synthetic_table()
    mode = "user-supplied optical data" if cfg.table else "synthetic-data self-check"
    fig2 = []
    for a in grid:
        g = GeometryThermal(a, cfg.T)
        row = [a]
        for simple, tail in ((Drude(cfg.omega_p, cfg.gamma), DrudeTail(cfg.omega_p, cfg.gamma)),
                             (Plasma(cfg.omega_p), PlasmaTail(cfg.omega_p))):
            tab = Tabulated(table, tail)
            ps = sum(pressure_polarized(simple, pol, g, qc).value for pol in Polarization)
            pt = sum(pressure_polarized(tab, pol, g, qc).value for pol in Polarization)
            row.append(relative_deviation_models(ps, pt))
        fig2.append(tuple(row))

    return {
        "fig1": (["a_m", "ratio_drude", "ratio_plasma"], fig1,
                 ["ratios to the classical Drude-model limit"]),
        "fig2": (["a_m", "delta_drude", "delta_plasma"], fig2,
                 [f"mode: {mode}", f"table: {table.source}"]
                 + ([] if cfg.table else
                    ["delta_plasma is not a self-check: the synthetic table holds Drude "
                     "absorption, which the plasma tail's pole term double counts"])),
        "fig3": (["a_m", "tm_ratio_drude", "tm_ratio_plasma", "delta_tm"], fig3,
                 ["TM pressures over the classical Drude-model limit"]),
        "fig45": (["a_m", "tm_total_drude", "tm_total_plasma", "tm_prop_drude", "tm_evan_drude",
                   "te_total_drude", "te_total_plasma", "te_prop_drude", "te_evan_drude"], fig45,
                  ["channel pressures over the classical Drude-model limit"]
                  + _evanescent_notes(Drude(), qc)),
    }


def cmd_figures(cfg: RunConfig) -> int:
    outdir = Path(cfg.out or "figures")
    for name, (cols, rows, notes) in figure_tables(cfg).items():
        write_atomic(outdir / f"{name}.csv", render_csv(f"figures/{name}", cfg, cols, rows, notes))
        write_atomic(outdir / f"{name}.gp", _GNUPLOT[name])
    log.info("wrote figure data to %s", outdir)
    return 0


COMMANDS = {
    "pressure": cmd_pressure,
    "decompose": cmd_decompose,
    "sweep": cmd_sweep,
    "kk": cmd_kk,
    "figures": cmd_figures,
}


# --- argument handling -----------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with RunConfig fields")
    common.add_argument("--model", choices=["drude", "plasma", "tabulated"])
    common.add_argument("--omega-p", dest="omega_p", type=float, help="plasma frequency, rad/s")
    common.add_argument("--gamma", type=float, help="relaxation parameter, rad/s")
    common.add_argument("--table", help="optical table file (tabulated model, kk)")
    common.add_argument("--tail", choices=["drude", "plasma"], help="low-frequency extrapolation")
    common.add_argument("--T", dest="T", type=float, help="temperature, K")
    common.add_argument("--a", type=float, help="separation, m")
    common.add_argument("--a-grid", dest="a_grid", help="start:stop:count[:log], m")
    common.add_argument("--xi-grid", dest="xi_grid", help="start:stop:count[:log], rad/s (kk)")
    common.add_argument("--rel-tol", dest="rel_tol", type=float)
    common.add_argument("--out", help="output file (directory for figures)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="casimir-decomp",
        description="Casimir pressure between metal plates and its TM/TE x "
                    "propagating/evanescent decomposition.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("pressure", parents=[common], help="total, TM and TE pressure")
    sub.add_parser("decompose", parents=[common], help="four-channel decomposition")
    sub.add_parser("sweep", parents=[common], help="decomposition with totals over a grid")
    sub.add_parser("kk", parents=[common], help="Kramers-Kronig eps(i xi) of an optical table")
    sub.add_parser("figures", parents=[common], help="CSV + gnuplot data for the figures")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ValidationError(f"config file not found: {args.config}") from None
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{args.config}: invalid JSON ({exc})") from None
        known = set(asdict(cfg))
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"{args.config}: unknown keys {sorted(unknown)}")
        cfg = replace(cfg, **data)
    flags = {k: v for k, v in vars(args).items()
             if k in asdict(cfg) and v is not None}
    return replace(cfg, **flags)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        cfg = resolve_config(args)
        cfg.quadrature_config()
        return COMMANDS[args.command](cfg)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.diagnostics:
            print(f"diagnostics: {exc.diagnostics}", file=sys.stderr)
        return 3
    except (CasimirError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
