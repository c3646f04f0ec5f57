"""
Batch command line front end.

    qhydro <kind> --config FILE [--out DIR] [--format csv|json] [--seed N] [--validate-only]

Each run writes one data file named after the scenario kind, an optional
gnuplot script, and ``manifest.json``.  Data files contain no timestamps, so
repeating a run with the same configuration reproduces them byte for byte.
Exit status is 0 on success, 1 for configuration errors and 2 for physics or
solver errors.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from . import blackhole as bh
from .config import KINDS, ConfigError, RunConfig, build_config, parse_text
from .core import GridError, PhysicalConstants, RadialGrid, ScalarField, make_uniform_grid
from .dynamics import HydroState, density_distance, evolve_trajectory
from .eigensolver import energy_identity_residual, solve_eigenstates
from .qpotential import vqu_nonrel, vqu_rel_static
from .vacuum_noise import (
    NoiseSpec,
    ResolutionError,
    correlation_table,
    empirical_correlation,
    fit_correlation_width,
    sample_ensemble,
)

EXIT_OK, EXIT_CONFIG, EXIT_PHYSICS = 0, 1, 2


@dataclass
class Table:
    """Column data with units, written as CSV or JSON."""

    columns: List[str]
    units: List[str]
    rows: np.ndarray
    summary: Dict[str, Any] = field(default_factory=dict)


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    tolerance: float

    def as_dict(self):
        return {"name": self.name, "passed": bool(self.passed), "value": _num(self.value),
                "tolerance": _num(self.tolerance)}


@dataclass
class RunManifest:
    version: str
    config: Dict[str, Any]
    wall_time_s: float
    checks: List[Check]
    outputs: List[Dict[str, str]]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self):
        return {
            "toolkit": "qhydro",
            "version": self.version,
            "config": self.config,
            "wall_time_s": self.wall_time_s,
            "checks": [c.as_dict() for c in self.checks],
            "all_passed": self.all_passed,
            "outputs": self.outputs,
        }


def _num(x):
    x = float(x)
    return x if math.isfinite(x) else repr(x)


# ---------------------------------------------------------------------------
# scenario runners


def _run_eigen(p) -> tuple:
    hbar, m = p["hbar"], p["mass"]
    if p["potential"] == "harmonic":
        grid = make_uniform_grid(p["x_min"], p["x_max"], p["n_points"])
        omega = p["omega"]
        states = solve_eigenstates(lambda x: 0.5 * m * omega**2 * x**2, m, p["n_max"], grid=grid,
                                   hbar=hbar, extrapolate=p["extrapolate"])
        analytic = [(n + 0.5) * hbar * omega for n in range(p["n_max"] + 1)]
        V = ScalarField(grid, 0.5 * m * omega**2 * grid.points**2)
    else:
        L = p["width"]
        grid = make_uniform_grid(0.0, L, p["n_points"])
        V = ScalarField(grid, np.zeros(grid.n_points))
        states = solve_eigenstates(V, m, p["n_max"], hbar=hbar, hard_walls=True,
                                   extrapolate=p["extrapolate"])
        analytic = [(n + 1) ** 2 * math.pi**2 * hbar**2 / (2 * m * L**2) for n in range(p["n_max"] + 1)]
    rows = []
    for s, e_ref in zip(states, analytic):
        rows.append([s.index, s.energy, s.discrete_energy, e_ref, s.equilibrium_residual,
                     energy_identity_residual(s, V)])
    rows = np.array(rows)
    rel = np.abs(rows[:, 1] - rows[:, 3]) / np.abs(rows[:, 3])
    checks = [
        Check("eigenvalues_match_analytic", rel.max() <= p["tolerance"], rel.max(), p["tolerance"]),
        Check("force_balance", rows[:, 4].max() <= 1e-4, rows[:, 4].max(), 1e-4),
    ]
    table = Table(["n", "energy", "discrete_energy", "analytic_energy", "residual", "identity_residual"],
                  ["1", "energy", "energy", "energy", "1", "1"], rows)
    return table, checks


def _run_vqu(p) -> tuple:
    m, hbar = p["mass"], p["hbar"]
    grid = make_uniform_grid(p["x_min"], p["x_max"], p["n_points"])
    x = grid.points
    checks = []
    if p["profile"] == "gaussian":
        R = np.exp(-x**2 / (2 * p["sigma"] ** 2))
    elif p["profile"] == "cosine":
        R = np.cos(2 * math.pi * x / p["wavelength"])
    else:
        from .eigensolver import oscillator_eigenfunction
        R = oscillator_eigenfunction(p["state"], x, m, 1.0, hbar)
    field_R = ScalarField(grid, R)
    fn = vqu_nonrel if p["convention"] == "nonrel" else vqu_rel_static
    vq = fn(field_R, m, hbar)
    factor = 1.0 if p["convention"] == "nonrel" else 2.0
    if p["profile"] == "cosine":
        target = factor * hbar**2 / (2 * m) * (2 * math.pi / p["wavelength"]) ** 2
        err = float(np.nanmax(np.abs(vq.valid_values - target)) / target)
        checks.append(Check("sinusoid_constant", err <= 1e-2, err, 1e-2))
    elif p["profile"] == "gaussian":
        target = factor * hbar**2 / (2 * m) * (1 / p["sigma"] ** 2 - x**2 / p["sigma"] ** 4)
        ok = vq.mask & (np.abs(x) <= 3 * p["sigma"])
        err = float(np.max(np.abs(vq.values[ok] - target[ok])) / abs(target[ok]).max())
        checks.append(Check("gaussian_closed_form", err <= 1e-3, err, 1e-3))
    rows = np.column_stack([x, R, np.where(vq.mask, vq.values, np.nan), vq.mask.astype(int)])
    table = Table(["x", "amplitude", "vqu", "valid"], ["length", "1", "energy", "1"], rows)
    return table, checks


def _run_evolve(p) -> tuple:
    m, hbar = p["mass"], p["hbar"]
    grid = make_uniform_grid(p["x_min"], p["x_max"], p["n_points"])
    x = grid.points
    V = None
    if p["initial"] == "gaussian":
        s0 = p["sigma0"]
        psi = (2 * math.pi * s0**2) ** -0.25 * np.exp(-x**2 / (4 * s0**2))
    else:
        omega = p["omega"]
        V = ScalarField(grid, 0.5 * m * omega**2 * x**2)
        psi = solve_eigenstates(V, m, 0, hbar=hbar)[0].wavefunction.values
    state = HydroState.from_wavefunction(grid, psi, hbar=hbar)
    traj = evolve_trajectory(state, V, p["dt"], p["steps"], m, hbar, p["record_every"])
    rows = []
    for s in traj:
        if p["initial"] == "gaussian":
            theory = p["sigma0"] * math.sqrt(1 + (hbar * s.time / (2 * m * p["sigma0"] ** 2)) ** 2)
        else:
            theory = traj[0].width()
        rows.append([s.time, s.norm, s.width(), theory, density_distance(traj[0], s)])
    rows = np.array(rows)
    drift = float(np.abs(rows[:, 1] - rows[0, 1]).max())
    checks = [Check("norm_conserved", drift <= 1e-6, drift, 1e-6)]
    if p["initial"] == "gaussian":
        err = float(np.abs(rows[:, 2] / rows[:, 3] - 1).max())
        checks.append(Check("spreading_law", err <= 1e-4, err, 1e-4))
    else:
        # the finite-difference eigenstate breathes slightly under the spectral
        # propagator, so stationarity is judged at whole periods
        period = 2 * math.pi / p["omega"]
        cycles = rows[:, 0] / period
        whole = (np.abs(cycles - np.round(cycles)) * period < 0.5 * p["dt"]) & (rows[:, 0] > 0)
        if whole.any():
            dd = float(rows[whole, 4].max())
            checks.append(Check("stationary_density_per_period", dd <= 1e-6, dd, 1e-6))
    table = Table(["t", "norm", "width", "width_theory", "density_drift"],
                  ["time", "1", "length", "length", "1/length^(1/2)"], rows)
    return table, checks


def _noise_spec(p, seed=None) -> NoiseSpec:
    grid = make_uniform_grid(0.0, p["x_span"], p["n_points"])
    return NoiseSpec(p["lambda_c"], grid, p["amplitude"], p["seed"] if seed is None else seed)


def _run_noise(p) -> tuple:
    spec = _noise_spec(p)
    G = empirical_correlation(sample_ensemble(spec, p["n_samples"]),
                              max_lag_points=int(math.ceil(5 * spec.lambda_c / spec.grid.spacing)) + 1)
    width = fit_correlation_width(G)
    err = abs(width / spec.lambda_c - 1)
    table = Table(["lag", "G_empirical", "G_theory"], ["length", "1", "1"],
                  correlation_table(G, spec.lambda_c), {"fitted_width": width})
    return table, [Check("correlation_width", err <= p["width_tolerance"], err, p["width_tolerance"])]


def _constants(units: str) -> PhysicalConstants:
    return PhysicalConstants.natural() if units == "natural" else PhysicalConstants.si()


def _bh_scenario(p) -> bh.BlackHoleScenario:
    k = _constants(p["units"])
    if p["mass"] is None and p["r_min"] is None and p["r_max"] is None:
        sc = bh.critical_scenario(k, p["mass_excess"], p["n_points"])
        return bh.BlackHoleScenario(sc.mass, k, sc.C_n, sc.grid, p["horizon_margin"])
    m = p["mass"] if p["mass"] is not None else (1 + p["mass_excess"]) * bh.min_mass(k)
    a = bh.compton_length(m, k)
    R_g = bh.gravitational_radius(m, k)
    r_min = p["r_min"] if p["r_min"] is not None else 1e-3 * a
    r_max = p["r_max"] if p["r_max"] is not None else 2.5 * R_g
    return bh.BlackHoleScenario(m, k, bh.CN_MINUS_INFINITY, RadialGrid(r_min, r_max, p["n_points"]),
                                p["horizon_margin"])


def _run_bh_profile(p) -> tuple:
    sc = _bh_scenario(p)
    prof = bh.solve_radial_profile(sc, correction=p["correction"])
    r = sc.grid.points
    zero = bh.normalize_radial(np.exp(-(r / sc.a) ** 2), sc.grid)
    vq = bh.curved_vqu_on_profile(sc)
    median = bh.band_median_vqu(sc)
    ratio = median / sc.rest_energy
    rows = np.column_stack([r, prof.amplitude.values, zero,
                            np.where(vq.mask, vq.values, np.nan), prof.regime_ratio])
    summary = {
        "mass": sc.mass, "R_g": sc.R_g, "a": sc.a, "R0": prof.R0,
        "enclosed_fraction_at_R0": prof.enclosed_fraction_at_R0,
        "zero_order_deviation": prof.zero_order_deviation,
        "vqu_at_center_scale": prof.vqu_at_center_scale,
        "band_median_vqu_over_mc2": ratio,
    }
    checks = [Check("curved_vqu_order_mc2", 0.2 <= ratio <= 5.0, ratio, 5.0)]
    table = Table(["r", "amplitude", "zero_order", "vqu_curved", "regime_ratio"],
                  ["length", "length^-3/2", "length^-3/2", "energy", "1"], rows, summary)
    return table, checks


def _run_bh_minmass(p) -> tuple:
    k = _constants(p["units"])
    found = bh.critical_mass_by_search(k, p["tol"], p["r0_factor"])
    closed = bh.min_mass(k) * math.sqrt(p["r0_factor"] / 2.0)
    rel = abs(found / closed - 1)
    summary = {"m_min": found, "method": "search", "closed_form": closed}
    table = Table(["m_min", "closed_form"], ["mass", "mass"], np.array([[found, closed]]), summary)
    return table, [Check("search_matches_closed_form", rel <= p["tol"], rel, p["tol"])]


RUNNERS = {
    "eigen": _run_eigen,
    "vqu": _run_vqu,
    "evolve": _run_evolve,
    "noise": _run_noise,
    "bh-profile": _run_bh_profile,
    "bh-minmass": _run_bh_minmass,
}


# ---------------------------------------------------------------------------
# writers


def _fmt(x) -> str:
    x = float(x)
    if x.is_integer() and abs(x) < 2**53:
        return str(int(x))
    return repr(x)


def render_csv(table: Table, kind: str) -> str:
    buf = io.StringIO()
    buf.write(f"# qhydro {kind}\n")
    buf.write("# units: " + ", ".join(f"{c} [{u}]" for c, u in zip(table.columns, table.units)) + "\n")
    buf.write(",".join(table.columns) + "\n")
    for row in np.atleast_2d(table.rows):
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def render_json(table: Table, kind: str) -> str:
    if kind == "bh-minmass":
        payload = dict(table.summary)
    else:
        payload = {
            "kind": kind,
            "columns": [{"name": c, "unit": u} for c, u in zip(table.columns, table.units)],
            "rows": [[_num(v) for v in row] for row in np.atleast_2d(table.rows)],
        }
        if table.summary:
            payload["summary"] = {k: _num(v) if isinstance(v, (int, float)) else v
                                  for k, v in table.summary.items()}
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def render_gnuplot(table: Table, kind: str, data_name: str) -> str:
    x, *ys = table.columns
    plots = ", ".join(f"'{data_name}' using 1:{i + 2} with lines title '{y}'" for i, y in enumerate(ys))
    return (f"# gnuplot script for qhydro {kind}\n"
            "set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\n"
            f"set xlabel '{x} [{table.units[0]}]'\nplot {plots}\n")


def write_atomic(path: Path, text: str) -> str:
    """Write ``text`` via a temp file and rename; returns the sha256 digest."""
    data = text.encode("utf-8")
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return hashlib.sha256(data).hexdigest()


# ---------------------------------------------------------------------------
# public entry points


def validate(config: RunConfig) -> List[str]:
    """Schema and physical-sanity diagnostics; never raises."""
    out: List[str] = []
    try:
        p = config.parameters
        kind = config.kind
        if kind == "eigen":
            if p["n_max"] < 0:
                out.append("n_max must be non-negative")
            if p["potential"] == "harmonic":
                try:
                    make_uniform_grid(p["x_min"], p["x_max"], p["n_points"])
                except ValueError as exc:
                    out.append(f"grid: {exc}")
                edge = 0.5 * p["mass"] * p["omega"] ** 2 * min(p["x_min"] ** 2, p["x_max"] ** 2)
                top = (p["n_max"] + 0.5) * p["hbar"] * p["omega"]
                # boundary potential must sit well above the highest sought level
                if edge < 4.0 * top:
                    out.append(f"confinement: V at grid edge ({edge:g}) is not far above E_{p['n_max']} ({top:g})")
        elif kind == "noise":
            try:
                _noise_spec(p)
            except ResolutionError as exc:
                out.append(f"resolution: {exc}")
            except ValueError as exc:
                out.append(f"grid: {exc}")
            if p["n_samples"] < 100:
                out.append("n_samples must be at least 100")
        elif kind == "bh-profile":
            try:
                sc = _bh_scenario(p)
            except ValueError as exc:
                out.append(f"grid: {exc}")
            else:
                r = sc.grid.points
                if r[0] < sc.R_g < r[-1]:
                    if sc.horizon_margin < 2.0:
                        out.append(f"horizon: grid straddles r = R_g with exclusion margin "
                                   f"{sc.horizon_margin:g} < 2 spacings")
                    if sc.horizon_clearance() < 1e-6:
                        out.append("horizon: a grid node sits on r = R_g")
        elif kind == "bh-minmass":
            if not 1e-14 < p["tol"] < 1e-2:
                out.append("tol must lie in (1e-14, 1e-2)")
        elif kind in ("vqu", "evolve"):
            try:
                make_uniform_grid(p["x_min"], p["x_max"], p["n_points"])
            except ValueError as exc:
                out.append(f"grid: {exc}")
            if kind == "evolve" and (p["dt"] <= 0 or p["steps"] < 0):
                out.append("dt must be positive and steps non-negative")
            if kind == "evolve" and p["initial"] == "ground":
                vmax = 0.5 * p["mass"] * p["omega"] ** 2 * max(p["x_min"] ** 2, p["x_max"] ** 2)
                if p["dt"] * vmax / p["hbar"] > math.pi:
                    out.append(f"stability: dt * max|V| / hbar = {p['dt'] * vmax / p['hbar']:.3g} exceeds pi")
    except Exception as exc:  # diagnostics must not abort
        out.append(f"internal: {type(exc).__name__}: {exc}")
    return out


def run(config: RunConfig) -> RunManifest:
    """Execute one scenario and write its data file and manifest."""
    start = time.perf_counter()
    table, checks = RUNNERS[config.kind](config.parameters)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ext = config.format
    data_name = f"{config.kind}.{ext}"
    text = render_csv(table, config.kind) if ext == "csv" else render_json(table, config.kind)
    outputs = [{"file": data_name, "sha256": write_atomic(out_dir / data_name, text)}]
    if config.gnuplot:
        csv_name = f"{config.kind}.csv"
        if ext != "csv":
            outputs.append({"file": csv_name,
                            "sha256": write_atomic(out_dir / csv_name, render_csv(table, config.kind))})
        gp = f"{config.kind}.gp"
        outputs.append({"file": gp, "sha256": write_atomic(out_dir / gp, render_gnuplot(table, config.kind, csv_name))})
    manifest = RunManifest(__version__, config.resolved(), time.perf_counter() - start, checks, outputs)
    write_atomic(out_dir / "manifest.json", json.dumps(manifest.as_dict(), indent=2, sort_keys=True) + "\n")
    return manifest


def _error_record(exc: BaseException, code: int, out_dir: Optional[Path]) -> None:
    record = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    text = json.dumps(record, sort_keys=True)
    print(text, file=sys.stderr)
    if out_dir is not None:
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            write_atomic(out_dir / "error.json", text + "\n")
        except OSError:
            pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qhydro", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"qhydro {__version__}")
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        sp = sub.add_parser(kind)
        sp.add_argument("--config", type=Path, help="flat key = value configuration file")
        sp.add_argument("--out", type=Path, help="output directory (overrides output_dir)")
        sp.add_argument("--format", choices=("csv", "json"))
        sp.add_argument("--seed", type=int)
        sp.add_argument("--validate-only", action="store_true")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    out_dir = args.out
    try:
        raw = parse_text(args.config.read_text(encoding="utf-8")) if args.config else {}
        if args.format:
            raw["format"] = args.format
        if args.seed is not None:
            if args.kind != "noise":
                raise ConfigError(f"--seed applies to the noise scenario, not {args.kind}")
            raw["seed"] = args.seed
        if args.out:
            raw["output_dir"] = str(args.out)
        config = build_config(args.kind, raw)
    except (ConfigError, OSError) as exc:
        _error_record(exc, EXIT_CONFIG, out_dir)
        return EXIT_CONFIG
    out_dir = config.output_dir

    diagnostics = validate(config)
    if args.validate_only:
        print(json.dumps({"kind": config.kind, "diagnostics": diagnostics}, indent=2))
        return EXIT_OK
    try:
        manifest = run(config)
    except (OSError, GridError, ResolutionError) as exc:
        # bad paths and unusable grids are configuration problems
        _error_record(exc, EXIT_CONFIG, None if isinstance(exc, OSError) else out_dir)
        return EXIT_CONFIG
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        _error_record(exc, EXIT_PHYSICS, out_dir)
        return EXIT_PHYSICS
    for c in manifest.checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.value:.3e} (tol {c.tolerance:g})")
    print(f"wrote {', '.join(o['file'] for o in manifest.outputs)} and manifest.json to {out_dir}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
