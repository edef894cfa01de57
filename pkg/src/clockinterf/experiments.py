"""Named experiments: sweeps that produce CSV tables plus a JSON sidecar.

Visibility, clockness and ideal distinguishability are measured by three
separate pipelines (fringe fits, population counting, fringe phases).  A
row's ``sum`` and ``residual`` are recomputed from that row's own V, C and
D_I; no pipeline reads another pipeline's output.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np

from . import rng
from .clock import complementarity_record, ideal_distinguishability
from .config import EXPERIMENTS, RunConfig
from .fringes import (
    FitError,
    fit_fringe,
    fit_visibility_curve,
    d_i_from_phases,
    normalize_visibility,
    phase_stats,
    simulate_shots,
    visibility_stats,
)
from .interferometer import (
    FringeProfile,
    apply_contrast_ceiling,
    breakup_ratio,
    default_grid,
    pattern_eigenstate_sum,
    pattern_entangled,
    rabi_population,
    rabi_theta,
    toy_postquantum_visibility,
)
from .spin import (
    brute_force_overlap,
    multilevel_clockness,
    multilevel_distinguishability,
    multilevel_ideal_distinguishability,
    spin_coherent_state,
)

__all__ = [
    "COMPLEMENTARITY_COLUMNS",
    "MAX_UNCONVERGED_FRACTION",
    "Measurement",
    "VisibilityMeasurement",
    "Table",
    "measure_visibility",
    "measure_clockness",
    "measure_ideal_distinguishability",
    "complementarity_row",
    "run_experiment",
    "write_table",
]

COMPLEMENTARITY_COLUMNS = (
    "sweep_value", "C_nominal", "D_I_nominal", "T_R", "T_G",
    "V", "V_ref", "V_normalized", "C", "D_I", "sum", "residual",
    "sem", "sem_V", "sem_C", "sem_D_I", "n_unconverged",
)

# a row is flagged when more than this fraction of its fits were dropped
MAX_UNCONVERGED_FRACTION = 0.1


@dataclass(frozen=True)
class Measurement:
    value: float
    sem: float
    n_fits: int = 0
    n_unconverged: int = 0


@dataclass(frozen=True)
class VisibilityMeasurement:
    V: float
    sem_V: float
    V_ref: float
    sem_ref: float
    n_fits: int = 0
    n_unconverged: int = 0

    @property
    def normalized(self) -> float:
        return normalize_visibility(self.V, self.V_ref)

    @property
    def sem_normalized(self) -> float:
        if self.V / self.V_ref >= 1.0:
            return self.sem_V / self.V_ref
        return math.hypot(self.sem_V / self.V_ref, self.V * self.sem_ref / self.V_ref**2)


@dataclass
class Table:
    experiment: str
    columns: tuple
    rows: List[dict]
    extras: dict
    profile: Optional[FringeProfile] = None

    @property
    def unconverged(self) -> bool:
        return bool(self.extras.get("unconverged_rows"))


def _grid(cfg: RunConfig) -> np.ndarray:
    return default_grid(cfg.packet, cfg.grid_points, cfg.grid_span)


def _observed(cfg: RunConfig, theta: float, delta_phi: float, grid) -> Callable:
    """Pattern source for the imaged entangled state with a shot phase offset."""
    def source(chi: float) -> FringeProfile:
        clean = pattern_entangled(grid, theta, cfg.phi, delta_phi, cfg.packet, arm_phase=chi)
        return apply_contrast_ceiling(clean, cfg.sequence.v_max, cfg.packet)
    return source


def _single_level(cfg: RunConfig, level: int, delta_phi: float, grid) -> Callable:
    populations = (1.0, 0.0) if level == 0 else (0.0, 1.0)

    def source(chi: float) -> FringeProfile:
        clean = pattern_eigenstate_sum(grid, populations, delta_phi, cfg.packet, arm_phase=chi)
        return apply_contrast_ceiling(clean, cfg.sequence.v_max, cfg.packet)
    return source


def _fit_visibility(cfg: RunConfig, source: Callable, tag: int, row: int):
    """(mean V, sem, n fits, n unconverged) from shots or one noiseless fit."""
    if cfg.noiseless:
        fit = fit_fringe(source(0.0))
        return fit.visibility, 0.0, 1, int(not fit.converged)
    shots = simulate_shots(source, cfg.n_shots, cfg.noise, cfg.seed, stream_key=(tag, row))
    stats = visibility_stats(shots, combined=False)
    return stats.mean, stats.sem, cfg.n_shots, stats.n_unconverged + stats.n_failed


def measure_visibility(cfg: RunConfig, theta: float, delta_phi: float, row: int,
                       grid=None) -> VisibilityMeasurement:
    """Fringe-fit pipeline: V of the clock pattern and of a same-config C = 0 reference."""
    grid = _grid(cfg) if grid is None else grid
    V, sem_V, n1, u1 = _fit_visibility(cfg, _observed(cfg, theta, delta_phi, grid), rng.SHOTS, row)
    V_ref, sem_ref, n2, u2 = _fit_visibility(
        cfg, _observed(cfg, 0.0, delta_phi, grid), rng.REFERENCE, row
    )
    return VisibilityMeasurement(V, sem_V, V_ref, sem_ref, n1 + n2, u1 + u2)


def measure_clockness(cfg: RunConfig, population: float, row: int) -> Measurement:
    """Population pipeline: C = 2 sqrt(P (1 - P)) per shot from binomial atom counts."""
    if cfg.noiseless or math.isinf(cfg.noise.atom_number):
        return Measurement(2.0 * math.sqrt(max(population * (1.0 - population), 0.0)), 0.0)
    n_atoms = int(round(cfg.noise.atom_number))
    gen = rng.stream(cfg.seed, rng.POPULATION, row)
    P = gen.binomial(n_atoms, population, size=cfg.n_shots) / n_atoms
    C = 2.0 * np.sqrt(P * (1.0 - P))
    return Measurement(float(C.mean()), float(C.std(ddof=1) / math.sqrt(C.size)))


def _fitted_phases(cfg: RunConfig, source: Callable, tag: int, row: int):
    if cfg.noiseless:
        fit = fit_fringe(source(0.0))
        return fit.phase, 0.0, 1, int(not fit.converged)
    shots = simulate_shots(source, cfg.n_shots, cfg.noise, cfg.seed, stream_key=(tag, row))
    phases, unconverged = [], 0
    for shot in shots.shots:
        try:
            fit = fit_fringe(shot)
        except FitError:
            unconverged += 1
            continue
        if not fit.converged:
            unconverged += 1
            continue
        phases.append(fit.phase)
    if len(phases) < 2:
        return math.nan, math.nan, cfg.n_shots, unconverged
    stats = phase_stats(phases)
    return stats.mean, stats.sem, cfg.n_shots, unconverged


def measure_ideal_distinguishability(cfg: RunConfig, delta_phi: float, row: int,
                                     grid=None) -> Measurement:
    """Phase pipeline: D_I from the fringe phases of the two single-level interferometers."""
    grid = _grid(cfg) if grid is None else grid
    phi1, sem1, n1, u1 = _fitted_phases(cfg, _single_level(cfg, 0, delta_phi, grid),
                                        rng.PHASE_M1, row)
    phi2, sem2, n2, u2 = _fitted_phases(cfg, _single_level(cfg, 1, delta_phi, grid),
                                        rng.PHASE_M2, row)
    D_I = d_i_from_phases(phi2, phi1)
    sem = 0.5 * abs(math.cos((phi2 - phi1) / 2.0)) * math.hypot(sem1, sem2)
    return Measurement(D_I, sem, n1 + n2, u1 + u2)


def complementarity_row(cfg: RunConfig, row: int, sweep_value: float, theta: float,
                        delta_phi: float, T_R: float, T_G: float, grid=None) -> dict:
    """Run the three independent pipelines for one sweep point."""
    vis = measure_visibility(cfg, theta, delta_phi, row, grid)
    clk = measure_clockness(cfg, math.sin(theta / 2) ** 2, row)
    dis = measure_ideal_distinguishability(cfg, delta_phi, row, grid)

    V_N = vis.normalized
    record = complementarity_record(
        min(max(V_N, 0.0), 1.0), min(max(clk.value, 0.0), 1.0), min(max(dis.value, 0.0), 1.0)
    )
    sem_V = vis.sem_normalized
    C, D_I = record.clockness, record.ideal_distinguishability
    sem = math.sqrt(
        (2 * record.visibility * sem_V) ** 2
        + (2 * C * D_I**2 * clk.sem) ** 2
        + (2 * C**2 * D_I * dis.sem) ** 2
    )
    n_fits = vis.n_fits + dis.n_fits
    n_unconverged = vis.n_unconverged + dis.n_unconverged
    return {
        "sweep_value": sweep_value,
        "C_nominal": math.sin(theta),
        "D_I_nominal": ideal_distinguishability(delta_phi),
        "T_R": T_R,
        "T_G": T_G,
        "V": vis.V,
        "V_ref": vis.V_ref,
        "V_normalized": record.visibility,
        "C": C,
        "D_I": D_I,
        "sum": record.sum,
        "residual": record.residual,
        "sem": sem,
        "sem_V": sem_V,
        "sem_C": clk.sem,
        "sem_D_I": dis.sem,
        "n_unconverged": n_unconverged,
        "_unconverged_row": n_unconverged > MAX_UNCONVERGED_FRACTION * max(n_fits, 1),
    }


def _theta(cfg: RunConfig, T_R: Optional[float] = None) -> float:
    if T_R is None and cfg.theta is not None:
        return cfg.theta
    T_R = cfg.sequence.T_R if T_R is None else T_R
    return rabi_theta(cfg.sequence.Omega_R, T_R)


def _T_R_for(cfg: RunConfig, theta: float) -> float:
    return theta / cfg.sequence.Omega_R if cfg.sequence.Omega_R > 0 else math.nan


def _T_G_for(cfg: RunConfig, delta_phi: float) -> float:
    rate = cfg.sequence.delta_omega
    return delta_phi / rate if rate != 0 else math.nan


def _complementarity_table(name, cfg, points) -> Table:
    grid = _grid(cfg)
    rows, flagged = [], []
    for i, (sweep_value, theta, delta_phi, T_R, T_G) in enumerate(points):
        r = complementarity_row(cfg, i, sweep_value, theta, delta_phi, T_R, T_G, grid)
        if r.pop("_unconverged_row"):
            flagged.append(i)
        rows.append(r)
    extras = {"unconverged_rows": flagged}
    return Table(name, COMPLEMENTARITY_COLUMNS, rows, extras)


def _breakup(cfg: RunConfig, T_G_values) -> dict:
    checks = [breakup_ratio(cfg.grad_omega_1, cfg.grad_omega_2, T, cfg.packet) for T in T_G_values]
    worst = max(checks, key=lambda c: c.ratio)
    return {"max_ratio": worst.ratio, "valid": all(c.valid for c in checks)}


def run_population_transfer(cfg: RunConfig) -> Table:
    sweep = cfg.sweep_for("population-transfer")
    rows = []
    for i, T_R in enumerate(sweep.values()):
        theta = rabi_theta(cfg.sequence.Omega_R, T_R)
        P_nominal = rabi_population(cfg.sequence.Omega_R, T_R)
        if cfg.noiseless or math.isinf(cfg.noise.atom_number):
            P = np.array([P_nominal, P_nominal])
        else:
            n_atoms = int(round(cfg.noise.atom_number))
            gen = rng.stream(cfg.seed, rng.POPULATION, i)
            P = gen.binomial(n_atoms, P_nominal, size=cfg.n_shots) / n_atoms
        C = 2.0 * np.sqrt(P * (1.0 - P))
        rows.append({
            "sweep_value": T_R,
            "T_R": T_R,
            "theta": theta,
            "P_nominal": P_nominal,
            "P": float(P.mean()),
            "sem_P": float(P.std(ddof=1) / math.sqrt(P.size)),
            "C_nominal": math.sin(theta),
            "C": float(C.mean()),
            "sem_C": float(C.std(ddof=1) / math.sqrt(C.size)),
        })
    columns = ("sweep_value", "T_R", "theta", "P_nominal", "P", "sem_P",
               "C_nominal", "C", "sem_C")
    return Table("population-transfer", columns, rows, {"unconverged_rows": []})


def run_clockness(cfg: RunConfig) -> Table:
    sweep = cfg.sweep_for("clockness")
    delta_phi = math.pi
    T_G = _T_G_for(cfg, delta_phi)
    points = [(T_R, rabi_theta(cfg.sequence.Omega_R, T_R), delta_phi, T_R, T_G)
              for T_R in sweep.values()]
    table = _complementarity_table("clockness", cfg, points)
    table.extras["breakup"] = _breakup(cfg, [T_G])
    return table


def _tg_points(cfg: RunConfig, name: str):
    sweep = cfg.sweep_for(name)
    theta = _theta(cfg)
    T_R = cfg.sequence.T_R if cfg.theta is None else _T_R_for(cfg, theta)
    return [(T_G, theta, cfg.delta_phi(T_G), T_R, T_G) for T_G in sweep.values()]


def run_visibility_vs_tg(cfg: RunConfig) -> Table:
    points = _tg_points(cfg, "visibility-vs-TG")
    table = _complementarity_table("visibility-vs-TG", cfg, points)
    T_G = np.array([r["T_G"] for r in table.rows])
    V = np.array([r["V"] for r in table.rows])
    try:
        curve = fit_visibility_curve(T_G, V)
        table.extras["curve_fit"] = {
            "model": "a*|cos((omega*T_G + phi0)/2)|",
            "a": curve.a,
            "omega": curve.omega,
            "phi0": curve.phi0,
            "rms_residual": curve.rms_residual,
            "converged": curve.converged,
            "omega_nominal": cfg.sequence.delta_omega,
        }
    except FitError as exc:
        table.extras["curve_fit"] = {"error": str(exc)}
    table.extras["breakup"] = _breakup(cfg, T_G)
    return table


def run_d_i_vs_tg(cfg: RunConfig) -> Table:
    points = _tg_points(cfg, "d-i-vs-TG")
    table = _complementarity_table("d-i-vs-TG", cfg, points)
    table.extras["breakup"] = _breakup(cfg, [p[4] for p in points])
    return table


def run_complementarity_grid(cfg: RunConfig) -> Table:
    points = []
    for C in cfg.C_values:
        theta = math.asin(C)
        for D_I in cfg.D_I_values:
            delta_phi = 2.0 * math.asin(D_I)
            points.append((D_I, theta, delta_phi, _T_R_for(cfg, theta), _T_G_for(cfg, delta_phi)))
    table = _complementarity_table("complementarity-grid", cfg, points)
    table.extras["breakup"] = _breakup(cfg, [p[4] for p in points])
    return table


def run_multilevel_clockness(cfg: RunConfig) -> Table:
    sweep = cfg.sweep_for("multilevel-clockness")
    theta = cfg.multilevel_theta
    rows = []
    for delta_phi in sweep.values():
        for S in cfg.spins:
            a = spin_coherent_state(S, theta, 0.0)
            b = spin_coherent_state(S, theta, delta_phi)
            overlap = brute_force_overlap(a, b)
            rows.append({
                "sweep_value": delta_phi,
                "S": S,
                "theta": theta,
                "D": multilevel_distinguishability(S, theta, delta_phi),
                "D_oracle": math.sqrt(max(1.0 - overlap**2, 0.0)),
                "D_I": multilevel_ideal_distinguishability(S, delta_phi),
                "C": multilevel_clockness(S, theta, delta_phi),
            })
    columns = ("sweep_value", "S", "theta", "D", "D_oracle", "D_I", "C")
    return Table("multilevel-clockness", columns, rows, {"unconverged_rows": []})


def run_toy_postquantum(cfg: RunConfig) -> Table:
    rows = []
    for C in cfg.C_values:
        for D_I in cfg.D_I_values:
            rec = toy_postquantum_visibility(C, D_I)
            rows.append({"C": C, "D_I": D_I, "V": rec.visibility, "sum": rec.sum,
                         "residual": rec.residual})
    return Table("toy-postquantum", ("C", "D_I", "V", "sum", "residual"), rows,
                 {"unconverged_rows": []})


def run_single_run(cfg: RunConfig) -> Table:
    theta = _theta(cfg)
    T_R = cfg.sequence.T_R if cfg.theta is None else _T_R_for(cfg, theta)
    T_G = cfg.sequence.T_G
    delta_phi = cfg.delta_phi()
    grid = _grid(cfg)
    table = _complementarity_table(
        "single-run", cfg, [(T_G, theta, delta_phi, T_R, T_G)]
    )
    source = _observed(cfg, theta, delta_phi, grid)
    if cfg.noiseless:
        profile = source(0.0)
    else:
        profile = simulate_shots(source, 1, cfg.noise, cfg.seed, stream_key=(rng.SHOTS, 0)).shots[0]
    try:
        table.extras["profile_fit"] = fit_fringe(profile).to_dict()
    except FitError as exc:
        table.extras["profile_fit"] = {"error": str(exc)}
    table.extras["delta_phi"] = delta_phi
    table.extras["breakup"] = _breakup(cfg, [T_G])
    table.profile = profile
    return table


RUNNERS: Dict[str, Callable[[RunConfig], Table]] = {
    "population-transfer": run_population_transfer,
    "clockness": run_clockness,
    "visibility-vs-TG": run_visibility_vs_tg,
    "d-i-vs-TG": run_d_i_vs_tg,
    "complementarity-grid": run_complementarity_grid,
    "multilevel-clockness": run_multilevel_clockness,
    "toy-postquantum": run_toy_postquantum,
    "single-run": run_single_run,
}
assert tuple(RUNNERS) == EXPERIMENTS


def run_experiment(cfg: RunConfig, name: str) -> Table:
    if name not in RUNNERS:
        raise ValueError(f"unknown experiment {name!r}; choose from {', '.join(RUNNERS)}")
    return RUNNERS[name](cfg)


def _clean(value):
    """JSON-safe copy: NaN and inf become None, numpy scalars become Python ones."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_clean(v) for v in value.tolist()]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def _cell(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_cell(r[c]) for c in columns])
    return buf.getvalue()


def write_table(table: Table, cfg: RunConfig, out_dir) -> List[Path]:
    """Write ``<experiment>.csv`` and ``<experiment>.json`` (and a profile CSV for single runs)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    csv_path = out / f"{table.experiment}.csv"
    csv_path.write_text(_csv_text(table.columns, table.rows), encoding="utf-8")
    written.append(csv_path)
    if table.profile is not None:
        prof_path = out / f"{table.experiment}_profile.csv"
        rows = [{"z_m": z, "density": d} for z, d in zip(table.profile.z, table.profile.density)]
        prof_path.write_text(_csv_text(("z_m", "density"), rows), encoding="utf-8")
        written.append(prof_path)
    # the output location is not a result input; leaving it out keeps reruns
    # into different directories byte-identical
    config = cfg.to_dict()
    config.pop("output_dir")
    sidecar = {
        "experiment": table.experiment,
        "columns": list(table.columns),
        "rows": len(table.rows),
        "config": config,
        **table.extras,
    }
    json_path = out / f"{table.experiment}.json"
    json_path.write_text(
        json.dumps(_clean(sidecar), sort_keys=True, indent=2, allow_nan=False) + "\n",
        encoding="utf-8",
    )
    written.append(json_path)
    return written
