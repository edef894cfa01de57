"""Run configuration: ``key = value`` file with ``[sections]``.

Values may carry a unit suffix and are stored in SI units (angles in rad,
angular rates in rad/s).  A bare number is taken as already SI.  Unknown
sections and keys are errors.  See ``DEFAULT_CONFIG_TEXT`` for every key
with its default and accepted units.
"""

from __future__ import annotations

import configparser
import math
import re
from decimal import Decimal
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional

from .fringes import NoiseParams
from .interferometer import (
    RB87_MASS,
    SequenceConfig,
    WavePacketParams,
    gravitational_dephase,
    zeeman_dephase,
)
from .spin import as_two_s

__all__ = ["ConfigError", "SweepSpec", "RunConfig", "parse_config", "parse_config_text",
           "DEFAULT_CONFIG_TEXT"]


class ConfigError(ValueError):
    """Invalid configuration; the message names the field path and, if known, the line."""


UNITS = {
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "µs": 1e-6, "ns": 1e-9},
    "length": {"m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "µm": 1e-6, "nm": 1e-9},
    "angle": {"rad": 1.0, "mrad": 1e-3, "deg": math.pi / 180},
    "rate": {"rad/s": 1.0, "Hz": 2 * math.pi, "kHz": 2e3 * math.pi, "MHz": 2e6 * math.pi},
    "gradient": {"G/m": 1.0, "G/cm": 1e2, "G/mm": 1e3, "G/um": 1e6, "G/µm": 1e6},
    "rate_gradient": {"rad/s/m": 1.0, "rad/s/um": 1e6, "rad/s/µm": 1e6},
    "mass": {"kg": 1.0, "amu": 1.66053906660e-27, "u": 1.66053906660e-27},
    "number": {},
}

_NUMBER = re.compile(r"^([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(.*)$")
_PI = re.compile(r"^([-+]?(?:\d+\.?\d*|\.\d+)?)\s*\*?\s*pi(?:\s*/\s*(\d+\.?\d*))?\s*(.*)$")

EXPERIMENTS = (
    "population-transfer",
    "clockness",
    "visibility-vs-TG",
    "d-i-vs-TG",
    "complementarity-grid",
    "multilevel-clockness",
    "toy-postquantum",
    "single-run",
)

# experiment -> (swept parameter, unit kind, default start, stop, steps)
SWEEP_DEFAULTS = {
    "population-transfer": ("T_R", "time", 0.0, 110e-6, 56),
    "clockness": ("T_R", "time", 0.0, 110e-6, 56),
    "visibility-vs-TG": ("T_G", "time", 0.0, 40e-6, 21),
    "d-i-vs-TG": ("T_G", "time", 0.0, 40e-6, 21),
    "multilevel-clockness": ("delta_phi", "angle", 0.0, math.pi, 37),
}

DEFAULT_CONFIG_TEXT = """\
# clockinterf run configuration.  Bare numbers are SI; suffixes are converted.

[sequence]
T_R = 10 us                 # RF (Rabi) pulse duration: s, ms, us, ns
Omega_R = 157079.63267948964 rad/s   # Rabi angular frequency: rad/s, Hz, kHz, MHz
T_G = 5 us                  # gradient pulse duration
T_sep = 1 ms                # lab time the arms spend separated in height (gravity mode)
omega0 = 25 MHz             # clock frequency (Hz-type suffixes are multiplied by 2 pi)
v_max = 0.9                 # optical visibility ceiling, [0, 1]
dephasing = zeeman          # zeeman | gravity

[zeeman]
g_F = 0.5                   # Lande factor
dBdz = 0.01 G/um            # field gradient during the gradient pulse: G/m, G/cm, G/mm, G/um
dz = 4 um                   # arm separation during the gradient pulse
grad_omega_1 = 0 rad/s/m    # level-1 potential gradient, for the breakup check (assumed)
grad_omega_2 = 2e9 rad/s/m  # level-2 potential gradient, for the breakup check (assumed)

[clock]
# theta = 1.5707963 rad     # optional: override the Rabi-derived polar angle, [0, pi]
phi = 0 rad                 # initial clock azimuth (drops out of every density)

[packet]
z0 = 1 um                   # half separation of the two packets at release
delta = 0.1 um              # initial packet width
mass = 86.909180527 amu     # kg or amu
t = 16 ms                   # free expansion time
grid_points = 512
grid_span = 6               # grid half-width in expanded envelope widths

[noise]
atom_number = 1e4           # atoms per shot (Poisson counting)
phase_jitter = 0.1 rad      # per-shot global fringe phase std
readout_std = 1.0           # additive Gaussian noise, atoms per bin
n_shots = 50
seed = 0

[grid]
C_values = 0, 0.56, 0.81, 1
D_I_values = 0, 0.2, 0.4, 0.6, 0.8, 1

[multilevel]
theta = 0.7853981633974483 rad
spins = 0.5, 2, 8

[output]
dir = out
"""

# section -> key -> (kind, default); kinds beyond UNITS: int, list, spins, str
SCHEMA = {
    "sequence": {
        "T_R": ("time", 10e-6),
        "Omega_R": ("rate", math.pi / (2 * 10e-6)),
        "T_G": ("time", 5e-6),
        "T_sep": ("time", 1e-3),
        "omega0": ("rate", 2 * math.pi * 25e6),
        "v_max": ("number", 0.9),
        "dephasing": ("str", "zeeman"),
    },
    "zeeman": {
        "g_F": ("number", 0.5),
        "dBdz": ("gradient", 1e4),
        "dz": ("length", 4e-6),
        "grad_omega_1": ("rate_gradient", 0.0),
        "grad_omega_2": ("rate_gradient", 2e9),
    },
    "clock": {
        "theta": ("angle", None),
        "phi": ("angle", 0.0),
    },
    "packet": {
        "z0": ("length", 1e-6),
        "delta": ("length", 0.1e-6),
        "mass": ("mass", RB87_MASS),
        "t": ("time", 16e-3),
        "grid_points": ("int", 512),
        "grid_span": ("number", 6.0),
    },
    "noise": {
        "atom_number": ("number", 1e4),
        "phase_jitter": ("angle", 0.1),
        "readout_std": ("number", 1.0),
        "n_shots": ("int", 50),
        "seed": ("int", 0),
    },
    "sweep": {
        "parameter": ("str", None),
        "start": ("raw", None),
        "stop": ("raw", None),
        "steps": ("int", None),
    },
    "grid": {
        "C_values": ("list", (0.0, 0.56, 0.81, 1.0)),
        "D_I_values": ("list", (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)),
    },
    "multilevel": {
        "theta": ("angle", math.pi / 4),
        "spins": ("spins", (0.5, 2.0, 8.0)),
    },
    "output": {
        "dir": ("str", "out"),
    },
}

SWEEP_UNITS = {"T_R": "time", "T_G": "time", "delta_phi": "angle"}


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    start: float
    stop: float
    steps: int

    def values(self) -> list:
        """Inclusive, evenly spaced sweep points."""
        if self.steps == 1:
            return [self.start]
        return [self.start + (self.stop - self.start) * i / (self.steps - 1)
                for i in range(self.steps)]


@dataclass(frozen=True)
class RunConfig:
    sequence: SequenceConfig = field(default_factory=SequenceConfig)
    dephasing: str = "zeeman"
    g_F: float = 0.5
    dBdz: float = 1e4
    dz: float = 4e-6
    grad_omega_1: float = 0.0
    grad_omega_2: float = 2e9
    theta: Optional[float] = None
    phi: float = 0.0
    grid_points: int = 512
    grid_span: float = 6.0
    noise: NoiseParams = field(default_factory=lambda: NoiseParams(1e4, 0.1, 1.0))
    n_shots: int = 50
    seed: int = 0
    sweep: Optional[SweepSpec] = None
    C_values: tuple = (0.0, 0.56, 0.81, 1.0)
    D_I_values: tuple = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)
    multilevel_theta: float = math.pi / 4
    spins: tuple = (0.5, 2.0, 8.0)
    output_dir: str = "out"
    noiseless: bool = False

    @property
    def packet(self) -> WavePacketParams:
        return self.sequence.packet

    def delta_phi(self, T_G: Optional[float] = None) -> float:
        """Differential clock phase for a gradient pulse ``T_G`` (config value by default)."""
        if self.dephasing == "gravity":
            return gravitational_dephase(self.sequence.omega0, self.dz, self.sequence.T_sep)
        T_G = self.sequence.T_G if T_G is None else T_G
        return self.sequence.delta_omega * T_G

    def with_overrides(self, *, seed=None, n_shots=None, output_dir=None, noiseless=None):
        changes = {}
        if seed is not None:
            changes["seed"] = int(seed)
        if n_shots is not None:
            if n_shots < 2:
                raise ConfigError("noise.n_shots: need at least 2 shots")
            changes["n_shots"] = int(n_shots)
        if output_dir is not None:
            changes["output_dir"] = str(output_dir)
        if noiseless:
            changes["noiseless"] = True
            changes["noise"] = NoiseParams.noiseless()
        return replace(self, **changes)

    def sweep_for(self, experiment: str) -> SweepSpec:
        """The sweep an experiment runs: the configured one, or its default."""
        param, _, start, stop, steps = SWEEP_DEFAULTS[experiment]
        if self.sweep is None:
            return SweepSpec(param, start, stop, steps)
        if self.sweep.parameter != param:
            raise ConfigError(
                f"sweep.parameter: experiment {experiment!r} sweeps {param!r}, "
                f"got {self.sweep.parameter!r}"
            )
        return self.sweep

    def to_dict(self) -> dict:
        """Resolved configuration in SI units (JSON-safe)."""
        d = asdict(self)
        d["noise"]["atom_number"] = _json_float(d["noise"]["atom_number"])
        return d


def _json_float(x):
    return None if isinstance(x, float) and not math.isfinite(x) else x


def _where(section, key, lines):
    line = lines.get((section, key))
    return f"{section}.{key}" + (f" (line {line})" if line else "")


def parse_value(text: str, kind: str, where: str = "value"):
    """Convert ``text`` to SI according to ``kind``; raise ConfigError on mismatch."""
    text = text.strip()
    if kind == "str":
        return text
    if kind == "int":
        try:
            value = float(text)
        except ValueError:
            raise ConfigError(f"{where}: expected an integer, got {text!r}") from None
        if not value.is_integer():
            raise ConfigError(f"{where}: expected an integer, got {text!r}")
        return int(value)
    if kind in ("list", "spins"):
        items = [t for t in (s.strip() for s in text.split(",")) if t]
        if not items:
            raise ConfigError(f"{where}: empty list")
        if kind == "spins":
            try:
                return tuple(as_two_s(t) / 2 for t in items)
            except ValueError as exc:
                raise ConfigError(f"{where}: {exc}") from None
        return tuple(parse_value(t, "number", where) for t in items)
    units = UNITS[kind]
    m = _PI.match(text)
    if m and kind == "angle":
        coef = m.group(1)
        coef = 1.0 if coef in ("", "+") else -1.0 if coef == "-" else float(coef)
        value = coef * math.pi / (float(m.group(2)) if m.group(2) else 1.0)
        suffix = m.group(3).strip()
        if suffix not in ("", "rad"):
            raise ConfigError(f"{where}: unit {suffix!r} cannot follow a multiple of pi")
        return value
    m = _NUMBER.match(text)
    if not m:
        raise ConfigError(f"{where}: cannot parse {text!r} as a number")
    suffix = m.group(2).strip()
    if not suffix:
        return float(m.group(1))
    if suffix not in units:
        accepted = ", ".join(units) or "none (dimensionless)"
        raise ConfigError(f"{where}: unit {suffix!r} is not a {kind} unit; accepted: {accepted}")
    # decimal product so that "10 us" is exactly the float 1e-05
    return float(Decimal(m.group(1)) * Decimal(repr(units[suffix])))


def _line_numbers(text: str) -> dict:
    lines, section = {}, None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
        elif "=" in line and section is not None:
            lines[(section, line.split("=", 1)[0].strip())] = number
    return lines


def parse_config_text(text: str) -> RunConfig:
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";"), strict=True,
        default_section="__defaults__",
    )
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError(f"parse error at line {exc.lineno}: key before any [section]") from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigError(f"parse error at line {lineno}: {line.strip()!r}") from None
    except configparser.Error as exc:
        message = " ".join(str(exc).split())
        raise ConfigError(f"parse error: {message}") from None
    lines = _line_numbers(text)

    values = {sec: {k: v for k, (_, v) in keys.items()} for sec, keys in SCHEMA.items()}
    raw_sweep = {}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key, text_value in parser.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {_where(section, key, lines)}")
            kind, _ = SCHEMA[section][key]
            where = _where(section, key, lines)
            if kind == "raw":
                raw_sweep[key] = (text_value, where)
            else:
                values[section][key] = parse_value(text_value, kind, where)
    return _build(values, raw_sweep, parser.has_section("sweep"), lines)


def _check(cond, section, key, lines, message, values=None):
    if not cond:
        got = ""
        if values is not None and key in values.get(section, {}):
            got = f", got {values[section][key]!r}"
        raise ConfigError(f"{_where(section, key, lines)}: {message}{got}")


def _build(values, raw_sweep, has_sweep, lines) -> RunConfig:
    seq, zee, clk, pkt, noi = (values[s] for s in ("sequence", "zeeman", "clock", "packet", "noise"))
    for key in ("T_R", "T_G", "T_sep", "Omega_R"):
        _check(seq[key] >= 0, "sequence", key, lines, "must be >= 0", values=values)
    _check(seq["omega0"] > 0, "sequence", "omega0", lines, "must be > 0", values=values)
    _check(0 <= seq["v_max"] <= 1, "sequence", "v_max", lines, "must lie in [0, 1]", values=values)
    _check(seq["dephasing"] in ("zeeman", "gravity"), "sequence", "dephasing", lines,
           "must be 'zeeman' or 'gravity'", values=values)
    _check(zee["dz"] >= 0, "zeeman", "dz", lines, "must be >= 0", values=values)
    if clk["theta"] is not None:
        _check(0 <= clk["theta"] <= math.pi, "clock", "theta", lines, "must lie in [0, pi]", values=values)
    for key in ("delta", "mass", "t"):
        _check(pkt[key] > 0 if key != "t" else pkt[key] >= 0, "packet", key, lines,
               "must be > 0" if key != "t" else "must be >= 0", values=values)
    _check(pkt["z0"] > 0, "packet", "z0", lines, "must be > 0", values=values)
    _check(pkt["grid_points"] >= 32, "packet", "grid_points", lines, "must be >= 32", values=values)
    _check(pkt["grid_span"] > 0, "packet", "grid_span", lines, "must be > 0", values=values)
    _check(noi["atom_number"] > 0, "noise", "atom_number", lines, "must be > 0", values=values)
    _check(noi["phase_jitter"] >= 0, "noise", "phase_jitter", lines, "must be >= 0", values=values)
    _check(noi["readout_std"] >= 0, "noise", "readout_std", lines, "must be >= 0", values=values)
    _check(noi["n_shots"] >= 2, "noise", "n_shots", lines, "must be >= 2", values=values)
    _check(noi["seed"] >= 0, "noise", "seed", lines, "must be >= 0", values=values)
    for key in ("C_values", "D_I_values"):
        _check(all(0 <= v <= 1 for v in values["grid"][key]), "grid", key, lines,
               "values must lie in [0, 1]", values=values)
    ml = values["multilevel"]
    _check(0 <= ml["theta"] <= math.pi, "multilevel", "theta", lines, "must lie in [0, pi]", values=values)

    sweep = None
    if has_sweep:
        sweep = _build_sweep(values["sweep"], raw_sweep, lines)

    packet = WavePacketParams(pkt["z0"], pkt["delta"], pkt["mass"], pkt["t"])
    delta_omega = zeeman_dephase(zee["g_F"], zee["dBdz"], zee["dz"], 1.0)
    sequence = SequenceConfig(
        T_R=seq["T_R"], Omega_R=seq["Omega_R"], T_G=seq["T_G"], delta_omega=delta_omega,
        T_sep=seq["T_sep"], omega0=seq["omega0"], packet=packet, v_max=seq["v_max"],
    )
    return RunConfig(
        sequence=sequence,
        dephasing=seq["dephasing"],
        g_F=zee["g_F"],
        dBdz=zee["dBdz"],
        dz=zee["dz"],
        grad_omega_1=zee["grad_omega_1"],
        grad_omega_2=zee["grad_omega_2"],
        theta=clk["theta"],
        phi=clk["phi"],
        grid_points=pkt["grid_points"],
        grid_span=pkt["grid_span"],
        noise=NoiseParams(noi["atom_number"], noi["phase_jitter"], noi["readout_std"]),
        n_shots=noi["n_shots"],
        seed=noi["seed"],
        sweep=sweep,
        C_values=tuple(values["grid"]["C_values"]),
        D_I_values=tuple(values["grid"]["D_I_values"]),
        multilevel_theta=ml["theta"],
        spins=tuple(ml["spins"]),
        output_dir=values["output"]["dir"],
    )


def _build_sweep(sweep, raw, lines) -> SweepSpec:
    param = sweep["parameter"]
    _check(param is not None, "sweep", "parameter", lines, "required in [sweep]")
    _check(param in SWEEP_UNITS, "sweep", "parameter", lines,
           f"must be one of {', '.join(SWEEP_UNITS)}")
    bounds = {}
    for key in ("start", "stop"):
        _check(key in raw, "sweep", key, lines, "required in [sweep]")
        text, where = raw[key]
        bounds[key] = parse_value(text, SWEEP_UNITS[param], where)
    steps = sweep["steps"]
    _check(steps is not None and steps >= 2, "sweep", "steps", lines, "must be >= 2")
    if param in ("T_R", "T_G"):
        _check(bounds["start"] >= 0 and bounds["stop"] >= 0, "sweep", "start", lines,
               "durations must be >= 0")
    return SweepSpec(param, bounds["start"], bounds["stop"], steps)


def parse_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text)

