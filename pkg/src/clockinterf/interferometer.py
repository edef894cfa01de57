"""Simulated clock interferometer.

Covers clock preparation by a Rabi pulse, the Zeeman and gravitational
dephasing maps, freely expanding Gaussian wave packets for the two arms and
the resulting 1-D density patterns.  Proper time enters only through the
internal-state phase ``delta_phi``; the spatial packets are left untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .clock import ComplementarityRecord

__all__ = [
    "PhysicalConstants",
    "CONSTANTS",
    "RB87_MASS",
    "WavePacketParams",
    "SequenceConfig",
    "FringeProfile",
    "BreakupCheck",
    "rabi_theta",
    "rabi_population",
    "zeeman_dephase",
    "gravitational_dephase",
    "packet_amplitude",
    "default_grid",
    "pattern_entangled",
    "pattern_eigenstate_sum",
    "incoherent_background",
    "apply_contrast_ceiling",
    "breakup_ratio",
    "toy_postquantum_visibility",
]


@dataclass(frozen=True)
class PhysicalConstants:
    g: float = 9.80665
    c: float = 2.99792458e8
    hbar: float = 1.054571817e-34
    # Bohr magneton over hbar, rad/s per gauss
    mu_B_over_hbar: float = 2.0 * math.pi * 1.3996245e6


CONSTANTS = PhysicalConstants()
RB87_MASS = 86.909180527 * 1.66053906660e-27


@dataclass(frozen=True)
class WavePacketParams:
    """Geometry of the two freely expanding arm packets (SI units)."""

    z0: float = 1.0e-6
    delta: float = 0.1e-6
    mass: float = RB87_MASS
    t: float = 16e-3

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be > 0, got {self.delta!r}")
        if not self.mass > 0:
            raise ValueError(f"mass must be > 0, got {self.mass!r}")
        if self.t < 0:
            raise ValueError(f"t must be >= 0, got {self.t!r}")
        if self.z0 < 0:
            raise ValueError(f"z0 must be >= 0, got {self.z0!r}")

    @property
    def complex_width(self) -> complex:
        """``4 delta**2 + 2 i hbar t / m``."""
        return complex(4 * self.delta**2, 2 * CONSTANTS.hbar * self.t / self.mass)

    @property
    def envelope_width(self) -> float:
        """Standard deviation of ``|psi|**2`` after expansion."""
        spread = CONSTANTS.hbar * self.t / (2 * self.mass * self.delta**2)
        return self.delta * math.sqrt(1.0 + spread**2)

    @property
    def fringe_wavenumber(self) -> float:
        """Spatial wavenumber of the two-packet interference term, rad/m."""
        w = self.complex_width
        return 8 * CONSTANTS.hbar * self.t * self.z0 / (self.mass * abs(w) ** 2)


@dataclass(frozen=True)
class SequenceConfig:
    """Timings and rates of one experimental cycle (SI units, angles in rad)."""

    T_R: float = 10e-6
    Omega_R: float = math.pi / (2 * 10e-6)
    T_G: float = 5e-6
    delta_omega: float = 0.5 * CONSTANTS.mu_B_over_hbar * 1e4 * 4e-6
    T_sep: float = 1e-3
    omega0: float = 2 * math.pi * 25e6
    packet: WavePacketParams = field(default_factory=WavePacketParams)
    v_max: float = 0.9

    def __post_init__(self):
        for name in ("T_R", "T_G", "T_sep", "Omega_R"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)!r}")
        if not self.omega0 > 0:
            raise ValueError(f"omega0 must be > 0, got {self.omega0!r}")
        if not (0.0 <= self.v_max <= 1.0):
            raise ValueError(f"v_max must lie in [0, 1], got {self.v_max!r}")


@dataclass(frozen=True)
class FringeProfile:
    """Density sampled on a strictly increasing 1-D grid (metres)."""

    z: np.ndarray
    density: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        rho = np.asarray(self.density, dtype=float)
        if z.ndim != 1 or z.shape != rho.shape:
            raise ValueError("z and density must be 1-D arrays of equal length")
        if z.size > 1 and not np.all(np.diff(z) > 0):
            raise ValueError("grid must be strictly increasing")
        if np.any(rho < 0) or not np.all(np.isfinite(rho)):
            raise ValueError("density must be finite and non-negative")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "density", rho)

    def integral(self) -> float:
        return float(np.trapezoid(self.density, self.z))

    def __len__(self):
        return self.z.size


@dataclass(frozen=True)
class BreakupCheck:
    ratio: float
    valid: bool


def rabi_theta(Omega_R: float, T_R: float) -> float:
    """Polar angle after a resonant pulse, folded into [0, pi] by reflection."""
    if Omega_R < 0 or T_R < 0:
        raise ValueError("Omega_R and T_R must be >= 0")
    theta = math.fmod(Omega_R * T_R, 2 * math.pi)
    if theta > math.pi:
        theta = 2 * math.pi - theta
    return theta


def rabi_population(Omega_R: float, T_R: float) -> float:
    """Transferred population ``sin**2(Omega_R T_R / 2)``."""
    return math.sin(Omega_R * T_R / 2) ** 2


def zeeman_dephase(g_F: float, dBdz: float, dz: float, T_G: float,
                   constants: PhysicalConstants = CONSTANTS) -> float:
    """Differential clock phase from a field gradient ``dBdz`` (G/m) over arm separation ``dz`` (m)."""
    if T_G < 0:
        raise ValueError(f"T_G must be >= 0, got {T_G!r}")
    return g_F * constants.mu_B_over_hbar * dBdz * dz * T_G


def gravitational_dephase(omega0: float, dz: float, T: float,
                          constants: PhysicalConstants = CONSTANTS) -> float:
    """Clock phase lag ``omega0 * g * dz * T / c**2`` between arms ``dz`` apart in height."""
    if omega0 < 0 or dz < 0 or T < 0:
        raise ValueError("omega0, dz and T must be >= 0")
    return omega0 * constants.g * dz * T / constants.c**2


def packet_amplitude(z, sign: int, p: WavePacketParams):
    """Freely expanded Gaussian packet centred at ``sign * z0``; normalised to one."""
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")
    z = np.asarray(z, dtype=float)
    w = p.complex_width
    norm = (2 * math.pi) ** 0.25 * np.sqrt(
        complex(p.delta, CONSTANTS.hbar * p.t / (2 * p.mass * p.delta))
    )
    return np.exp(-((z - sign * p.z0) ** 2) / w) / norm


def default_grid(p: WavePacketParams, points: int = 512, span: float = 6.0) -> np.ndarray:
    """Uniform grid covering +/- ``span`` expanded envelope widths around z = 0."""
    half = span * p.envelope_width + p.z0
    return np.linspace(-half, half, points)


def _arm_amplitudes(grid, p, arm_phase):
    psi_u = packet_amplitude(grid, +1, p)
    psi_d = packet_amplitude(grid, -1, p)
    if arm_phase:
        psi_d = psi_d * np.exp(1j * arm_phase)
    return psi_u, psi_d


def pattern_entangled(grid, theta: float, phi: float, delta_phi: float,
                      p: WavePacketParams, arm_phase: float = 0.0) -> FringeProfile:
    """Density of the path-clock entangled state.

    Each arm carries ``cos(theta/2)|1> + exp(i(phi +/- delta_phi/2)) sin(theta/2)|2>``;
    the density is the sum over internal components of the squared spinor
    amplitude.  ``arm_phase`` is an extra path phase on the lower arm (shot
    jitter); ``phi`` drops out of the density.
    """
    if not (0.0 <= theta <= math.pi):
        raise ValueError(f"theta must lie in [0, pi], got {theta!r}")
    grid = np.asarray(grid, dtype=float)
    psi_u, psi_d = _arm_amplitudes(grid, p, arm_phase)
    c = math.cos(theta / 2)
    s = math.sin(theta / 2)
    comp1 = c * (psi_u + psi_d) / math.sqrt(2)
    comp2 = s * (
        psi_u * np.exp(1j * (phi + delta_phi / 2)) + psi_d * np.exp(1j * (phi - delta_phi / 2))
    ) / math.sqrt(2)
    density = np.abs(comp1) ** 2 + np.abs(comp2) ** 2
    return FringeProfile(grid, density)


def pattern_eigenstate_sum(grid, populations: Sequence[float], delta_phi: float,
                           p: WavePacketParams, arm_phase: float = 0.0) -> FringeProfile:
    """Population-weighted sum of single-level two-slit patterns.

    Level ``j`` (0-based, equally spaced energies) acquires the relative arm
    phase ``j * delta_phi``.  For two levels this is the pair of patterns
    ``|psi_u + psi_d|**2`` and ``|e^{i dphi/2} psi_u + e^{-i dphi/2} psi_d|**2``.
    """
    weights = np.asarray(populations, dtype=float)
    if weights.ndim != 1 or weights.size < 1 or np.any(weights < 0):
        raise ValueError("populations must be a non-empty vector of non-negative weights")
    if abs(weights.sum() - 1.0) > 1e-9:
        raise ValueError(f"populations must sum to 1, got {weights.sum()!r}")
    grid = np.asarray(grid, dtype=float)
    psi_u, psi_d = _arm_amplitudes(grid, p, arm_phase)
    density = np.zeros_like(grid)
    for j, w in enumerate(weights):
        if w == 0:
            continue
        half = 0.5 * j * delta_phi
        density += w * np.abs(psi_u * np.exp(1j * half) + psi_d * np.exp(-1j * half)) ** 2 / 2
    return FringeProfile(grid, density)


def incoherent_background(grid, p: WavePacketParams) -> np.ndarray:
    """Fringe-free density ``(|psi_u|**2 + |psi_d|**2) / 2``."""
    psi_u = packet_amplitude(grid, +1, p)
    psi_d = packet_amplitude(grid, -1, p)
    return (np.abs(psi_u) ** 2 + np.abs(psi_d) ** 2) / 2


def apply_contrast_ceiling(profile: FringeProfile, v_max: float,
                           p: WavePacketParams) -> FringeProfile:
    """Scale the fringe term by ``v_max`` leaving the envelope intact.

    Models resolution-limited imaging: the observed pattern is a mixture of
    the coherent pattern and its fringe-free background.
    """
    if not (0.0 <= v_max <= 1.0):
        raise ValueError(f"v_max must lie in [0, 1], got {v_max!r}")
    if v_max == 1.0:
        return profile
    background = incoherent_background(profile.z, p)
    density = v_max * profile.density + (1.0 - v_max) * background
    return FringeProfile(profile.z, np.clip(density, 0.0, None))


def breakup_ratio(grad_omega_1: float, grad_omega_2: float, T_G: float,
                  p: WavePacketParams, limit: float = 0.02) -> BreakupCheck:
    """Differential momentum kick between clock levels over the packet momentum width.

    ``|hbar (d omega_1/dz - d omega_2/dz) T_G| / (hbar / (2 delta))``; the
    clock is considered intact when the ratio does not exceed ``limit``.
    """
    ratio = abs((grad_omega_1 - grad_omega_2) * T_G) * 2.0 * p.delta
    return BreakupCheck(ratio, ratio <= limit)


def toy_postquantum_visibility(C: float, D_I: float) -> ComplementarityRecord:
    """Record for a hypothetical model in which the visibility stays at one."""
    for name, value in (("C", C), ("D_I", D_I)):
        if not (0.0 <= value <= 1.0):
            raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    return ComplementarityRecord.build(1.0, float(C), float(D_I))
