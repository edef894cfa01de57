"""Spin-S coherent-state clocks.

Amplitudes are indexed ``m = +S, S-1, ..., -S``.  Spins are carried as the
integer ``two_s = 2S`` so half-integer labels compare exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import gammaln, xlogy

from .clock import ClockState, bloch_vector

__all__ = [
    "SpinCoherentState",
    "as_two_s",
    "spin_coherent_state",
    "brute_force_overlap",
    "bloch_angle",
    "spin_overlap_closed",
    "multilevel_distinguishability",
    "multilevel_ideal_distinguishability",
    "multilevel_clockness",
]

# below this |sin(delta_phi / 2)| the clockness ratio switches to its series
_SERIES_THRESHOLD = 5e-7


def as_two_s(S) -> int:
    """Return ``2S`` as an int, rejecting anything that is not a positive half-integer."""
    try:
        doubled = 2 * Fraction(S) if not isinstance(S, bool) else None
    except (TypeError, ValueError):
        doubled = None
    if doubled is None or doubled.denominator != 1 or doubled <= 0:
        raise ValueError(f"spin must be a positive half-integer, got {S!r}")
    return int(doubled)


@dataclass(frozen=True)
class SpinCoherentState:
    two_s: int
    theta: float
    phi: float
    amplitudes: np.ndarray = field(repr=False, compare=False)

    @property
    def S(self) -> float:
        return self.two_s / 2

    @property
    def m(self) -> np.ndarray:
        """Magnetic quantum numbers matching ``amplitudes``."""
        return self.two_s / 2 - np.arange(self.two_s + 1)


def spin_coherent_state(S, theta: float, phi: float = 0.0) -> SpinCoherentState:
    """Coherent state reached from ``|S, S>`` by a polar rotation ``theta`` and azimuth ``phi``.

    ``a_m = cos^(S+m)(theta/2) sin^(S-m)(theta/2) sqrt(binom(2S, S+m)) exp(-i m phi)``,
    evaluated in log space so large spins do not overflow.
    """
    two_s = as_two_s(S)
    if not (0.0 <= theta <= math.pi):
        raise ValueError(f"theta must lie in [0, pi], got {theta!r}")
    up = np.arange(two_s, -1, -1, dtype=float)  # S + m
    down = two_s - up  # S - m
    log_binom = gammaln(two_s + 1) - gammaln(up + 1) - gammaln(down + 1)
    log_mag = (
        xlogy(up, math.cos(theta / 2))
        + xlogy(down, math.sin(theta / 2))
        + 0.5 * log_binom
    )
    m = up - two_s / 2
    amplitudes = np.exp(log_mag) * np.exp(-1j * m * phi)
    amplitudes.setflags(write=False)
    return SpinCoherentState(two_s, float(theta), float(phi), amplitudes)


def brute_force_overlap(a: SpinCoherentState, b: SpinCoherentState) -> float:
    """``|<a|b>|`` from the explicit amplitude vectors."""
    if a.two_s != b.two_s:
        raise ValueError(f"spin mismatch: S={a.S} vs S={b.S}")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)))


def bloch_angle(theta_a: float, phi_a: float, theta_b: float, phi_b: float) -> float:
    """Angle between two Bloch directions, via atan2 for accuracy at 0 and pi."""
    u = bloch_vector(ClockState(theta_a, phi_a)).as_array()
    v = bloch_vector(ClockState(theta_b, phi_b)).as_array()
    return math.atan2(float(np.linalg.norm(np.cross(u, v))), float(np.dot(u, v)))


def spin_overlap_closed(S, alpha: float) -> float:
    """``cos^(2S)(alpha / 2)`` for two coherent states whose Bloch vectors span ``alpha``."""
    two_s = as_two_s(S)
    return abs(math.cos(alpha / 2.0)) ** two_s


def _one_minus_power(x: float, two_s: int) -> float:
    # 1 - (1 - x)**two_s without cancellation for small x
    if x >= 1.0:
        return 1.0
    return -math.expm1(two_s * math.log1p(-x))


def multilevel_distinguishability(S, theta: float, delta_phi: float) -> float:
    """``D`` for two coherent states at common latitude ``theta`` separated by ``delta_phi``."""
    two_s = as_two_s(S)
    if not (0.0 <= theta <= math.pi):
        raise ValueError(f"theta must lie in [0, pi], got {theta!r}")
    x = (math.sin(theta) * math.sin(delta_phi / 2.0)) ** 2
    return math.sqrt(_one_minus_power(x, two_s))


def multilevel_ideal_distinguishability(S, delta_phi: float) -> float:
    """``D_I = sqrt(1 - cos^(4S)(delta_phi / 2))`` (equatorial preparation)."""
    two_s = as_two_s(S)
    return math.sqrt(_one_minus_power(math.sin(delta_phi / 2.0) ** 2, two_s))


def multilevel_clockness(S, theta: float, delta_phi: float) -> float:
    """Clockness ``C = D / D_I`` of a spin-S clock.

    At ``delta_phi -> 0`` the ratio is 0/0; its limit ``sin(theta)`` is used
    there, with the first-order series correction nearby.
    """
    two_s = as_two_s(S)
    if not (0.0 <= theta <= math.pi):
        raise ValueError(f"theta must lie in [0, pi], got {theta!r}")
    s2 = math.sin(delta_phi / 2.0) ** 2
    sin_t = math.sin(theta)
    if math.sqrt(s2) < _SERIES_THRESHOLD:
        ratio = sin_t**2 * (1.0 + 0.5 * (two_s - 1) * s2 * math.cos(theta) ** 2)
        return math.sqrt(ratio)
    ratio = _one_minus_power(sin_t**2 * s2, two_s) / _one_minus_power(s2, two_s)
    return math.sqrt(min(ratio, 1.0))
