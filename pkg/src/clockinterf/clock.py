"""Two-level clock algebra on the Bloch sphere.

A clock state ``|theta, phi> = cos(theta/2)|1> + exp(i phi) sin(theta/2)|2>``
is represented by its Bloch angles.  Overlaps and distinguishabilities are
computed from Bloch vectors: for unit vectors ``a`` and ``b``

    |<a|b>| = |a + b| / 2,      D = |a - b| / 2,

which is algebraically the same as ``sqrt((1 +/- a.b) / 2)`` but does not
lose precision near orthogonality or near coincidence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ClockState",
    "BlochVector",
    "ComplementarityRecord",
    "wrap_phase",
    "bloch_vector",
    "overlap_mag",
    "distinguishability",
    "ideal_distinguishability",
    "clockness_from_population",
    "visibility_pure",
    "complementarity_record",
]


def wrap_phase(phi: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    wrapped = math.pi - math.fmod(math.pi - phi, 2.0 * math.pi)
    if wrapped > math.pi:
        wrapped -= 2.0 * math.pi
    elif wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


def _check_unit_interval(name: str, value: float) -> float:
    value = float(value)
    if not (0.0 <= value <= 1.0):
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    return value


@dataclass(frozen=True)
class ClockState:
    """Pure two-level clock state given by its Bloch angles (radians).

    ``theta`` outside ``[0, pi]`` is rejected rather than folded; ``phi`` is
    wrapped into ``(-pi, pi]``.
    """

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        theta = float(self.theta)
        if not (0.0 <= theta <= math.pi) or math.isnan(theta):
            raise ValueError(f"theta must lie in [0, pi], got {theta!r}")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", wrap_phase(float(self.phi)))

    @property
    def amplitudes(self) -> np.ndarray:
        """Amplitudes on (|1>, |2>)."""
        return np.array(
            [math.cos(self.theta / 2), np.exp(1j * self.phi) * math.sin(self.theta / 2)]
        )

    @property
    def population(self) -> float:
        """Occupation probability of the upper level |2>."""
        return math.sin(self.theta / 2) ** 2

    def shifted(self, delta_phi: float) -> "ClockState":
        """Same latitude, azimuth advanced by ``delta_phi``."""
        return ClockState(self.theta, self.phi + delta_phi)


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def dot(self, other: "BlochVector") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    @property
    def norm(self) -> float:
        return math.sqrt(self.dot(self))


@dataclass(frozen=True)
class ComplementarityRecord:
    """One evaluation of ``V**2 + (C * D_I)**2``.

    The sum is never clamped: values above one are diagnostic output.
    """

    visibility: float
    clockness: float
    ideal_distinguishability: float
    sum: float
    residual: float

    @classmethod
    def build(cls, visibility: float, clockness: float, ideal_distinguishability: float):
        which = (clockness * ideal_distinguishability) ** 2
        # residual without forming the sum first, so tiny C * D_I survive
        residual = (visibility - 1.0) * (visibility + 1.0) + which
        return cls(visibility, clockness, ideal_distinguishability, visibility**2 + which,
                   residual)


def bloch_vector(state: ClockState) -> BlochVector:
    st = math.sin(state.theta)
    return BlochVector(
        st * math.cos(state.phi), st * math.sin(state.phi), math.cos(state.theta)
    )


def _half_norm(u: BlochVector, v: BlochVector, sign: float) -> float:
    value = 0.5 * math.sqrt(
        (u.x + sign * v.x) ** 2 + (u.y + sign * v.y) ** 2 + (u.z + sign * v.z) ** 2
    )
    return min(value, 1.0)


def overlap_mag(a: ClockState, b: ClockState) -> float:
    """``|<a|b>| = cos(alpha_ab / 2)`` with ``alpha_ab`` the Bloch angle."""
    return _half_norm(bloch_vector(a), bloch_vector(b), +1.0)


def distinguishability(a: ClockState, b: ClockState) -> float:
    """``D = sqrt(1 - |<a|b>|**2) = sin(alpha_ab / 2)``."""
    return _half_norm(bloch_vector(a), bloch_vector(b), -1.0)


def ideal_distinguishability(delta_phi: float) -> float:
    """Distinguishability of two equatorial states separated by ``delta_phi``."""
    return abs(math.sin(delta_phi / 2.0))


def clockness_from_population(P: float) -> float:
    """Clock preparation quality ``C = 2 sqrt(P (1 - P))``."""
    P = _check_unit_interval("population P", P)
    return 2.0 * math.sqrt(P * (1.0 - P))


def visibility_pure(theta: float, delta_phi: float) -> float:
    """Fringe visibility for clock arms at latitude ``theta`` and azimuth lag ``delta_phi``.

    Equal to ``overlap_mag(ClockState(theta, phi), ClockState(theta, phi + delta_phi))``
    for every ``phi``.
    """
    if not (0.0 <= theta <= math.pi):
        raise ValueError(f"theta must lie in [0, pi], got {theta!r}")
    x = (math.sin(theta) * math.sin(delta_phi / 2.0)) ** 2
    return math.sqrt(max(0.0, 1.0 - x))


def complementarity_record(V: float, C: float, D_I: float) -> ComplementarityRecord:
    V = _check_unit_interval("V", V)
    C = _check_unit_interval("C", C)
    D_I = _check_unit_interval("D_I", D_I)
    return ComplementarityRecord.build(V, C, D_I)
