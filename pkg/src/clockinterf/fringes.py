"""Visibility extraction from fringe profiles and Monte Carlo shot ensembles."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Union

import numpy as np
from scipy.ndimage import gaussian_filter1d

from . import kernels, rng
from .clock import wrap_phase
from .interferometer import FringeProfile
from .lm import damped_least_squares

__all__ = [
    "FitError",
    "DegenerateInputError",
    "FitResult",
    "NoiseParams",
    "ShotSet",
    "VisibilityStats",
    "PhaseStats",
    "CurveFit",
    "fit_fringe",
    "rephase",
    "simulate_shots",
    "visibility_stats",
    "phase_stats",
    "normalize_visibility",
    "fit_visibility_curve",
    "d_i_from_phases",
]

MIN_SAMPLES = 32
KAPPA_MIN_PER_WIDTH = 2.0


class FitError(ValueError):
    pass


class DegenerateInputError(FitError):
    """The data carry no information about the requested parameters."""


@dataclass(frozen=True)
class FitResult:
    """Fit of ``A exp(-(z - z_c)**2 / (2 sigma**2)) (1 + V sin(k z + chi)) + b``."""

    amplitude: float
    center: float
    width: float
    visibility: float
    wavenumber: float
    phase: float
    offset: float
    rms_residual: float
    converged: bool = True
    iterations: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    def model(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        env = self.amplitude * np.exp(-((z - self.center) ** 2) / (2 * self.width**2))
        return env * (1 + self.visibility * np.sin(self.wavenumber * z + self.phase)) + self.offset


def _initial_guess(u: np.ndarray, y: np.ndarray) -> np.ndarray:
    du = float(np.mean(np.diff(u)))
    smooth = gaussian_filter1d(y, 1.0, mode="nearest")
    b0 = float(np.percentile(smooth, 5))
    w = np.clip(smooth - b0, 0.0, None)
    total = float(w.sum())
    if total <= 0:
        raise DegenerateInputError("profile has no envelope above its baseline")
    uc = float((u * w).sum() / total)
    s0 = math.sqrt(max(float(((u - uc) ** 2 * w).sum() / total), (2 * du) ** 2))
    a0 = total * du / (s0 * math.sqrt(2 * math.pi))
    env = a0 * np.exp(-((u - uc) ** 2) / (2 * s0 * s0))
    resid = y - b0 - env

    # dominant spatial frequency of the detrended residual, zero-padded
    nfft = 8 * (1 << int(math.ceil(math.log2(u.size))))
    spectrum = np.abs(np.fft.rfft(resid, nfft))
    kappas = 2 * math.pi * np.fft.rfftfreq(nfft, du)
    band = kappas > 1.5 / s0
    if not band.any():
        band[1:] = True
    idx = int(np.flatnonzero(band)[np.argmax(spectrum[band])])
    kappa = kappas[idx]
    if 0 < idx < spectrum.size - 1:
        lo, mid, hi = spectrum[idx - 1], spectrum[idx], spectrum[idx + 1]
        denom = lo - 2 * mid + hi
        if denom < 0:
            kappa += 0.5 * (lo - hi) / denom * (kappas[1] - kappas[0])

    # project onto the quadratures at that frequency for amplitude and phase
    basis = np.column_stack([env * np.sin(kappa * u), env * np.cos(kappa * u)])
    (a, c), *_ = np.linalg.lstsq(basis, resid, rcond=None)
    return np.array([a0, uc, s0, math.hypot(a, c), kappa, math.atan2(c, a), b0])


def fit_fringe(profile: FringeProfile, *, max_iter: int = 200, xtol: float = 1e-9) -> FitResult:
    """Fit a Gaussian-modulated sinusoid to a fringe profile.

    Raises :class:`DegenerateInputError` for flat profiles.  A fit that does
    not converge within ``max_iter`` trial steps is returned with
    ``converged=False``.
    """
    z = profile.z
    rho = profile.density
    if z.size < MIN_SAMPLES:
        raise FitError(f"need at least {MIN_SAMPLES} samples, got {z.size}")
    scale_y = float(np.max(np.abs(rho)))
    if scale_y == 0 or np.ptp(rho) <= 1e-12 * scale_y:
        raise DegenerateInputError("flat profile: visibility undefined")

    # fit in units where the grid spans [-1, 1] and the peak density is 1
    z_mid = 0.5 * (z[0] + z[-1])
    half = 0.5 * (z[-1] - z[0])
    u = np.ascontiguousarray((z - z_mid) / half)
    y = np.ascontiguousarray(rho / scale_y)

    p0 = _initial_guess(u, y)
    # keep the fringe wavenumber between a couple of radians per envelope
    # width and the grid Nyquist limit; below that a sinusoid just reshapes
    # the envelope and V loses its meaning
    du = 2.0 / (u.size - 1)
    lower = np.array([-np.inf, -np.inf, -np.inf, -np.inf, 0.0, -np.inf, -np.inf])
    upper = np.full(7, np.inf)
    upper[4] = math.pi / du
    lower[4] = min(KAPPA_MIN_PER_WIDTH / max(abs(p0[2]), du), upper[4])
    p0[4] = min(max(p0[4], lower[4]), upper[4])
    result = damped_least_squares(
        lambda p: kernels.fringe_normal_equations(u, y, p),
        lambda p: kernels.fringe_cost(u, y, p),
        p0,
        max_iter=max_iter,
        xtol=xtol,
        lower=lower,
        upper=upper,
    )
    A, uc, s, V, kappa, chi, b = result.params
    if V < 0:
        V, chi = -V, chi + math.pi
    if kappa < 0:
        kappa, chi = -kappa, math.pi - chi
    k = kappa / half
    return FitResult(
        amplitude=A * scale_y,
        center=z_mid + uc * half,
        width=abs(s) * half,
        visibility=min(max(V, 0.0), 1.0),
        wavenumber=k,
        phase=wrap_phase(chi - k * z_mid),
        offset=b * scale_y,
        rms_residual=math.sqrt(2 * result.cost / u.size) * scale_y,
        converged=result.converged,
        iterations=result.iterations,
    )


@dataclass(frozen=True)
class NoiseParams:
    """Shot noise model.

    ``atom_number`` sets the Poisson count scale (``inf`` disables counting
    noise), ``phase_jitter`` is the std of a per-shot global fringe phase in
    radians and ``readout_std`` an additive Gaussian noise in atoms per bin.
    """

    atom_number: float = 1e4
    phase_jitter: float = 0.0
    readout_std: float = 0.0

    def __post_init__(self):
        if not self.atom_number > 0:
            raise ValueError(f"atom_number must be > 0, got {self.atom_number!r}")
        if self.phase_jitter < 0 or self.readout_std < 0:
            raise ValueError("phase_jitter and readout_std must be >= 0")

    @classmethod
    def noiseless(cls) -> "NoiseParams":
        return cls(math.inf, 0.0, 0.0)


@dataclass(frozen=True)
class ShotSet:
    shots: tuple
    seed: int
    noise: NoiseParams
    jitter: np.ndarray = field(repr=False, compare=False, default=None)

    def __len__(self):
        return len(self.shots)

    def summed(self) -> FringeProfile:
        """Per-grid-point sum of all shots (the combined plot)."""
        return FringeProfile(self.shots[0].z, np.sum([s.density for s in self.shots], axis=0))


def rephase(profile: FringeProfile, chi: float) -> FringeProfile:
    """Shift the fringe phase of a profile by ``chi`` without touching its envelope.

    The fringe band is separated from the envelope in Fourier space at the
    spectral minimum between the DC lobe and the dominant fringe peak.
    """
    if chi == 0:
        return profile
    spectrum = np.fft.rfft(profile.density)
    mag = np.abs(spectrum)
    # end of the monotonically falling DC lobe
    cut = 1
    while cut < mag.size - 1 and mag[cut + 1] < mag[cut]:
        cut += 1
    if cut >= mag.size - 1:
        return profile
    peak = cut + int(np.argmax(mag[cut:]))
    cut += int(np.argmin(mag[cut:peak + 1])) if peak > cut else 0
    shifted = spectrum.copy()
    shifted[cut:] *= np.exp(1j * chi)
    density = np.fft.irfft(shifted, n=profile.density.size)
    return FringeProfile(profile.z, np.clip(density, 0.0, None))


PatternSource = Union[FringeProfile, Callable[[float], FringeProfile]]


def _one_shot(source: PatternSource, noise: NoiseParams, gen: np.random.Generator):
    chi = float(gen.normal(0.0, noise.phase_jitter)) if noise.phase_jitter > 0 else 0.0
    clean = source(chi) if callable(source) else rephase(source, chi)
    z = clean.z
    if math.isinf(noise.atom_number) and noise.readout_std == 0:
        return clean, chi
    bins = np.gradient(z)
    scale = noise.atom_number if math.isfinite(noise.atom_number) else 1.0
    expected = clean.density * bins * scale
    counts = gen.poisson(expected).astype(float) if math.isfinite(noise.atom_number) else expected
    if noise.readout_std > 0:
        counts = counts + gen.normal(0.0, noise.readout_std, size=counts.shape)
    return FringeProfile(z, np.clip(counts, 0.0, None) / (bins * scale)), chi


def simulate_shots(source: PatternSource, n: int, noise: NoiseParams, seed: int,
                   stream_key: tuple = ()) -> ShotSet:
    """Draw ``n`` noisy realisations of a pattern.

    ``source`` is a profile (re-phased in Fourier space) or a callable that
    synthesises the pattern for a given fringe phase offset.  Shot ``i``
    draws from the stream ``(seed, SHOTS, *stream_key, i)`` only, so the
    set is reproducible and independent of generation order.
    """
    if n < 1:
        raise ValueError(f"need at least one shot, got {n}")
    shots, jitter = [], []
    for i in range(n):
        gen = rng.stream(seed, rng.SHOTS, *stream_key, i)
        shot, chi = _one_shot(source, noise, gen)
        shots.append(shot)
        jitter.append(chi)
    return ShotSet(tuple(shots), int(seed), noise, np.array(jitter))


@dataclass(frozen=True)
class VisibilityStats:
    mean: float
    sem: float
    combined: float
    n: int
    n_failed: int = 0
    n_unconverged: int = 0
    visibilities: np.ndarray = field(repr=False, compare=False, default=None)
    phases: np.ndarray = field(repr=False, compare=False, default=None)

    def to_dict(self) -> dict:
        return {
            "mean_single_shot": self.mean,
            "sem": self.sem,
            "combined_V": self.combined,
            "n": self.n,
            "n_failed": self.n_failed,
            "n_unconverged": self.n_unconverged,
        }


def visibility_stats(shots: ShotSet, *, combined: bool = True) -> VisibilityStats:
    """Mean single-shot visibility with its SEM, plus the visibility of the summed profile.

    Shots whose fit raises are excluded and counted in ``n_failed``; fits
    that hit the iteration limit are excluded and counted in ``n_unconverged``.
    """
    if len(shots) < 2:
        raise ValueError("need at least two shots for a standard error")
    vis, phases = [], []
    failed = unconverged = 0
    for shot in shots.shots:
        try:
            fit = fit_fringe(shot)
        except FitError:
            failed += 1
            continue
        if not fit.converged:
            unconverged += 1
            continue
        vis.append(fit.visibility)
        phases.append(fit.phase)
    vis = np.array(vis)
    n = vis.size
    if n < 2:
        raise FitError(f"only {n} shot(s) could be fitted")
    sem = float(np.std(vis, ddof=1) / math.sqrt(n))
    combined_v = math.nan
    if combined:
        try:
            combined_v = fit_fringe(shots.summed()).visibility
        except FitError:
            combined_v = 0.0
    return VisibilityStats(float(vis.mean()), sem, combined_v, n, failed, unconverged,
                           vis, np.array(phases))


@dataclass(frozen=True)
class PhaseStats:
    mean: float
    sem: float
    n: int


def phase_stats(phases) -> PhaseStats:
    """Circular mean of fitted fringe phases and its standard error."""
    phases = np.asarray(phases, dtype=float)
    if phases.size < 2:
        raise ValueError("need at least two phases")
    resultant = np.mean(np.exp(1j * phases))
    R = min(abs(resultant), 1.0)
    spread = math.sqrt(-2.0 * math.log(R)) if R > 0 else math.inf
    return PhaseStats(float(np.angle(resultant)), spread / math.sqrt(phases.size), phases.size)


def normalize_visibility(V: float, V_ref: float) -> float:
    """Visibility relative to a single-state reference, capped at one."""
    if not (0.0 < V_ref <= 1.0):
        raise ValueError(f"reference visibility must lie in (0, 1], got {V_ref!r}")
    return min(V / V_ref, 1.0)


def d_i_from_phases(phi2: float, phi1: float) -> float:
    """Ideal distinguishability from the phases of the two single-state interferometers."""
    return abs(math.sin((phi2 - phi1) / 2.0))


@dataclass(frozen=True)
class CurveFit:
    """``a |cos((omega T_G + phi0) / 2)|``."""

    a: float
    omega: float
    phi0: float
    rms_residual: float
    converged: bool

    def __call__(self, T_G):
        return self.a * np.abs(np.cos((self.omega * np.asarray(T_G) + self.phi0) / 2))


def _rectified_cos_normal_equations(t, v):
    def residual_jacobian(p):
        a, w, ph = p
        x = (w * t + ph) / 2
        c = np.cos(x)
        sg = np.sign(c)
        r = a * np.abs(c) - v
        ds = -a * sg * np.sin(x) / 2
        jac = np.column_stack([np.abs(c), ds * t, ds])
        return r, jac

    def normal(p):
        r, jac = residual_jacobian(p)
        return 0.5 * float(r @ r), jac.T @ jac, jac.T @ r

    def cost(p):
        r, _ = residual_jacobian(p)
        return 0.5 * float(r @ r)

    return normal, cost


def fit_visibility_curve(T_G, V) -> CurveFit:
    """Fit ``a |cos((omega T_G + phi0) / 2)|`` with multi-start in ``phi0`` and ``omega``."""
    T_G = np.asarray(T_G, dtype=float)
    V = np.asarray(V, dtype=float)
    if T_G.shape != V.shape or T_G.ndim != 1:
        raise ValueError("T_G and V must be 1-D arrays of equal length")
    if T_G.size < 6:
        raise FitError(f"need at least 6 points, got {T_G.size}")
    if np.ptp(V) <= 1e-12 * max(float(np.max(np.abs(V))), 1e-300):
        raise DegenerateInputError("constant visibilities: omega is unidentifiable")

    t_scale = float(np.max(np.abs(T_G))) or 1.0
    t = T_G / t_scale
    span = float(np.ptp(t))
    normal, cost = _rectified_cos_normal_equations(t, V)
    # rectified cosine has period 2 pi / omega; try everything from a quarter
    # period over the span up to the sampling limit
    omegas = np.geomspace(math.pi / (2 * span), math.pi * T_G.size / span, 24)
    best = None
    for w0 in omegas:
        for ph0 in (0.0, math.pi / 2, math.pi, 3 * math.pi / 2):
            res = damped_least_squares(normal, cost, [float(np.max(V)), w0, ph0])
            if best is None or res.cost < best.cost:
                best = res
    a, w, ph = best.params
    a = abs(a)
    if w < 0:
        w, ph = -w, -ph
    return CurveFit(a, w / t_scale, math.fmod(ph, 2 * math.pi) % (2 * math.pi),
                    math.sqrt(2 * best.cost / V.size), best.converged)
