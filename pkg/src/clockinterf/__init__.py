"""Clock interferometry: complementarity of visibility, clockness and distinguishability."""

from .clock import (
    BlochVector,
    ClockState,
    ComplementarityRecord,
    bloch_vector,
    clockness_from_population,
    complementarity_record,
    distinguishability,
    ideal_distinguishability,
    overlap_mag,
    visibility_pure,
)
from .config import ConfigError, RunConfig, parse_config
from .fringes import (
    DegenerateInputError,
    FitError,
    FitResult,
    NoiseParams,
    ShotSet,
    VisibilityStats,
    d_i_from_phases,
    fit_fringe,
    fit_visibility_curve,
    normalize_visibility,
    simulate_shots,
    visibility_stats,
)
from .interferometer import (
    CONSTANTS,
    FringeProfile,
    SequenceConfig,
    WavePacketParams,
    breakup_ratio,
    gravitational_dephase,
    packet_amplitude,
    pattern_eigenstate_sum,
    pattern_entangled,
    rabi_theta,
    toy_postquantum_visibility,
    zeeman_dephase,
)
from .kernels import BACKEND
from .spin import (
    SpinCoherentState,
    brute_force_overlap,
    multilevel_clockness,
    multilevel_distinguishability,
    multilevel_ideal_distinguishability,
    spin_coherent_state,
    spin_overlap_closed,
)

__version__ = "0.1.0"
