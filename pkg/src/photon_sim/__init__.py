"""Two-photon interference and remote-entanglement feasibility for quantum memories."""
from .core import (
    Convention,
    ConfigError,
    DegenerateIntensities,
    DegeneratePole,
    DivergentIntegral,
    GridTooCoarse,
    NonConvergence,
    NonPositiveLifetime,
    NonPositiveWindow,
    PhotonSimError,
    ProbabilityRange,
    UnknownAxis,
    UnknownPreset,
    figure_to_angular,
    to_angular,
    to_ordinary,
)
from .interference import (
    EtaMode,
    InterferenceResult,
    PhotonPair,
    detection_efficiency,
    fidelity,
    i_max,
    i_min,
    interfere,
    jdp_numeric,
    visibility,
    windowed_intensities,
)
from .scan import Axis, GridSpec, RegionResult, Thresholds, marginal_bounds, run_scan
from .sources import (
    Bare,
    CavityEnhancedNV,
    Delayed,
    Envelope,
    Filtered,
    FilterSpec,
    TwoChannel,
    apply_filter,
    bare_envelope,
    delay_envelope,
    realize,
    spectral_profile,
    temporal_profile,
    two_channel_envelope,
)
from .systems import (
    PRESET_NAMES,
    SystemPreset,
    entanglement_rate,
    net_efficiency,
    preset,
)

__version__ = "0.1.0"
