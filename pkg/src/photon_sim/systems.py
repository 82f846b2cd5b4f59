"""Concrete memory pairs: Ba+/Ba+, NV/NV and quantum dot/Yb+.

Each preset holds the fixed physical constants, the efficiency chain and
the free parameters (detuning, filter widths or cavity Q, arrival offset,
detection window).  Free parameters are stored in internal units
(rad/ns, ns); figure-style "GHz" values are converted at construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Mapping

from .core import (
    Convention,
    UnknownPreset,
    check_probability,
    figure_to_angular,
    to_angular,
)
from .interference import EtaMode, PhotonPair, detection_efficiency
from .sources import (
    Bare,
    CavityEnhancedNV,
    Delayed,
    Filtered,
    FilterSpec,
    SourceModel,
    TwoChannel,
    purcell_factor,
    realize,
)

PRESET_NAMES = ("BA_BA", "NV_NV", "QD_YB")

THETA_BELL = 0.25  # post-selection probability of the psi- Bell state
D_PMT = 0.25
T_FIB = 0.30
T_OPT = 0.95


@dataclass(frozen=True)
class Constant:
    value: float
    unit: str
    source: str


# name -> constant; "ghz_figure" values follow the frequency convention,
# "ghz" values are ordinary frequencies.
CONSTANTS: dict[str, dict[str, Constant]] = {
    "BA_BA": {
        "tau_ns": Constant(8.0, "ns", "137Ba+ 2P1/2 natural excited-state lifetime"),
        "L": Constant(0.625, "1", "2P1/2 F=1 -> 2D3/2 F=1 transition probability (5/8)"),
        "nu_hfs_ghz": Constant(-0.335, "ghz", "2D3/2 F=1/F=2 hyperfine splitting"),
        "kappa2_ghz": Constant(0.05, "ghz_figure", "filter cavity decay rate of mode 2"),
        "xi": Constant(0.15, "1", "relative branching ratio of sigma-polarized emission"),
        "theta": Constant(0.12, "1", "ion photon collection efficiency"),
        "theta_bell": Constant(THETA_BELL, "1", "probability of detecting the psi- Bell state"),
        "d_pmt": Constant(D_PMT, "1", "PMT quantum efficiency"),
        "t_fib": Constant(T_FIB, "1", "fiber coupling and transmission"),
        "t_opt": Constant(T_OPT, "1", "optics transmission"),
        "rep_rate_hz": Constant(5e6, "Hz", "ion state-preparation repetition rate"),
        "window_ns": Constant(45.0, "ns", "detection window of the Ba+ region"),
    },
    "NV_NV": {
        "tau0_ns": Constant(12.0, "ns", "NV natural excited-state lifetime"),
        "xi0_zpl": Constant(0.03, "1", "natural zero-phonon-line branching ratio"),
        "q2": Constant(500.0, "1", "quality factor of the lower-quality cavity"),
        "theta_bell": Constant(THETA_BELL, "1", "probability of detecting the psi- Bell state"),
        "d_pmt": Constant(D_PMT, "1", "PMT quantum efficiency"),
        "t_fib": Constant(T_FIB, "1", "fiber coupling and transmission"),
        "t_opt": Constant(T_OPT, "1", "optics transmission"),
        "rep_rate_hz": Constant(1e5, "Hz", "NV repetition rate"),
        "window_ns": Constant(45.0, "ns", "reference detection window"),
    },
    "QD_YB": {
        "tau1_ns": Constant(0.3, "ns", "InAs quantum-dot trion lifetime"),
        "tau2_ns": Constant(37.7, "ns", "171Yb+ 3[3/2]1/2 excited-state lifetime"),
        "xi1": Constant(1.0, "1", "assumed quantum-dot branching ratio"),
        "xi2": Constant(0.018, "1", "171Yb+ 935 nm branching ratio"),
        "theta1": Constant(0.10, "1", "quantum-dot collection efficiency"),
        "theta2": Constant(0.12, "1", "171Yb+ collection efficiency"),
        "theta_bell": Constant(THETA_BELL, "1", "probability of detecting the psi- Bell state"),
        "d_pmt": Constant(D_PMT, "1", "PMT quantum efficiency"),
        "t_fib": Constant(T_FIB, "1", "fiber coupling and transmission"),
        "t_opt": Constant(T_OPT, "1", "optics transmission"),
        "rep_rate_hz": Constant(5e6, "Hz", "ion state-preparation repetition rate"),
        "window_ns": Constant(42.0, "ns", "detection window of the hybrid region"),
    },
}

# Free parameters each preset accepts (internal units).
FREE_PARAMS = {
    "BA_BA": ("delta_omega", "kappa1", "kappa2", "dt", "window"),
    "NV_NV": ("delta_omega", "q1", "q2", "window"),
    "QD_YB": ("delta_omega", "kappa1", "dt", "window"),
}


@dataclass(frozen=True)
class EfficiencyChain:
    theta_bell: float = THETA_BELL
    d_pmt: float = D_PMT
    t_fib: float = T_FIB
    t_opt: float = T_OPT
    # per-source branching (xi) and collection (theta) entries
    xi1: float = 1.0
    xi2: float = 1.0
    theta1: float = 1.0
    theta2: float = 1.0

    def __post_init__(self):
        for name in ("theta_bell", "d_pmt", "t_fib", "t_opt", "xi1", "xi2", "theta1", "theta2"):
            value = getattr(self, name)
            if not 0 < value <= 1:
                raise ValueError(f"efficiency entry {name} must lie in (0, 1], got {value}")

    def product(self, eta: float) -> float:
        link = self.d_pmt * self.t_fib * self.t_opt
        return self.theta_bell * eta * self.xi1 * self.xi2 * self.theta1 * self.theta2 * link**2


def enhanced_branching(Q: float, xi0: float) -> float:
    """Zero-phonon-line branching ratio of a Purcell-enhanced NV centre."""
    if Q < 0:
        raise ValueError(f"quality factor must be non-negative, got {Q}")
    xi0 = check_probability(xi0, "xi0")
    if math.isinf(Q):
        return 1.0
    p = purcell_factor(Q)
    return xi0 * (p + 1.0) / (p * xi0 + 1.0)


def cavity_fraction(Q: float) -> float:
    """Fraction of emission into the cavity mode, p/(p+1)."""
    if Q < 0:
        raise ValueError(f"quality factor must be non-negative, got {Q}")
    if math.isinf(Q):
        return 1.0
    p = purcell_factor(Q)
    return p / (p + 1.0)


@dataclass(frozen=True)
class SystemPreset:
    name: str
    params: Mapping[str, float]
    rep_rate: float
    eta_mode: EtaMode
    constants: Mapping[str, Constant] = field(repr=False)

    def __post_init__(self):
        if not self.rep_rate > 0:
            raise ValueError("repetition rate must be positive")

    def with_params(self, **overrides) -> "SystemPreset":
        unknown = set(overrides) - set(FREE_PARAMS[self.name])
        if unknown:
            raise KeyError(f"{self.name} has no free parameter(s) {sorted(unknown)}")
        merged = dict(self.params)
        merged.update({k: float(v) for k, v in overrides.items()})
        return replace(self, params=MappingProxyType(merged))

    @property
    def window(self) -> float:
        return self.params["window"]

    def sources(self) -> tuple[SourceModel, SourceModel]:
        c = {k: v.value for k, v in self.constants.items()}
        p = self.params
        if self.name == "BA_BA":
            ion = TwoChannel(c["tau_ns"], 0.0, c["L"], to_angular(c["nu_hfs_ghz"]))
            s1 = Delayed(Filtered(ion, FilterSpec(p["kappa1"])), p["dt"])
            s2 = Filtered(ion, FilterSpec(p["kappa2"]))
        elif self.name == "NV_NV":
            s1 = CavityEnhancedNV(c["tau0_ns"], p["q1"], c["xi0_zpl"])
            s2 = CavityEnhancedNV(c["tau0_ns"], p["q2"], c["xi0_zpl"])
        else:
            dot = Bare(c["tau1_ns"])
            s1 = Delayed(Filtered(dot, FilterSpec(p["kappa1"])), p["dt"])
            s2 = Bare(c["tau2_ns"])
        return s1, s2

    def pair(self) -> PhotonPair:
        s1, s2 = self.sources()
        return PhotonPair(realize(s1), realize(s2), self.params["delta_omega"])

    def chain(self) -> EfficiencyChain:
        c = {k: v.value for k, v in self.constants.items()}
        if self.name == "BA_BA":
            # xi and theta enter squared, once per ion
            return EfficiencyChain(xi1=c["xi"], xi2=c["xi"], theta1=c["theta"], theta2=c["theta"])
        if self.name == "NV_NV":
            q1, q2 = self.params["q1"], self.params["q2"]
            return EfficiencyChain(
                xi1=enhanced_branching(q1, c["xi0_zpl"]),
                xi2=enhanced_branching(q2, c["xi0_zpl"]),
                theta1=cavity_fraction(q1),
                theta2=cavity_fraction(q2),
            )
        return EfficiencyChain(xi1=c["xi1"], xi2=c["xi2"], theta1=c["theta1"], theta2=c["theta2"])


def preset(name: str, convention: Convention | str | None = None, eta_mode: EtaMode | str | None = None) -> SystemPreset:
    """Build a preset with its default free parameters.

    Ba+ and hybrid presets integrate the filtered profiles for the detection
    efficiency (so filter loss enters the rate); the NV preset uses the
    closed form.
    """
    key = str(name).upper()
    if key not in CONSTANTS:
        raise UnknownPreset(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    consts = CONSTANTS[key]
    if key == "BA_BA":
        kappa = figure_to_angular(consts["kappa2_ghz"].value, convention)
        params = {"delta_omega": 0.0, "kappa1": kappa, "kappa2": kappa, "dt": 0.0}
        default_mode = EtaMode.PROFILE
    elif key == "NV_NV":
        params = {"delta_omega": 0.0, "q1": consts["q2"].value, "q2": consts["q2"].value}
        default_mode = EtaMode.CLOSED_FORM
    else:
        # filter matched to the Yb+ lifetime: pi kappa = 1/tau2
        params = {"delta_omega": 0.0, "kappa1": 1.0 / (math.pi * consts["tau2_ns"].value), "dt": 0.0}
        default_mode = EtaMode.PROFILE
    params["window"] = consts["window_ns"].value
    mode = default_mode if eta_mode is None else EtaMode.parse(eta_mode)
    return SystemPreset(key, MappingProxyType(params), consts["rep_rate_hz"].value, mode, MappingProxyType(consts))


def _resolve(system: SystemPreset, window: float | None, free_params: dict) -> SystemPreset:
    if window is not None:
        free_params = {**free_params, "window": window}
    return system.with_params(**free_params) if free_params else system


def net_efficiency(system: SystemPreset, window: float | None = None, eta: float | None = None, **free_params) -> float:
    """Probability per attempt of a heralded entangled pair.

    ``eta`` overrides the two-photon detection efficiency (e.g. ``eta=1``
    for the long-window limit); otherwise it is computed per the preset's
    ``eta_mode``.
    """
    system = _resolve(system, window, free_params)
    if eta is None:
        eta = detection_efficiency(system.pair(), system.window, system.eta_mode)
    return system.chain().product(eta)


def entanglement_rate(system: SystemPreset, window: float | None = None, eta: float | None = None, **free_params) -> float:
    """Heralded entanglement rate in Hz."""
    system = _resolve(system, window, free_params)
    return system.rep_rate * net_efficiency(system, eta=eta)
