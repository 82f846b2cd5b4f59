"""Photon wavepacket envelopes as sums of decaying complex exponentials.

A channel amplitude is ``sum_k c_k exp(-g_k (t - start))`` for ``t >= start``
and exactly zero before.  ``Re(g_k) > 0`` for every term.  A carrier at
detuning ``w`` enters as ``g = 1/(2 tau) + i w`` so the spectral profile
peaks at ``omega' = w``.  Channels with different labels are orthogonal
(distinguishable decay branches); channels sharing a label interfere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Union

import numpy as np

from .core import (
    DegeneratePole,
    NonPositiveLifetime,
    check_lifetime,
    check_probability,
)


@dataclass(frozen=True)
class ExpTerm:
    coefficient: complex
    rate: complex

    def __post_init__(self):
        if not complex(self.rate).real > 0:
            raise ValueError(f"exponential term must decay, got rate {self.rate}")


@dataclass(frozen=True)
class Channel:
    label: str
    terms: tuple[ExpTerm, ...]

    def __post_init__(self):
        if not self.terms:
            raise ValueError(f"channel {self.label!r} has no terms")

    @cached_property
    def coefficients(self) -> np.ndarray:
        return np.array([complex(term.coefficient) for term in self.terms])

    @cached_property
    def rates(self) -> np.ndarray:
        return np.array([complex(term.rate) for term in self.terms])


@dataclass(frozen=True)
class Envelope:
    """Single-photon wavepacket.

    ``nominal_tau`` is the emitter lifetime the closed-form detection
    efficiency uses; filtering and delays leave it untouched.
    """

    channels: tuple[Channel, ...]
    start: float = 0.0
    nominal_tau: float | None = None

    def __post_init__(self):
        labels = [ch.label for ch in self.channels]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate channel labels {labels}")
        if not self.channels:
            raise ValueError("envelope needs at least one channel")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(ch.label for ch in self.channels)

    def channel(self, label: str) -> Channel:
        for ch in self.channels:
            if ch.label == label:
                return ch
        raise KeyError(label)

    @property
    def n_terms(self) -> int:
        return sum(len(ch.terms) for ch in self.channels)

    @property
    def slowest_decay_time(self) -> float:
        """Longest 1/e time of the intensity, in ns."""
        return max(1.0 / (2.0 * ch.rates.real.min()) for ch in self.channels)

    def amplitude(self, t, label: str | None = None) -> np.ndarray:
        """Complex amplitude of one channel (default: the first) at times ``t``."""
        ch = self.channels[0] if label is None else self.channel(label)
        t = np.asarray(t, dtype=float)
        s = t - self.start
        on = s >= 0
        s = np.where(on, s, 0.0)
        vals = np.exp(-np.multiply.outer(s, ch.rates)) @ ch.coefficients
        return np.where(on, vals, 0.0)

    def channel_norm(self, label: str) -> float:
        ch = self.channel(label)
        c, g = ch.coefficients, ch.rates
        gram = np.outer(c, c.conj()) / np.add.outer(g, g.conj())
        return float(gram.sum().real)

    def norm(self) -> float:
        """Total detection probability, sum over channels of the integral of |amp|^2."""
        return sum(self.channel_norm(ch.label) for ch in self.channels)

    def with_carrier_shift(self, delta_omega: float) -> "Envelope":
        """Add a detuning to every term (the carrier offset of the photon)."""
        if delta_omega == 0:
            return self
        shifted = tuple(
            Channel(ch.label, tuple(ExpTerm(t.coefficient, t.rate + 1j * delta_omega) for t in ch.terms))
            for ch in self.channels
        )
        return replace(self, channels=shifted)

    def is_bare(self) -> bool:
        """True for an unfiltered, undelayed single-exponential photon of unit norm."""
        if len(self.channels) != 1 or len(self.channels[0].terms) != 1 or self.start != 0:
            return False
        term = self.channels[0].terms[0]
        tau = 1.0 / (2.0 * complex(term.rate).real)
        return math.isclose(abs(term.coefficient) ** 2 * tau, 1.0, rel_tol=1e-12)


@dataclass(frozen=True)
class FilterSpec:
    """Single-mode Lorentzian cavity filter.

    ``kappa`` enters the transfer function through ``pi * kappa``; the
    intensity transmission has FWHM ``pi * kappa`` in rad/ns.  ``center`` is
    the resonance detuning in rad/ns.
    """

    kappa: float
    center: float = 0.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"filter kappa must be positive, got {self.kappa}")

    @property
    def pole(self) -> complex:
        """Decay rate of the filter's impulse response (rad/ns)."""
        return math.pi * self.kappa / 2.0 + 1j * self.center


def bare_envelope(tau: float, omega: float = 0.0) -> Envelope:
    tau = check_lifetime(tau)
    term = ExpTerm(1.0 / math.sqrt(tau), 1.0 / (2.0 * tau) + 1j * omega)
    return Envelope((Channel("a", (term,)),), 0.0, tau)


def two_channel_envelope(tau: float, omega: float, L: float, omega_hfs: float) -> Envelope:
    """Photon from an excited state decaying into two distinguishable ground levels.

    Channel ``a`` carries branching probability ``L`` at the carrier; channel
    ``b`` carries ``1 - L`` shifted by ``omega_hfs``.
    """
    tau = check_lifetime(tau)
    L = check_probability(L, "L")
    gamma = 1.0 / (2.0 * tau)
    a = Channel("a", (ExpTerm(math.sqrt(L / tau), gamma + 1j * omega),))
    b = Channel("b", (ExpTerm(math.sqrt((1.0 - L) / tau), gamma + 1j * (omega + omega_hfs)),))
    return Envelope((a, b), 0.0, tau)


def temporal_profile(env: Envelope, t) -> np.ndarray:
    """Detection probability density sum_c |amp_c(t)|^2 in 1/ns."""
    t = np.asarray(t, dtype=float)
    total = np.zeros(t.shape)
    for ch in env.channels:
        total = total + np.abs(env.amplitude(t, ch.label)) ** 2
    return total if total.ndim else float(total)


def spectral_amplitude(env: Envelope, omega_prime, label: str | None = None) -> np.ndarray:
    """Fourier amplitude (1/sqrt(2 pi)) * int amp(t) e^{i w' t} dt of one channel.

    The phase is taken relative to the turn-on time.
    """
    ch = env.channels[0] if label is None else env.channel(label)
    w = np.asarray(omega_prime, dtype=float)
    denom = np.subtract.outer(-1j * w, -ch.rates)  # g_k - i w'
    return (ch.coefficients / denom).sum(axis=-1) / math.sqrt(2.0 * math.pi)


def spectral_profile(env: Envelope, omega_prime) -> np.ndarray:
    """Spectral density sum_c |s_c(w')|^2 in ns (integrates to the norm)."""
    w = np.asarray(omega_prime, dtype=float)
    total = np.zeros(w.shape)
    for ch in env.channels:
        total = total + np.abs(spectral_amplitude(env, w, ch.label)) ** 2
    return total if total.ndim else float(total)


def filter_response(filt: FilterSpec, omega_prime) -> np.ndarray:
    """Complex filter mode function f(w') = pi k / (pi k - 2 i (w' - center))."""
    w = np.asarray(omega_prime, dtype=float)
    pk = math.pi * filt.kappa
    return pk / (pk - 2j * (w - filt.center))


def filter_transmission(filt: FilterSpec, omega_prime) -> np.ndarray:
    w = np.asarray(omega_prime, dtype=float)
    pk2 = (math.pi * filt.kappa) ** 2
    out = pk2 / (pk2 + 4.0 * (w - filt.center) ** 2)
    return out if out.ndim else float(out)


def apply_filter(env: Envelope, filt: FilterSpec) -> Envelope:
    """Pass the photon through a Lorentzian filter, exactly.

    In the frequency domain each term c/(g - i w') is multiplied by
    a/(d - i w') with a = pi kappa / 2 and d the filter pole.  Partial
    fractions give a term at the original rate with coefficient
    c a/(d - g) and one at the pole with the opposite coefficient.  Pole
    terms within a channel are merged.
    """
    pole = filt.pole
    half_width = math.pi * filt.kappa / 2.0
    channels = []
    for ch in env.channels:
        terms = []
        pole_coef = 0j
        for term in ch.terms:
            g = complex(term.rate)
            gap = pole - g
            if abs(gap) <= 1e-12 * max(abs(g), abs(pole)):
                raise DegeneratePole(
                    f"filter pole {pole} coincides with term rate {g}; perturb kappa slightly"
                )
            k = complex(term.coefficient) * half_width / gap
            terms.append(ExpTerm(k, g))
            pole_coef -= k
        terms.append(ExpTerm(pole_coef, pole))
        channels.append(Channel(ch.label, tuple(terms)))
    return Envelope(tuple(channels), env.start, env.nominal_tau)


def purcell_factor(Q: float) -> float:
    """Purcell enhancement 3Q/(4 pi^2) for a mode volume of one cubic wavelength."""
    return 3.0 * Q / (4.0 * math.pi**2)


def cavity_enhanced_lifetime(tau0: float, Q: float, xi0: float) -> float:
    tau0 = check_lifetime(tau0, "tau0")
    if Q < 0:
        raise ValueError(f"quality factor must be non-negative, got {Q}")
    xi0 = check_probability(xi0, "xi0")
    if xi0 == 0:
        raise NonPositiveLifetime("xi0 must be positive")
    return tau0 / (1.0 + purcell_factor(Q) * xi0)


def delay_envelope(env: Envelope, dt: float) -> Envelope:
    if dt == 0:
        return env
    return replace(env, start=env.start + float(dt))


# -- source models ----------------------------------------------------------


@dataclass(frozen=True)
class Bare:
    tau: float
    omega: float = 0.0


@dataclass(frozen=True)
class TwoChannel:
    tau: float
    omega: float
    L: float
    omega_hfs: float


@dataclass(frozen=True)
class CavityEnhancedNV:
    tau0: float
    Q: float
    xi0: float
    omega: float = 0.0


@dataclass(frozen=True)
class Filtered:
    inner: "SourceModel"
    filter: FilterSpec


@dataclass(frozen=True)
class Delayed:
    inner: "SourceModel"
    dt: float


SourceModel = Union[Bare, TwoChannel, CavityEnhancedNV, Filtered, Delayed]


def realize(model: SourceModel) -> Envelope:
    """Build the envelope described by a (possibly nested) source model."""
    match model:
        case Bare(tau, omega):
            return bare_envelope(tau, omega)
        case TwoChannel(tau, omega, L, omega_hfs):
            return two_channel_envelope(tau, omega, L, omega_hfs)
        case CavityEnhancedNV(tau0, Q, xi0, omega):
            return bare_envelope(cavity_enhanced_lifetime(tau0, Q, xi0), omega)
        case Filtered(inner, filt):
            return apply_filter(realize(inner), filt)
        case Delayed(inner, dt):
            return delay_envelope(realize(inner), dt)
    raise TypeError(f"not a source model: {model!r}")
