"""Two-photon interference at a 50:50 beamsplitter.

Joint detection probabilities (JDPs) are integrated over the first detection
time t at fixed detector delay t_d, then windowed over t_d in [-W/2, W/2].
The noninterfering JDP is (1/2)[P1(t) P2(t+t_d) + P2(t) P1(t+t_d)]; the
interfering JDP is half of that minus (1/2) Re[chi(t) conj chi(t+t_d)], with
chi(t) = sum over shared channel labels of amp1(t) conj amp2(t).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    DegenerateIntensities,
    NonConvergence,
    NonPositiveLifetime,
    ProbabilityRange,
    check_lifetime,
    check_window,
)
from .numerics import (
    ExpSum,
    QuadratureSettings,
    adaptive_integrate,
    correlation,
    windowed_correlation,
)
from .sources import Envelope


class EtaMode(enum.Enum):
    CLOSED_FORM = "closed"
    PROFILE = "profile"

    @classmethod
    def parse(cls, value: "EtaMode | str") -> "EtaMode":
        if isinstance(value, EtaMode):
            return value
        key = str(value).lower()
        aliases = {"closed": cls.CLOSED_FORM, "closed_form": cls.CLOSED_FORM, "profile": cls.PROFILE}
        if key not in aliases:
            raise ValueError(f"unknown eta mode {value!r}")
        return aliases[key]


@dataclass(frozen=True)
class PhotonPair:
    env1: Envelope
    env2: Envelope
    delta_omega: float = 0.0

    @property
    def shifted_env1(self) -> Envelope:
        return self.env1.with_carrier_shift(self.delta_omega)

    def swapped(self) -> "PhotonPair":
        """Same physics with the input ports exchanged."""
        return PhotonPair(self.env2.with_carrier_shift(-self.delta_omega), self.env1)


@dataclass(frozen=True)
class InterferenceResult:
    i_max: float
    i_min: float
    visibility: float
    fidelity: float
    eta_window: float
    eta_profile: float


# -- closed forms for bare exponential photons --------------------------------


def jdp_noninterfering_closed(tau1: float, tau2: float, t_d) -> np.ndarray:
    tau1, tau2 = check_lifetime(tau1, "tau1"), check_lifetime(tau2, "tau2")
    a = np.abs(np.asarray(t_d, dtype=float))
    return (np.exp(-a / tau1) + np.exp(-a / tau2)) / (2.0 * (tau1 + tau2))


def jdp_interfering_closed(tau1: float, tau2: float, delta_omega: float, t_d) -> np.ndarray:
    tau1, tau2 = check_lifetime(tau1, "tau1"), check_lifetime(tau2, "tau2")
    t_d = np.asarray(t_d, dtype=float)
    s = (tau1 + tau2) / (2.0 * tau1 * tau2)
    cross = np.cos(t_d * delta_omega) * np.exp(-np.abs(t_d) * s) / (2.0 * (tau1 + tau2))
    return jdp_noninterfering_closed(tau1, tau2, t_d) / 2.0 - cross


def i_max_closed(tau1: float, tau2: float, window: float) -> float:
    tau1, tau2 = check_lifetime(tau1, "tau1"), check_lifetime(tau2, "tau2")
    w = check_window(window)
    return (-tau1 * math.expm1(-w / (2 * tau1)) - tau2 * math.expm1(-w / (2 * tau2))) / (tau1 + tau2)


def i_min_closed(tau1: float, tau2: float, delta_omega: float, window: float) -> float:
    """Windowed interfering intensity, I_max/2 minus the windowed cross term."""
    tau1, tau2 = check_lifetime(tau1, "tau1"), check_lifetime(tau2, "tau2")
    w = check_window(window)
    s = (tau1 + tau2) / (4 * tau1 * tau2)
    p = tau1 * tau2
    if math.isfinite(w):
        half = w * delta_omega / 2.0
        decay = math.exp(-w * s)
        # (tau1 + tau2)(e^{W s} - cos) e^{-W s} rewritten to avoid overflow
        bracket = 2 * p * delta_omega * math.sin(half) * decay + (tau1 + tau2) * (1.0 - math.cos(half) * decay)
    else:
        bracket = tau1 + tau2
    numer = 2 * p * bracket
    denom = (tau1 + tau2) * (tau1**2 * (4 * delta_omega**2 * tau2**2 + 1) + 2 * p + tau2**2)
    return i_max_closed(tau1, tau2, w) / 2.0 - numer / denom


def _bare_params(env: Envelope) -> tuple[float, float]:
    term = env.channels[0].terms[0]
    g = complex(term.rate)
    return 1.0 / (2.0 * g.real), g.imag


# -- general envelopes ---------------------------------------------------------


def intensity_expsum(env: Envelope) -> ExpSum:
    """Temporal profile P(t) as a single exponential sum."""
    coefs, rates = [], []
    for ch in env.channels:
        c, g = ch.coefficients, ch.rates
        coefs.append(np.outer(c, c.conj()).ravel())
        rates.append(np.add.outer(g, g.conj()).ravel())
    return ExpSum(np.concatenate(coefs), np.concatenate(rates), env.start)


def coherence_expsum(env1: Envelope, env2: Envelope) -> ExpSum:
    """chi(t) = sum over shared labels of amp1(t) conj amp2(t)."""
    start = max(env1.start, env2.start)
    lag1, lag2 = start - env1.start, start - env2.start
    coefs, rates = [], []
    for ch1 in env1.channels:
        if ch1.label not in env2.labels:
            continue
        ch2 = env2.channel(ch1.label)
        c1 = ch1.coefficients * np.exp(-ch1.rates * lag1)
        c2 = (ch2.coefficients * np.exp(-ch2.rates * lag2)).conj()
        coefs.append(np.outer(c1, c2).ravel())
        rates.append(np.add.outer(ch1.rates, ch2.rates.conj()).ravel())
    if not coefs:
        return ExpSum([], [], start)
    return ExpSum(np.concatenate(coefs), np.concatenate(rates), start)


def mutual_coherence(pair: PhotonPair, t) -> np.ndarray:
    chi = coherence_expsum(pair.shifted_env1, pair.env2)
    out = chi(t)
    return out if np.ndim(out) else complex(out)


class _PairTerms:
    """Exponential sums shared by every JDP evaluation of one pair."""

    def __init__(self, pair: PhotonPair):
        env1 = pair.shifted_env1
        self.p1 = intensity_expsum(env1)
        self.p2 = intensity_expsum(pair.env2)
        self.chi = coherence_expsum(env1, pair.env2)
        self.chi_bar = self.chi.conj()

    def jdp(self, t_d, interfering: bool) -> np.ndarray:
        non = 0.5 * (correlation(self.p1, self.p2, t_d) + correlation(self.p2, self.p1, t_d)).real
        if not interfering:
            return non
        return 0.5 * non - 0.5 * correlation(self.chi, self.chi_bar, t_d).real

    def windowed(self, lo: float, hi: float) -> tuple[float, float]:
        non = 0.5 * (windowed_correlation(self.p1, self.p2, lo, hi) + windowed_correlation(self.p2, self.p1, lo, hi)).real
        cross = windowed_correlation(self.chi, self.chi_bar, lo, hi).real
        return non, 0.5 * non - 0.5 * cross


def _quadrature_jdp(pair: PhotonPair, t_d: float, interfering: bool, settings: QuadratureSettings) -> float:
    env1, env2 = pair.shifted_env1, pair.env2
    labels1, labels2 = env1.labels, env2.labels

    def amps(env, labels, t):
        return {lab: complex(env.amplitude(t, lab)) for lab in labels}

    def integrand(t: float) -> float:
        a1, b1 = amps(env1, labels1, t), amps(env1, labels1, t + t_d)
        a2, b2 = amps(env2, labels2, t), amps(env2, labels2, t + t_d)
        if not interfering:
            p1 = sum(abs(v) ** 2 for v in a1.values())
            p2 = sum(abs(v) ** 2 for v in a2.values())
            q1 = sum(abs(v) ** 2 for v in b1.values())
            q2 = sum(abs(v) ** 2 for v in b2.values())
            return 0.5 * (p1 * q2 + p2 * q1)
        # coincidence amplitude for output labels (c at port 3 time t, c' at port 4 time t + t_d)
        total = 0.0
        for c in set(labels1) | set(labels2):
            for cp in set(labels1) | set(labels2):
                amp = a1.get(c, 0) * b2.get(cp, 0) - a2.get(c, 0) * b1.get(cp, 0)
                total += abs(amp) ** 2
        return 0.25 * total

    lo = min(env1.start, env2.start, env1.start - t_d, env2.start - t_d)
    breaks = [env1.start, env2.start, env1.start - t_d, env2.start - t_d]
    decay = max(env1.slowest_decay_time, env2.slowest_decay_time)
    report = adaptive_integrate(integrand, lo, math.inf, settings, breaks, decay)
    return report.value


def jdp_numeric(
    pair: PhotonPair,
    t_d,
    interfering: bool,
    method: str = "expsum",
    settings: QuadratureSettings = QuadratureSettings(rel_tol=1e-11, abs_tol=1e-15),
):
    """JDP of an arbitrary envelope pair at detector delay ``t_d``.

    ``method="expsum"`` integrates the exponential sums exactly;
    ``method="quadrature"`` integrates the beamsplitter coincidence
    amplitude |A1(t)A2(t+t_d) - A2(t)A1(t+t_d)|^2/4 adaptively.
    """
    if method == "expsum":
        out = _PairTerms(pair).jdp(t_d, interfering)
        return out if np.ndim(out) else float(out)
    if method == "quadrature":
        if np.ndim(t_d):
            return np.array([_quadrature_jdp(pair, float(x), interfering, settings) for x in np.ravel(t_d)]).reshape(np.shape(t_d))
        return _quadrature_jdp(pair, float(t_d), interfering, settings)
    raise ValueError(f"unknown method {method!r}")


def windowed_intensities(
    pair: PhotonPair,
    window: float,
    method: str = "expsum",
    settings: QuadratureSettings = QuadratureSettings(rel_tol=1e-11, abs_tol=1e-15),
) -> tuple[float, float]:
    """(I_max, I_min) without the bare-pair closed forms.

    ``expsum`` integrates the correlation kernels exactly; ``quadrature``
    integrates the exact JDP over the detector delay adaptively.
    """
    w = check_window(window)
    terms = _PairTerms(pair)
    if method == "expsum":
        return terms.windowed(-w / 2, w / 2)
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    # kinks where the kernel switches branch: differences of turn-on times
    starts = {pair.env1.start, pair.env2.start}
    kinks = sorted({b - a for a in starts for b in starts} | {0.0})
    decay = max(pair.env1.slowest_decay_time, pair.env2.slowest_decay_time)
    out = []
    for interfering in (False, True):
        f = lambda x, i=interfering: float(terms.jdp(x, i))
        if math.isinf(w):
            # integrate each half-line separately so the tail cutoff applies
            reports = [
                adaptive_integrate(lambda x: f(-x), -min(kinks), math.inf, settings, [-k for k in kinks], decay),
                adaptive_integrate(f, min(kinks), math.inf, settings, kinks, decay),
            ]
        else:
            reports = [adaptive_integrate(f, -w / 2, w / 2, settings, kinks)]
        if not all(r.converged for r in reports):
            err = sum(r.error_estimate for r in reports)
            raise NonConvergence(f"adaptive quadrature missed tolerance (error estimate {err:.3g})")
        out.append(sum(r.value for r in reports))
    return out[0], out[1]


def _use_closed_form(pair: PhotonPair) -> bool:
    return pair.env1.is_bare() and pair.env2.is_bare()


def i_max(pair: PhotonPair, window: float) -> float:
    w = check_window(window)
    if _use_closed_form(pair):
        return i_max_closed(_bare_params(pair.env1)[0], _bare_params(pair.env2)[0], w)
    return _PairTerms(pair).windowed(-w / 2, w / 2)[0]


def i_min(pair: PhotonPair, window: float) -> float:
    w = check_window(window)
    if _use_closed_form(pair):
        (t1, w1), (t2, w2) = _bare_params(pair.env1), _bare_params(pair.env2)
        return max(i_min_closed(t1, t2, w1 + pair.delta_omega - w2, w), 0.0)
    return max(_PairTerms(pair).windowed(-w / 2, w / 2)[1], 0.0)


def visibility(i_max: float, i_min: float) -> float:
    if not i_max > 0:
        raise DegenerateIntensities(f"I_max must be positive, got {i_max}")
    return (i_max - i_min) / (i_max + i_min)


def fidelity(v: float) -> float:
    """Heralded-state fidelity 1/(2 - V^2)."""
    if not (-1e-12 <= v <= 1 + 1e-12):
        raise ProbabilityRange(f"visibility must lie in [0, 1], got {v}")
    v = min(max(v, 0.0), 1.0)
    return 1.0 / (2.0 - v * v)


def _window_fraction(env: Envelope, window: float) -> float:
    return ExpSum.integrate(intensity_expsum(env), 0.0, window).real


def detection_efficiency(pair: PhotonPair, window: float, mode: EtaMode | str = EtaMode.PROFILE) -> float:
    """Probability that both photons arrive within [0, W].

    CLOSED_FORM uses the emitters' nominal lifetimes; PROFILE integrates the
    actual (filtered, delayed, possibly lossy) temporal profiles.
    """
    w = check_window(window)
    if EtaMode.parse(mode) is EtaMode.CLOSED_FORM:
        taus = (pair.env1.nominal_tau, pair.env2.nominal_tau)
        if None in taus:
            raise NonPositiveLifetime("closed-form efficiency needs nominal lifetimes on both envelopes")
        return -math.expm1(-w / taus[0]) * -math.expm1(-w / taus[1])
    return _window_fraction(pair.env1, w) * _window_fraction(pair.env2, w)


def interfere(pair: PhotonPair, window: float) -> InterferenceResult:
    w = check_window(window)
    if _use_closed_form(pair):
        (t1, w1), (t2, w2) = _bare_params(pair.env1), _bare_params(pair.env2)
        hi = i_max_closed(t1, t2, w)
        lo = max(i_min_closed(t1, t2, w1 + pair.delta_omega - w2, w), 0.0)
    else:
        hi, lo = _PairTerms(pair).windowed(-w / 2, w / 2)
        lo = max(lo, 0.0)
    v = visibility(hi, lo)
    if pair.env1.nominal_tau is not None and pair.env2.nominal_tau is not None:
        eta_window = detection_efficiency(pair, w, EtaMode.CLOSED_FORM)
    else:
        eta_window = math.nan
    eta_profile = detection_efficiency(pair, w, EtaMode.PROFILE)
    return InterferenceResult(hi, lo, v, fidelity(v), eta_window, eta_profile)
