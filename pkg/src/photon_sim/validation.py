"""Self-validation suites run by ``photon-sim validate``.

Each suite compares two independent routes to the same number (closed form
vs numeric, analytic filter vs FFT inversion, time vs frequency norm) or
checks a structural property.  ``fault="jdp_sign"`` flips the sign of the
interference term in the closed-form oracle to prove the suites can fail.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate as _integrate

from .interference import (
    PhotonPair,
    detection_efficiency,
    i_max_closed,
    i_min_closed,
    interfere,
    jdp_interfering_closed,
    jdp_noninterfering_closed,
    jdp_numeric,
    windowed_intensities,
)
from .numerics import fft_filter_oracle
from .sources import (
    Envelope,
    FilterSpec,
    apply_filter,
    bare_envelope,
    delay_envelope,
    spectral_profile,
    two_channel_envelope,
)
from .systems import PRESET_NAMES, preset

FAULTS = ("jdp_sign",)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    seconds: float = 0.0
    detail: str = ""


@dataclass
class ValidationReport:
    suites: list[SuiteResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)

    @property
    def seconds(self) -> float:
        return sum(s.seconds for s in self.suites)

    def table(self) -> str:
        lines = [f"{'suite':<22} {'result':<6} {'worst':>11} {'tol':>9} {'time_s':>7}"]
        for s in self.suites:
            mark = "PASS" if s.passed else "FAIL"
            lines.append(f"{s.name:<22} {mark:<6} {s.worst:>11.3e} {s.tolerance:>9.1e} {s.seconds:>7.2f}  {s.detail}")
        lines.append(f"{'total':<22} {'PASS' if self.passed else 'FAIL':<6} {'':>11} {'':>9} {self.seconds:>7.2f}")
        return "\n".join(lines)


def _rel(a, b) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    scale = np.maximum(np.abs(b), 1e-300)
    return float(np.max(np.abs(a - b) / scale))


def _oracle_interfering(t1, t2, dw, td, fault):
    p = jdp_interfering_closed(t1, t2, dw, td)
    if fault == "jdp_sign":
        # (1/2)P_D + X instead of (1/2)P_D - X
        return jdp_noninterfering_closed(t1, t2, td) - p
    return p


def random_bare_configs(n: int, seed: int = 2024):
    """(tau1, tau2, delta_omega, window) drawn over the validated ranges."""
    rng = np.random.default_rng(seed)
    tau = rng.uniform(0.3, 40.0, size=(n, 2))
    dw = rng.uniform(-5.0, 5.0, size=n)
    win = rng.uniform(1.0, 200.0, size=n)
    return [(float(a), float(b), float(d), float(w)) for (a, b), d, w in zip(tau, dw, win)]


def closed_vs_numeric(n: int = 200, seed: int = 2024, fault: str | None = None, tol: float = 1e-6) -> SuiteResult:
    """Numeric JDPs and windowed intensities against the bare-pair closed forms."""
    worst = 0.0
    rng = np.random.default_rng(seed + 1)
    for k, (t1, t2, dw, w) in enumerate(random_bare_configs(n, seed)):
        pair = PhotonPair(bare_envelope(t1), bare_envelope(t2), dw)
        td = rng.uniform(-w / 2, w / 2, size=4)
        non = jdp_numeric(pair, td, interfering=False)
        inter = jdp_numeric(pair, td, interfering=True)
        worst = max(worst, _rel(non, jdp_noninterfering_closed(t1, t2, td)))
        # JDP_I can vanish; compare on the scale of JDP_D
        ref_i = _oracle_interfering(t1, t2, dw, td, fault)
        worst = max(worst, float(np.max(np.abs(inter - ref_i) / np.abs(non))))
        if k % 10 == 0:
            q = jdp_numeric(pair, float(td[0]), interfering=True, method="quadrature")
            worst = max(worst, abs(q - float(ref_i[0])) / float(non[0]))
        method = "quadrature" if k % 2 else "expsum"
        hi, lo = windowed_intensities(pair, w, method)
        ref_hi = i_max_closed(t1, t2, w)
        ref_lo = i_min_closed(t1, t2, dw, w)
        if fault == "jdp_sign":
            ref_lo = ref_hi - ref_lo
        worst = max(worst, abs(hi - ref_hi) / ref_hi, abs(lo - ref_lo) / ref_hi)
    return SuiteResult("closed_vs_numeric", worst <= tol, worst, tol, detail=f"{n} bare configs")


def fft_oracle(tol: float = 1e-6, t_lo: float = 0.1, t_hi: float = 80.0) -> SuiteResult:
    """Analytic filtered Ba+ amplitude against direct FFT inversion."""
    system = preset("BA_BA")
    c = {k: v.value for k, v in system.constants.items()}
    raw = two_channel_envelope(c["tau_ns"], 0.0, c["L"], 2 * math.pi * c["nu_hfs_ghz"])
    filt = FilterSpec(system.params["kappa2"])
    env = apply_filter(raw, filt)
    times, numeric = fft_filter_oracle(raw, filt, t_max=400.0, n_points=2**22)
    sel = (times >= t_lo) & (times <= t_hi)
    worst = 0.0
    for label in env.labels:
        exact = env.amplitude(times[sel], label)
        scale = np.abs(exact).max()
        worst = max(worst, float(np.max(np.abs(numeric[label][sel] - exact)) / scale))
    return SuiteResult("fft_oracle", worst <= tol, worst, tol, detail="Ba+ filtered, both channels")


def _spectral_norm(env: Envelope) -> float:
    peaks = sorted({float(-r.imag) for ch in env.channels for r in ch.rates})
    width = min(float(r.real) for ch in env.channels for r in ch.rates)
    f = lambda w: float(spectral_profile(env, w))
    edges = [peaks[0] - 50 * width, *peaks, peaks[-1] + 50 * width]
    total = _integrate.quad(f, -np.inf, edges[0], epsabs=0, epsrel=1e-10, limit=200)[0]
    total += _integrate.quad(f, edges[-1], np.inf, epsabs=0, epsrel=1e-10, limit=200)[0]
    for a, b in zip(edges[:-1], edges[1:]):
        total += _integrate.quad(f, a, b, epsabs=0, epsrel=1e-10, limit=200)[0]
    return total


def parseval_envelopes() -> list[tuple[str, Envelope]]:
    ion = two_channel_envelope(8.0, 0.0, 0.625, 2 * math.pi * -0.335)
    out = [
        ("bare_8", bare_envelope(8.0)),
        ("bare_0.3_detuned", bare_envelope(0.3, 1.5)),
        ("ba_two_channel", ion),
        ("ba_filtered", apply_filter(ion, FilterSpec(0.05))),
        ("ba_filtered_delayed", delay_envelope(apply_filter(ion, FilterSpec(0.04)), -0.8)),
        ("qd_filtered", apply_filter(bare_envelope(0.3), FilterSpec(0.008))),
    ]
    for name in PRESET_NAMES:
        pair = preset(name).pair()
        out += [(f"{name}_1", pair.env1), (f"{name}_2", pair.env2)]
    return out


def parseval(tol: float = 1e-4) -> SuiteResult:
    worst = 0.0
    for _, env in parseval_envelopes():
        worst = max(worst, abs(_spectral_norm(env) - env.norm()) / env.norm())
    return SuiteResult("parseval", worst <= tol, worst, tol, detail="spectral vs temporal norm")


def _physical_pairs(n: int, seed: int):
    rng = np.random.default_rng(seed)
    pairs = []
    for t1, t2, dw, w in random_bare_configs(n, seed):
        dt = float(rng.uniform(-2, 2))
        pairs.append((PhotonPair(delay_envelope(bare_envelope(t1), dt), bare_envelope(t2), dw), w))
    for name in PRESET_NAMES:
        system = preset(name)
        for dw in (0.0, 0.003, -0.02):
            pairs.append((system.with_params(delta_omega=dw).pair(), system.window))
    return pairs


def physicality(n: int = 60, seed: int = 7) -> SuiteResult:
    """JDP >= 0, I_min <= I_max, F in [0.5, 1]."""
    worst = 0.0
    rng = np.random.default_rng(seed)
    for pair, w in _physical_pairs(n, seed):
        td = rng.uniform(-w, w, size=16)
        scale = float(np.max(jdp_numeric(pair, td, interfering=False))) or 1.0
        worst = max(worst, float(-np.min(jdp_numeric(pair, td, interfering=True))) / scale, 0.0)
        res = interfere(pair, w)
        worst = max(worst, (res.i_min - res.i_max) / res.i_max)
        if not 0.5 <= res.fidelity <= 1.0:
            worst = max(worst, 1.0)
    tol = 1e-12
    return SuiteResult("physicality", worst <= tol, worst, tol, detail="jdp>=0, i_min<=i_max, F in [0.5,1]")


def _result_gap(a, b) -> float:
    fields = ("i_max", "i_min", "visibility", "fidelity", "eta_profile")
    return max(abs(getattr(a, f) - getattr(b, f)) for f in fields)


def mirror_symmetry(n: int = 60, seed: int = 11, tol: float = 1e-9) -> SuiteResult:
    """Outputs depend on delta_omega only through |delta_omega|."""
    worst = 0.0
    for pair, w in _physical_pairs(n, seed):
        flipped = PhotonPair(pair.env1, pair.env2, -pair.delta_omega)
        worst = max(worst, _result_gap(interfere(pair, w), interfere(flipped, w)))
    return SuiteResult("mirror_symmetry", worst <= tol, worst, tol)


def swap_symmetry(n: int = 60, seed: int = 13, tol: float = 1e-9) -> SuiteResult:
    """Exchanging the sources (with delta_omega -> -delta_omega) changes nothing."""
    worst = 0.0
    for pair, w in _physical_pairs(n, seed):
        worst = max(worst, _result_gap(interfere(pair, w), interfere(pair.swapped(), w)))
    return SuiteResult("swap_symmetry", worst <= tol, worst, tol)


def tradeoff(n: int = 10, tol: float = 1e-12) -> SuiteResult:
    """Shorter windows buy fidelity with efficiency: F(2 tau) >= F(8 tau), eta(2 tau) <= eta(8 tau)."""
    taus = np.linspace(0.5, 40.0, n)
    worst = 0.0
    for t1 in taus:
        for t2 in taus:
            pair = PhotonPair(bare_envelope(t1), bare_envelope(t2))
            mean = 0.5 * (t1 + t2)
            short, long = interfere(pair, 2 * mean), interfere(pair, 8 * mean)
            eta_s = detection_efficiency(pair, 2 * mean, "closed")
            eta_l = detection_efficiency(pair, 8 * mean, "closed")
            worst = max(worst, long.fidelity - short.fidelity, eta_s - eta_l)
    return SuiteResult("tradeoff", worst <= tol, max(worst, 0.0), tol, detail=f"{n}x{n} lifetime grid")


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "closed_vs_numeric": closed_vs_numeric,
    "fft_oracle": fft_oracle,
    "parseval": parseval,
    "physicality": physicality,
    "mirror_symmetry": mirror_symmetry,
    "swap_symmetry": swap_symmetry,
    "tradeoff": tradeoff,
}


def run_validation(fault: str | None = None, only: list[str] | None = None) -> ValidationReport:
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}")
    report = ValidationReport()
    for name, suite in SUITES.items():
        if only and name not in only:
            continue
        t0 = time.perf_counter()
        res = suite(fault=fault) if name == "closed_vs_numeric" else suite()
        res.seconds = time.perf_counter() - t0
        report.suites.append(res)
    return report
