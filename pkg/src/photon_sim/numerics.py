"""Quadrature engines.

The primary path is exact: every quantity the interference code needs is an
integral of products of half-line exponential sums, which have closed-form
antiderivatives.  ``adaptive_integrate`` (QUADPACK via scipy) is the general
fallback and the cross-check; ``fft_filter_oracle`` inverts the filtered
spectrum numerically and exists only to test ``apply_filter``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate as _integrate

from .core import DivergentIntegral, GridTooCoarse
from .sources import Envelope, ExpTerm, FilterSpec, filter_response, spectral_amplitude


@dataclass(frozen=True)
class QuadratureSettings:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_depth: int = 40
    tail_cutoff: float = 40.0

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_depth < 10:
            raise ValueError("max_depth must be at least 10")


@dataclass(frozen=True)
class IntegrationReport:
    value: float | complex
    error_estimate: float
    evaluations: int
    converged: bool


def integrate_expsum_product(
    terms_a: Sequence[ExpTerm], terms_b: Sequence[ExpTerm], lo: float, hi: float = math.inf
) -> complex:
    """Exact integral of (sum_a c_a e^{-g_a t}) * conj(sum_b c_b e^{-g_b t}) over [lo, hi]."""
    ca = np.array([complex(t.coefficient) for t in terms_a])
    ga = np.array([complex(t.rate) for t in terms_a])
    cb = np.array([complex(t.coefficient) for t in terms_b])
    gb = np.array([complex(t.rate) for t in terms_b])
    return ExpSum(np.outer(ca, cb.conj()).ravel(), np.add.outer(ga, gb.conj()).ravel()).integrate(lo, hi)


def _exp_integral(rate: np.ndarray, x0: float, x1: float) -> np.ndarray:
    """int_{x0}^{x1} e^{-rate x} dx elementwise; x1 may be +inf."""
    head = np.exp(-rate * x0)
    if math.isinf(x1):
        return head / rate
    return head * -np.expm1(-rate * (x1 - x0)) / rate


class ExpSum:
    """h(t) = sum_k a_k exp(-r_k (t - start)) for t >= start, zero before."""

    __slots__ = ("coef", "rate", "start")

    def __init__(self, coef, rate, start: float = 0.0):
        self.coef = np.asarray(coef, dtype=complex).ravel()
        self.rate = np.asarray(rate, dtype=complex).ravel()
        self.start = float(start)

    def __len__(self):
        return self.coef.size

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        s = t - self.start
        on = s >= 0
        vals = np.exp(-np.multiply.outer(np.where(on, s, 0.0), self.rate)) @ self.coef
        return np.where(on, vals, 0.0)

    def conj(self) -> "ExpSum":
        return ExpSum(self.coef.conj(), self.rate.conj(), self.start)

    def integrate(self, lo: float = -math.inf, hi: float = math.inf) -> complex:
        lo = max(lo, self.start)
        if hi <= lo or not len(self):
            return 0j
        if math.isinf(hi) and (self.rate.real <= 0).any():
            raise DivergentIntegral("non-decaying combined rate on an infinite interval")
        return complex(self.coef @ _exp_integral(self.rate, lo - self.start, hi - self.start))


def correlation(f: ExpSum, g: ExpSum, td) -> np.ndarray:
    """K(td) = int f(t) g(t + td) dt, exactly.

    For a single pair of terms, with D = start_g - start_f, the integral is
    a b/(alpha + beta) times e^{-beta (td - D)} for td >= D and
    e^{alpha (td - D)} below.
    """
    td = np.asarray(td, dtype=float)
    if not len(f) or not len(g):
        return np.zeros(td.shape, dtype=complex)
    weight = np.outer(f.coef, g.coef) / np.add.outer(f.rate, g.rate)
    u = td - (g.start - f.start)
    pos = u[..., None] >= 0
    uu = np.abs(u)[..., None]
    ef = np.exp(-f.rate * uu)  # used for u < 0: e^{alpha u}
    eg = np.exp(-g.rate * uu)  # used for u >= 0: e^{-beta u}
    out_pos = eg @ weight.sum(axis=0)
    out_neg = ef @ weight.sum(axis=1)
    return np.where(pos[..., 0], out_pos, out_neg)


def windowed_correlation(f: ExpSum, g: ExpSum, lo: float, hi: float) -> complex:
    """int_{lo}^{hi} K(td) dtd with K as in ``correlation``; limits may be infinite."""
    if not len(f) or not len(g) or hi <= lo:
        return 0j
    weight = np.outer(f.coef, g.coef) / np.add.outer(f.rate, g.rate)
    shift = g.start - f.start
    u0, u1 = lo - shift, hi - shift
    total = 0j
    if u1 > 0:
        p0 = max(u0, 0.0)
        total += complex(weight.sum(axis=0) @ _exp_integral(g.rate, p0, u1))
    if u0 < 0:
        n1 = min(u1, 0.0)
        # int_{u0}^{n1} e^{alpha u} du = int_{-n1}^{-u0} e^{-alpha x} dx
        total += complex(weight.sum(axis=1) @ _exp_integral(f.rate, -n1, -u0))
    return total


def adaptive_integrate(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    settings: QuadratureSettings = QuadratureSettings(),
    breakpoints: Iterable[float] = (),
    decay_time: float | None = None,
) -> IntegrationReport:
    """Adaptive Gauss-Kronrod integration of a real function.

    Known discontinuities go in ``breakpoints``.  An infinite upper limit is
    truncated at ``tail_cutoff * decay_time`` past the last breakpoint (or
    ``lo``); the exponential tail beyond it is bounded by |f(cut)| *
    decay_time and folded into the error estimate.  Non-convergence is
    reported through ``converged``, never raised.
    """
    tail_bound = 0.0
    if math.isinf(hi):
        if decay_time is None:
            raise ValueError("decay_time is required for a semi-infinite interval")
        anchor = max([lo, *[b for b in breakpoints if b > lo]])
        hi = anchor + settings.tail_cutoff * decay_time
        tail_bound = abs(float(f(hi))) * decay_time
    edges = sorted({lo, hi, *(b for b in breakpoints if lo < b < hi)})
    value = 0.0
    error = tail_bound
    evals = 0
    ok = True
    for a, b in zip(edges[:-1], edges[1:]):
        v, e, info, *rest = _integrate.quad(
            f,
            a,
            b,
            epsabs=settings.abs_tol / max(len(edges) - 1, 1),
            epsrel=settings.rel_tol,
            limit=settings.max_depth * 5,
            full_output=1,
        )
        value += v
        error += e
        evals += info["neval"]
        ok = ok and not rest
    converged = ok and error <= max(settings.rel_tol * abs(value), settings.abs_tol)
    return IntegrationReport(value, error, evals, converged)


def fft_filter_oracle(env: Envelope, filt: FilterSpec, t_max: float, n_points: int):
    """Filtered amplitude by direct numerical inversion of f(w') s(w').

    The spectrum is sampled analytically on the DFT frequency grid of a
    window of length ``t_max`` and transformed back, so the only errors are
    wrap-around (controlled by ``t_max``) and band-limiting (controlled by
    ``n_points``).  Returns the sample times and a dict label -> samples.
    """
    if n_points < 2**14 or n_points & (n_points - 1):
        raise ValueError("n_points must be a power of two >= 2**14")
    slowest = max(env.slowest_decay_time, 1.0 / (math.pi * filt.kappa))
    if t_max < 20.0 * slowest:
        raise GridTooCoarse(f"t_max={t_max} shorter than 20 x slowest decay time {slowest:.4g}")
    d_omega = 2.0 * math.pi / t_max
    nyquist = d_omega * n_points / 2.0
    widest = max(abs(filt.pole), *(np.abs(ch.rates).max() for ch in env.channels))
    if nyquist < 20.0 * widest:
        raise GridTooCoarse(f"band limit {nyquist:.4g} rad/ns below 20 x widest feature {widest:.4g}")
    omega = np.fft.fftfreq(n_points, d=1.0 / n_points) * d_omega
    times = env.start + np.arange(n_points) * (t_max / n_points)
    response = filter_response(filt, omega)
    out = {}
    for ch in env.channels:
        spectrum = spectral_amplitude(env, omega, ch.label) * response
        out[ch.label] = np.fft.fft(spectrum) * (d_omega / math.sqrt(2.0 * math.pi))
    return times, out
