import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from photon_sim.core import DegeneratePole, NonPositiveLifetime, to_angular
from photon_sim.sources import (
    Bare,
    CavityEnhancedNV,
    Delayed,
    Filtered,
    FilterSpec,
    TwoChannel,
    apply_filter,
    bare_envelope,
    cavity_enhanced_lifetime,
    delay_envelope,
    filter_response,
    filter_transmission,
    purcell_factor,
    realize,
    spectral_profile,
    temporal_profile,
    two_channel_envelope,
)

W_HFS = to_angular(-0.335)


def test_bare_profile_and_norm():
    env = bare_envelope(8.0)
    assert env.norm() == pytest.approx(1.0, rel=1e-14)
    assert temporal_profile(env, 0.0) == pytest.approx(1 / 8)
    assert temporal_profile(env, 8.0) == pytest.approx(math.exp(-1) / 8)
    assert temporal_profile(env, -1.0) == 0.0


def test_bare_rejects_bad_lifetime():
    with pytest.raises(NonPositiveLifetime):
        bare_envelope(0.0)


def test_spectral_peak_and_height():
    env = bare_envelope(8.0, 0.7)
    w = np.linspace(0.0, 1.4, 2801)
    s = spectral_profile(env, w)
    assert w[np.argmax(s)] == pytest.approx(0.7, abs=1e-3)
    # |1/sqrt(tau) / (1/(2 tau))|^2 / (2 pi) = 4 tau / (2 pi)
    assert s.max() == pytest.approx(4 * 8 / (2 * math.pi), rel=1e-6)


def test_two_channel_spectrum_at_zero():
    # independent: L/(tau (g^2)) + (1-L)/(tau (g^2 + w_hfs^2)), over 2 pi, g = 1/16
    env = two_channel_envelope(8.0, 0.0, 0.625, W_HFS)
    g = 1 / 16
    expect = (0.625 / (8 * g**2) + 0.375 / (8 * (g**2 + W_HFS**2))) / (2 * math.pi)
    assert spectral_profile(env, 0.0) == pytest.approx(expect, rel=1e-12)
    assert spectral_profile(env, 0.0) == pytest.approx(3.184781, rel=1e-6)


def test_filter_function_points():
    f = FilterSpec(0.05)
    assert filter_response(f, 0.0) == pytest.approx(1.0)
    hw = math.pi * 0.05 / 2
    assert filter_transmission(f, hw) == pytest.approx(0.5)
    assert abs(filter_response(f, hw)) ** 2 == pytest.approx(0.5)


def test_filtered_ba_norms_match_spectral_integral():
    # frozen from an mpmath integral of |s(w)|^2 T(w) over the real line
    env = apply_filter(two_channel_envelope(8.0, 0.0, 0.625, W_HFS), FilterSpec(0.05))
    assert env.channel_norm("a") == pytest.approx(0.348039202590111145, rel=1e-10)
    assert env.channel_norm("b") == pytest.approx(0.000933400370916790372, rel=1e-10)
    assert env.norm() == pytest.approx(0.348972602961027935, rel=1e-10)


def test_filtered_amplitude_starts_at_zero():
    env = apply_filter(bare_envelope(0.3), FilterSpec(0.008))
    assert abs(env.amplitude(0.0)) < 1e-15


def test_filter_matches_convolution():
    # time domain: filter impulse response a e^{-a t} convolved with the amplitude
    tau, kappa = 8.0, 0.05
    a = math.pi * kappa / 2
    env = apply_filter(bare_envelope(tau), FilterSpec(kappa))
    for t in (0.5, 3.0, 20.0):
        conv = integrate.quad(lambda s: a * math.exp(-a * (t - s)) * math.exp(-s / (2 * tau)) / math.sqrt(tau), 0, t)[0]
        assert env.amplitude(t).real == pytest.approx(conv, rel=1e-10)


def test_degenerate_pole():
    tau = 1 / (math.pi * 0.05)
    with pytest.raises(DegeneratePole):
        apply_filter(bare_envelope(tau), FilterSpec(0.05))


def test_delay():
    env = bare_envelope(8.0)
    d = delay_envelope(env, 2.0)
    assert temporal_profile(d, 2.0) == pytest.approx(1 / 8)
    assert temporal_profile(d, 1.9) == 0.0
    assert delay_envelope(env, 0.0) is env
    for dt in (-0.8, 0.35, 0.7):
        assert delay_envelope(env, dt).norm() == pytest.approx(env.norm())


def test_purcell_and_lifetime():
    assert purcell_factor(4 * math.pi**2 / 3) == pytest.approx(1.0)
    assert cavity_enhanced_lifetime(12.0, 0.0, 0.03) == 12.0
    assert cavity_enhanced_lifetime(12.0, 500.0, 0.03) == pytest.approx(5.60783481375074243, rel=1e-12)


def test_realize_models():
    ion = TwoChannel(8.0, 0.0, 0.625, W_HFS)
    env = realize(Delayed(Filtered(ion, FilterSpec(0.05)), 0.3))
    assert env.start == 0.3 and env.labels == ("a", "b")
    assert realize(CavityEnhancedNV(12.0, 0.0, 0.03)).nominal_tau == 12.0
    assert realize(Bare(8.0)).is_bare()
    with pytest.raises(TypeError):
        realize("bare")


_taus = st.floats(min_value=0.3, max_value=40.0)
_kappas = st.floats(min_value=0.002, max_value=1.0)


@settings(max_examples=40, deadline=None)
@given(_taus, _kappas, st.floats(min_value=-2.0, max_value=2.0))
def test_filtering_only_removes_norm(tau, kappa, omega):
    env = realize(Filtered(Bare(tau, omega), FilterSpec(kappa)))
    assert 0.0 < env.norm() <= 1.0 + 1e-9


@settings(max_examples=30, deadline=None)
@given(_taus, _kappas)
def test_parseval_property(tau, kappa):
    env = apply_filter(two_channel_envelope(tau, 0.0, 0.625, W_HFS), FilterSpec(kappa))
    peaks = sorted({0.0, W_HFS})
    f = lambda w: float(spectral_profile(env, w))
    total = integrate.quad(f, -np.inf, peaks[0], epsrel=1e-10, limit=200)[0]
    total += integrate.quad(f, peaks[0], peaks[1], epsrel=1e-10, limit=200)[0]
    total += integrate.quad(f, peaks[1], np.inf, epsrel=1e-10, limit=200)[0]
    assert total == pytest.approx(env.norm(), rel=1e-4)
