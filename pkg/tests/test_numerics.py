import math

import numpy as np
import pytest
from scipy import integrate

from photon_sim.core import DivergentIntegral, GridTooCoarse, to_angular
from photon_sim.numerics import (
    ExpSum,
    QuadratureSettings,
    adaptive_integrate,
    correlation,
    fft_filter_oracle,
    integrate_expsum_product,
    windowed_correlation,
)
from photon_sim.sources import ExpTerm, FilterSpec, apply_filter, bare_envelope, two_channel_envelope


def test_expsum_product_hand_antiderivative():
    a = [ExpTerm(1 / math.sqrt(8), 1 / 16)]
    b = [ExpTerm(1 / math.sqrt(4), 1 / 8)]
    # 16 / (3 sqrt 32)
    assert integrate_expsum_product(a, b, 0.0).real == pytest.approx(0.942809041582063, rel=1e-13)


def test_expsum_finite_interval():
    h = ExpSum([1.0], [0.5], start=1.0)
    assert h.integrate(0.0, 3.0).real == pytest.approx(2 * (1 - math.exp(-1.0)), rel=1e-14)
    assert h.integrate(5.0, 4.0) == 0


def test_divergent():
    with pytest.raises(DivergentIntegral):
        ExpSum([1.0], [-0.1]).integrate(0.0)


def test_correlation_against_quad():
    f = ExpSum([1.0, -0.4 + 0.2j], [0.3, 1.1 + 0.5j], start=0.2)
    g = ExpSum([0.7j], [0.2 - 0.3j], start=-0.5)
    for td in (-3.0, -0.7, 0.0, 0.4, 2.5):
        lo = max(0.2, -0.5 - td)
        re = integrate.quad(lambda t: complex(f(t) * g(t + td)).real, lo, 300, limit=400)[0]
        im = integrate.quad(lambda t: complex(f(t) * g(t + td)).imag, lo, 300, limit=400)[0]
        assert complex(correlation(f, g, td)) == pytest.approx(complex(re, im), rel=1e-8, abs=1e-12)


def test_windowed_correlation_against_quad():
    f = ExpSum([1.0, -0.4], [0.3, 1.1], start=0.3)
    g = ExpSum([0.7], [0.2], start=-0.5)
    for lo, hi in ((-5.0, 5.0), (-1.0, 0.2), (1.0, math.inf)):
        ref = integrate.quad(lambda x: correlation(f, g, x).real, lo, hi, points=None if math.isinf(hi) else [-0.8], limit=200)[0]
        assert windowed_correlation(f, g, lo, hi).real == pytest.approx(ref, rel=1e-8)


def test_adaptive_unit_interval():
    r = adaptive_integrate(lambda t: 1.0, 0.0, 1.0)
    assert r.value == pytest.approx(1.0, abs=1e-12) and r.converged


def test_adaptive_tail_cutoff():
    r = adaptive_integrate(lambda t: math.exp(-t / 8) / 8, 0.0, math.inf, decay_time=8.0)
    assert r.value == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(ValueError):
        adaptive_integrate(lambda t: 1.0, 0.0, math.inf)


def test_adaptive_breakpoints_on_kink():
    f = lambda t: math.exp(-abs(t - 0.3))
    r = adaptive_integrate(f, -5, 5, QuadratureSettings(rel_tol=1e-12, abs_tol=1e-14), breakpoints=[0.3])
    assert r.value == pytest.approx(2 - math.exp(-5.3) - math.exp(-4.7), rel=1e-12)


def test_settings_validation():
    with pytest.raises(ValueError):
        QuadratureSettings(rel_tol=0)
    with pytest.raises(ValueError):
        QuadratureSettings(max_depth=3)


def test_fft_oracle_bare_filter():
    env, filt = bare_envelope(8.0), FilterSpec(0.05)
    t, out = fft_filter_oracle(env, filt, 400.0, 2**20)
    exact = apply_filter(env, filt).amplitude(t)
    sel = (t > 0.1) & (t < 80)
    assert np.max(np.abs(out["a"][sel] - exact[sel])) / np.abs(exact).max() < 1e-5


def test_fft_oracle_norm():
    env = two_channel_envelope(8.0, 0.0, 0.625, to_angular(-0.335))
    filt = FilterSpec(0.05)
    t, out = fft_filter_oracle(env, filt, 400.0, 2**20)
    dt = t[1] - t[0]
    norm = sum(np.sum(np.abs(v) ** 2) * dt for v in out.values())
    assert norm == pytest.approx(apply_filter(env, filt).norm(), rel=1e-5)


def test_fft_oracle_grid_checks():
    with pytest.raises(GridTooCoarse):
        fft_filter_oracle(bare_envelope(8.0), FilterSpec(0.05), 50.0, 2**16)
    with pytest.raises(GridTooCoarse):
        fft_filter_oracle(bare_envelope(0.05), FilterSpec(0.05), 400.0, 2**14)
    with pytest.raises(ValueError):
        fft_filter_oracle(bare_envelope(8.0), FilterSpec(0.05), 400.0, 3000)
