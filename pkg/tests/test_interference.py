import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from photon_sim.core import DegenerateIntensities, NonPositiveLifetime, ProbabilityRange
from photon_sim.interference import (
    EtaMode,
    PhotonPair,
    detection_efficiency,
    fidelity,
    i_max,
    i_max_closed,
    i_min,
    i_min_closed,
    interfere,
    jdp_interfering_closed,
    jdp_noninterfering_closed,
    jdp_numeric,
    mutual_coherence,
    visibility,
    windowed_intensities,
)
from photon_sim.sources import FilterSpec, apply_filter, bare_envelope, delay_envelope


def bare_pair(t1, t2, dw=0.0, dt=0.0):
    return PhotonPair(delay_envelope(bare_envelope(t1), dt), bare_envelope(t2), dw)


# values below come from mpmath quadrature of the field-amplitude integrals


def test_jdp_closed_oracles():
    assert jdp_noninterfering_closed(8, 4, 4.0) == pytest.approx(0.0406004208701698227, rel=1e-13)
    assert jdp_interfering_closed(8, 4, 0.0, 4.0) == pytest.approx(0.000618270737542631894, rel=1e-12)
    assert jdp_interfering_closed(8, 4, 0.3, -2.5) == pytest.approx(0.00731497227441285256, rel=1e-12)


def test_identical_photons_never_coincide_at_zero_delay():
    assert jdp_interfering_closed(8, 8, 0.0, 0.0) == pytest.approx(0.0, abs=1e-17)


def test_windowed_closed_oracles():
    assert i_max_closed(8, 4, 45) == pytest.approx(0.958761367024456128, rel=1e-13)
    assert i_max_closed(8, 8, 45) == pytest.approx(0.939945332104692057, rel=1e-13)
    assert i_max_closed(8, 8, 45) == pytest.approx(-math.expm1(-45 / 16), rel=1e-14)
    assert i_max_closed(8, 4, 30) == pytest.approx(0.889924106818044655, rel=1e-13)
    assert i_min_closed(8, 4, 0.2, 30) == pytest.approx(0.222822015952175578, rel=1e-12)


def test_infinite_window_limits():
    assert i_max_closed(8, 4, math.inf) == pytest.approx(1.0)
    # 1/2 - 2 t1 t2/(t1 + t2)^2 = 1/2 - 64/144
    assert i_min_closed(8, 4, 0.0, math.inf) == pytest.approx(0.0555555555555556, rel=1e-12)


def test_fidelity_oracles():
    res = interfere(bare_pair(8, 4, 0.2), 30)
    assert res.fidelity == pytest.approx(0.609537510259015940, rel=1e-12)
    res = interfere(bare_pair(8, 16), 1e6)
    assert res.visibility == pytest.approx(17 / 19, rel=1e-12)
    assert res.fidelity == pytest.approx(1 / (2 - (17 / 19) ** 2), rel=1e-12)
    assert interfere(bare_pair(8, 8), 24).fidelity == 1.0


def test_eta_oracles():
    p = bare_pair(8, 8)
    assert detection_efficiency(p, 24, EtaMode.CLOSED_FORM) == pytest.approx(0.902904615440938472, rel=1e-13)
    assert detection_efficiency(p, 45, "profile") == pytest.approx(0.992799881025622607, rel=1e-13)


def test_numeric_routes_agree_with_closed_forms():
    p = bare_pair(8, 4, 0.3)
    td = np.linspace(-20, 20, 9)
    np.testing.assert_allclose(jdp_numeric(p, td, False), jdp_noninterfering_closed(8, 4, td), rtol=1e-12)
    np.testing.assert_allclose(jdp_numeric(p, td, True), jdp_interfering_closed(8, 4, 0.3, td), rtol=1e-10, atol=1e-16)
    q = jdp_numeric(p, 1.7, True, method="quadrature")
    assert q == pytest.approx(float(jdp_interfering_closed(8, 4, 0.3, 1.7)), rel=1e-9)
    for method in ("expsum", "quadrature"):
        hi, lo = windowed_intensities(p, 30.0, method)
        assert hi == pytest.approx(i_max_closed(8, 4, 30), rel=1e-9)
        assert lo == pytest.approx(i_min_closed(8, 4, 0.3, 30), rel=1e-9)
    with pytest.raises(ValueError):
        jdp_numeric(p, 0.0, True, method="simpson")


def test_quadrature_route_on_filtered_two_channel(ba):
    pair = ba.with_params(delta_omega=0.004, dt=0.3).pair()
    for td in (-6.0, 0.0, 0.3, 5.0):
        for inter in (False, True):
            a = jdp_numeric(pair, td, inter)
            b = jdp_numeric(pair, td, inter, method="quadrature")
            assert a == pytest.approx(b, rel=1e-7, abs=1e-14)


def test_ba_center_point(ba):
    res = interfere(ba.pair(), 45)
    assert res.fidelity > 0.99
    assert res.fidelity == pytest.approx(1.0, abs=1e-12)
    from scipy import integrate
    from photon_sim.sources import temporal_profile

    inside = integrate.quad(lambda t: temporal_profile(ba.pair().env1, t), 0, 45, epsrel=1e-12)[0]
    assert res.eta_profile == pytest.approx(inside**2, rel=1e-10)
    assert res.eta_profile < ba.pair().env1.norm() ** 2


def test_mutual_coherence():
    p = bare_pair(8, 8, 0.1)
    t = 3.0
    expect = math.exp(-t / 8) / 8 * np.exp(-0.1j * t)
    assert mutual_coherence(p, t) == pytest.approx(expect)


def test_visibility_and_fidelity_errors():
    with pytest.raises(DegenerateIntensities):
        visibility(0.0, 0.0)
    with pytest.raises(ProbabilityRange):
        fidelity(1.5)
    assert fidelity(0.0) == 0.5 and fidelity(1.0) == 1.0


def test_closed_efficiency_needs_lifetimes():
    env = bare_envelope(8.0)
    from dataclasses import replace

    with pytest.raises(NonPositiveLifetime):
        detection_efficiency(PhotonPair(replace(env, nominal_tau=None), env), 10, "closed")


def test_delayed_bare_pair_uses_general_path():
    res = interfere(bare_pair(8, 8, dt=1.0), 45)
    assert res.fidelity < 1.0
    assert i_max(bare_pair(8, 8, dt=1.0), 45) == pytest.approx(res.i_max)
    assert i_min(bare_pair(8, 8, dt=1.0), 45) == pytest.approx(res.i_min)


taus = st.floats(min_value=0.3, max_value=40.0)
dws = st.floats(min_value=-5.0, max_value=5.0)
wins = st.floats(min_value=1.0, max_value=200.0)
dts = st.floats(min_value=-3.0, max_value=3.0)


@settings(max_examples=60, deadline=None)
@given(taus, taus, dws, wins, dts)
def test_physicality(t1, t2, dw, w, dt):
    p = bare_pair(t1, t2, dw, dt)
    td = np.linspace(-w, w, 11)
    non = jdp_numeric(p, td, False)
    assert np.all(jdp_numeric(p, td, True) >= -1e-12 * non.max())
    res = interfere(p, w)
    assert res.i_min <= res.i_max
    assert 0.5 <= res.fidelity <= 1.0


@settings(max_examples=40, deadline=None)
@given(taus, taus, dws, wins, st.floats(min_value=0.002, max_value=0.5))
def test_swap_and_mirror(t1, t2, dw, w, kappa):
    env1 = apply_filter(bare_envelope(t1), FilterSpec(kappa)) if kappa < 0.25 else bare_envelope(t1)
    p = PhotonPair(env1, bare_envelope(t2), dw)
    a, b = interfere(p, w), interfere(p.swapped(), w)
    c = interfere(PhotonPair(env1, bare_envelope(t2), -dw), w)
    for other in (b, c):
        assert other.fidelity == pytest.approx(a.fidelity, abs=1e-9)
        assert other.i_min == pytest.approx(a.i_min, abs=1e-9)
        assert other.i_max == pytest.approx(a.i_max, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(taus, taus)
def test_window_tradeoff(t1, t2):
    p = bare_pair(t1, t2)
    m = (t1 + t2) / 2
    assert interfere(p, 2 * m).fidelity >= interfere(p, 8 * m).fidelity - 1e-12
    assert detection_efficiency(p, 2 * m, "closed") <= detection_efficiency(p, 8 * m, "closed")
