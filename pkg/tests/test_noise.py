import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fluxheat.constants import hbar, kB
from fluxheat.errors import ParameterError
from fluxheat.noise import (
    InductiveFilter,
    NoiseChannel,
    ResonatorFilter,
    bare_current_noise,
    flux_noise,
    resonator_transmission,
)

W7 = 2 * math.pi * 7e9


def channels(T=0.3):
    return [
        NoiseChannel(T, 6.0, ResonatorFilter(7e9, 50.0), 0.8e-9),
        NoiseChannel(T, 6.0, InductiveFilter(0.8e-9), 0.8e-9),
    ]


def test_classical_limit():
    assert bare_current_noise(6.0, 0.3, 0.0) == 2 * kB * 0.3 / 6.0
    assert bare_current_noise(6.0, 0.3, 1e-3) == pytest.approx(2 * kB * 0.3 / 6.0, rel=1e-9)


def test_current_noise_detailed_balance():
    ratio = bare_current_noise(6.0, 0.3, W7) / bare_current_noise(6.0, 0.3, -W7)
    assert ratio == pytest.approx(math.exp(hbar * W7 / (kB * 0.3)), rel=1e-12)


def test_current_noise_value():
    # mpmath, 40 digits
    assert bare_current_noise(6.0, 0.3, W7) == pytest.approx(2.2950407143043863347e-24, rel=1e-12)


def test_zero_temperature_absorption_vanishes():
    assert bare_current_noise(6.0, 1e-6, -W7) == 0.0
    assert bare_current_noise(6.0, 1e-6, W7) == pytest.approx(2 * hbar * W7 / 6.0)


def test_invalid_inputs():
    with pytest.raises(ParameterError):
        bare_current_noise(0.0, 0.3, W7)
    with pytest.raises(ParameterError):
        bare_current_noise(6.0, 0.0, W7)
    with pytest.raises(ParameterError):
        NoiseChannel(-1.0, 6.0, ResonatorFilter(7e9, 50.0), 1e-9)
    with pytest.raises(ParameterError):
        NoiseChannel(0.1, 6.0, ResonatorFilter(0.0, 50.0), 1e-9)


@pytest.mark.parametrize("n", [1, 2, 3, 0])
def test_transmission_passbands(n):
    assert resonator_transmission(n * 7e9, 7e9, 6.0, 50.0) == pytest.approx(1.0, abs=1e-12)


def test_transmission_half_band():
    assert resonator_transmission(3.5e9, 7e9, 6.0, 50.0) == pytest.approx(0.0144, rel=1e-12)


@given(st.floats(-50e9, 50e9), st.floats(0, 7e9))
def test_transmission_periodic_symmetric_bounded(f, d):
    t = resonator_transmission(f, 7e9, 6.0, 50.0)
    assert resonator_transmission(f + 7e9, 7e9, 6.0, 50.0) == pytest.approx(t, rel=1e-9, abs=1e-12)
    assert resonator_transmission(7e9 + d, 7e9, 6.0, 50.0) == pytest.approx(
        resonator_transmission(7e9 - d, 7e9, 6.0, 50.0), rel=1e-9)
    assert 0.0144 * (1 - 1e-12) <= t <= 1.0 + 1e-12


def test_inductive_limit():
    ch = channels()[1]
    assert flux_noise(ch, 0.0) == pytest.approx(2 * (0.8e-9) ** 2 * kB * 0.3 / 6.0, rel=1e-15)


def test_resonator_transparent_at_passband():
    ch = channels()[0]
    assert flux_noise(ch, W7) == pytest.approx((0.8e-9) ** 2 * bare_current_noise(6.0, 0.3, W7), rel=1e-12)


def test_inductive_high_frequency_slope():
    ch = channels()[1]
    for w in (1e12, 3e12, 1e13):
        d = 1e-4
        slope = (math.log(flux_noise(ch, w * (1 + d))) - math.log(flux_noise(ch, w * (1 - d)))) / (
            math.log1p(d) - math.log1p(-d))
        assert slope == pytest.approx(-1.0, abs=1e-2)


@pytest.mark.parametrize("T", [0.05, 0.3, 1.0])
def test_flux_noise_detailed_balance(T):
    for ch in channels(T):
        for w in 2 * math.pi * np.geomspace(1e6, 50e9, 60):
            ratio = flux_noise(ch, w) / flux_noise(ch, -w)
            assert ratio == pytest.approx(math.exp(hbar * w / (kB * T)), rel=1e-10)


def test_flux_noise_continuous_at_zero():
    for ch in channels():
        s0 = flux_noise(ch, 0.0)
        for w in (2 * math.pi * 1e3, -2 * math.pi * 1e3):
            assert flux_noise(ch, w) == pytest.approx(s0, rel=1e-6)


@given(st.floats(-1e12, 1e12), st.floats(1e-3, 5.0))
def test_spectra_non_negative(w, T):
    for ch in channels(T):
        assert flux_noise(ch, w) >= 0
