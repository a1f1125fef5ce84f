import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from fluxheat.errors import CalibrationError, ExtrapolationError, ParameterError
from fluxheat.thermal import (
    CalibrationCurve,
    ep_power,
    fit_calibration,
    heater_power,
    invert_ep_power,
    read_calibration_points,
    switching_ratio,
    voltage_to_temperature,
)
from fluxheat.validation import SYNTHETIC_CURVE, synthetic_points, temperature_to_voltage

SIGMA_V2 = 11.44e-10
CAL_TEMPS = np.round(np.arange(0.080, 0.3651, 0.005), 6)


def test_ep_power_value():
    # mpmath, 30 digits
    assert ep_power(SIGMA_V2, 5, 0.1037, 0.08) == pytest.approx(9.97025709850406808e-15, rel=1e-14)


def test_ep_power_sign():
    assert ep_power(SIGMA_V2, 5, 0.08, 0.08) == 0.0
    assert ep_power(SIGMA_V2, 5, 0.07, 0.08) < 0


def test_invert_ep_power_value():
    assert invert_ep_power(SIGMA_V2, 5, 1e-14, 0.08) == pytest.approx(0.10374492581669462505, rel=1e-14)


@settings(max_examples=200)
@given(st.floats(1e-18, 1e-12), st.floats(0.03, 0.3), st.integers(3, 6))
def test_invert_ep_power_matches_root_finder(P, T0, n):
    Te = invert_ep_power(SIGMA_V2, n, P, T0)
    ref = brentq(lambda t: ep_power(SIGMA_V2, n, t, T0) - P, T0, 10.0, xtol=1e-15, rtol=1e-14)
    assert Te == pytest.approx(ref, rel=1e-10)


def test_invert_ep_power_below_floor():
    floor = SIGMA_V2 * 0.08**5
    assert invert_ep_power(SIGMA_V2, 5, -floor, 0.08) == 0.0
    with pytest.raises(ParameterError):
        invert_ep_power(SIGMA_V2, 5, -1.01 * floor, 0.08)


def test_ep_power_rejects_bad_inputs():
    with pytest.raises(ParameterError):
        ep_power(0.0, 5, 0.1, 0.08)
    with pytest.raises(ParameterError):
        ep_power(SIGMA_V2, 5, -0.1, 0.08)


def test_heater_power():
    assert heater_power(1e-9, 20e3) == pytest.approx(1e-14, rel=1e-15)
    with pytest.raises(ParameterError):
        heater_power(1e-9, 0.0)


def test_switching_ratio():
    assert switching_ratio(10.0, 0.0) == 1.0
    assert switching_ratio(10.0, 2.5) == 0.75
    with pytest.raises(ParameterError):
        switching_ratio(0.0, 1.0)


@given(st.floats(1e-18, 1e-12), st.floats(0.0, 1.0), st.floats(1e-3, 1e3))
def test_switching_ratio_scale_invariant(p_on, frac, k):
    p_off = frac * p_on
    assert switching_ratio(k * p_on, k * p_off) == pytest.approx(switching_ratio(p_on, p_off), abs=1e-12)


def test_synthetic_curve_shape():
    v = np.linspace(SYNTHETIC_CURVE.vMin, SYNTHETIC_CURVE.vMax * 0.999, 400)
    t = [SYNTHETIC_CURVE(x) for x in v]
    assert np.all(np.diff(t) < 0)
    assert temperature_to_voltage(SYNTHETIC_CURVE, 0.25) == pytest.approx(211.9e-6, rel=1e-3)


def test_noiseless_fit_recovers_coefficients():
    curve = fit_calibration(synthetic_points(CAL_TEMPS))
    np.testing.assert_allclose(curve.lowRange, SYNTHETIC_CURVE.lowRange, rtol=1e-2)
    np.testing.assert_allclose(curve.highRange[:3], SYNTHETIC_CURVE.highRange[:3], rtol=1e-2)
    assert curve.breakVoltage == pytest.approx(SYNTHETIC_CURVE.breakVoltage, rel=1e-3)
    assert curve.residualRms < 1e-5


def noisy_fit_errors(seed):
    rng = np.random.default_rng(seed)
    curve = fit_calibration(synthetic_points(CAL_TEMPS, noise=0.01, rng=rng))
    err = []
    for T in np.linspace(0.085, 0.36, 60):
        v = temperature_to_voltage(SYNTHETIC_CURVE, T)
        v = min(max(v, curve.vMin), curve.vMax)
        err.append(curve(v) - T)
    return err


def test_noisy_fit_temperature_error():
    # RMS pooled over 20 independent noise realisations
    err = np.concatenate([noisy_fit_errors(seed) for seed in range(20)])
    assert math.sqrt(np.mean(np.square(err))) < 2e-3


def test_fit_is_continuous_at_break():
    curve = fit_calibration(synthetic_points(CAL_TEMPS))
    vb = curve.breakVoltage
    assert curve(vb) == pytest.approx(curve.breakTemp, abs=1e-12)
    assert curve(vb * (1 - 1e-12)) == pytest.approx(curve.breakTemp, abs=1e-9)


def test_round_trip_210_microvolt():
    curve = fit_calibration(synthetic_points(CAL_TEMPS))
    T = curve(210e-6)
    v = brentq(lambda x: curve(x) - T, curve.vMin, curve.vMax)
    assert v == pytest.approx(210e-6, abs=1e-12)
    assert T == pytest.approx(SYNTHETIC_CURVE(210e-6), abs=2e-4)


def test_non_monotone_data_rejected():
    pts = synthetic_points(CAL_TEMPS)
    pts[10] = (pts[12][0], pts[10][1])
    with pytest.raises(CalibrationError, match="decrease"):
        fit_calibration(pts)


def test_increasing_data_rejected():
    pts = [(-v, T) for v, T in synthetic_points(CAL_TEMPS)]
    with pytest.raises(CalibrationError, match="decrease"):
        fit_calibration(pts)


def test_too_few_points_rejected():
    pts = synthetic_points([0.09, 0.1, 0.11, 0.2, 0.25, 0.3, 0.35])
    with pytest.raises(CalibrationError, match="at least 4"):
        fit_calibration(pts)


def test_bad_shape_rejected():
    with pytest.raises(CalibrationError):
        fit_calibration([1.0, 2.0, 3.0])


def test_extrapolation_refused():
    curve = fit_calibration(synthetic_points(CAL_TEMPS))
    with pytest.raises(ExtrapolationError):
        curve(curve.vMax + 1e-6)
    with pytest.raises(ExtrapolationError):
        voltage_to_temperature(curve, curve.vMin - 1e-6)


def test_json_round_trip():
    curve = fit_calibration(synthetic_points(CAL_TEMPS))
    again = CalibrationCurve.from_json(curve.to_json())
    assert again == curve


def test_read_points(tmp_path):
    f = tmp_path / "cal.txt"
    f.write_text("# V T\n2.0e-4, 0.1\n\n1.0e-4 0.2  # hot\n")
    assert read_calibration_points(f) == [(2.0e-4, 0.1), (1.0e-4, 0.2)]
    f.write_text("1 2 3\n")
    with pytest.raises(CalibrationError, match="two columns"):
        read_calibration_points(f)
    f.write_text("1 x\n")
    with pytest.raises(CalibrationError, match="not a number"):
        read_calibration_points(f)
