import numpy as np
import pytest

from fluxheat.dynamics import evaluate_point
from fluxheat.errors import ConvergenceError, ParameterError
from fluxheat.output import sweep_csv
from fluxheat.sweep import (
    FIXED,
    SELF_CONSISTENT,
    SweepConfig,
    SweepRecord,
    SweepResult,
    find_peaks,
    run_sweep,
    solve_self_consistent_T2,
    switching_curve,
)
from fluxheat.thermal import ep_power

INNER_ROOT = 0.464174241344142  # f_q = f_r, brentq on the dispersion


@pytest.fixture(scope="module")
def default_sweep():
    from fluxheat.params import DEFAULT_DEVICE
    return run_sweep(DEFAULT_DEVICE, SweepConfig())


def synthetic_result(x, y):
    recs = tuple(SweepRecord(float(a), 0.0, (1, 0, 0, 0), float(b), 0.08) for a, b in zip(x, y))
    return SweepResult(SweepConfig(fluxStart=float(x[0]), fluxStop=float(x[-1]), points=len(x)), recs)


def test_config_validation():
    with pytest.raises(ParameterError):
        SweepConfig(fluxStart=0.7, fluxStop=0.3)
    with pytest.raises(ParameterError):
        SweepConfig(points=1)
    with pytest.raises(ParameterError):
        SweepConfig(mode="other")
    with pytest.raises(ParameterError):
        SweepConfig(T1=0.0)
    with pytest.raises(ParameterError):
        SweepConfig(damping=0.0)


def test_zero_width_sweep(params):
    res = run_sweep(params, SweepConfig(fluxStart=0.5, fluxStop=0.5))
    assert len(res.records) == 1
    assert res.records[0].power == evaluate_point(params, 0.5, 0.3, 0.08).power
    assert res.peaks.peaks == ()


def test_grid_and_records(default_sweep):
    assert len(default_sweep.records) == 2001
    assert default_sweep.flux[0] == 0.3 and default_sweep.flux[-1] == 0.7
    assert np.all(default_sweep.T2 == 0.08)


def test_mirror_symmetry(default_sweep):
    p = default_sweep.power
    np.testing.assert_allclose(p, p[::-1], rtol=1e-9, atol=1e-9 * p.max())


def test_default_peak_structure(default_sweep):
    peaks = default_sweep.peaks
    assert peaks.central is not None
    assert peaks.central.fluxFrac == pytest.approx(0.5, abs=1e-12)
    inner = sorted(p.fluxFrac for p in peaks.of_kind("inner"))
    assert len(inner) == 2
    assert inner[0] == pytest.approx(1 - inner[1], abs=1e-9)
    assert all(0.4 < f < 0.6 for f in inner)
    assert abs(inner[0] - INNER_ROOT) < 1e-3
    assert len(peaks.of_kind("outer")) >= 2
    assert peaks.central.height > max(p.height for p in peaks.of_kind("inner"))


def test_refinement_converges(params):
    coarse = run_sweep(params, SweepConfig(fluxStart=0.44, fluxStop=0.56, points=301))
    fine = run_sweep(params, SweepConfig(fluxStart=0.44, fluxStop=0.56, points=1201))
    a = min(p.fluxFrac for p in coarse.peaks.of_kind("inner"))
    b = min(p.fluxFrac for p in fine.peaks.of_kind("inner"))
    assert abs(a - b) < 0.1 * (0.12 / 300)


def test_parallel_matches_serial(params):
    cfg = SweepConfig(points=101)
    serial = run_sweep(params, cfg)
    parallel = run_sweep(params, cfg, workers=2)
    assert sweep_csv(serial) == sweep_csv(parallel)


def test_equilibrium_is_flat(params):
    res = run_sweep(params, SweepConfig(T1=0.08, points=201))
    assert np.abs(res.power).max() < 1e-12 * 4.58e-15
    assert res.peaks.peaks == ()


def test_background_offset(params):
    base = run_sweep(params, SweepConfig(points=21))
    shifted = run_sweep(params, SweepConfig(points=21, backgroundPower=1e-15))
    np.testing.assert_allclose(shifted.power - base.power, 1e-15, rtol=1e-9)


def test_self_consistent_balance(params):
    cfg = SweepConfig(mode=SELF_CONSISTENT, points=41)
    res = run_sweep(params, cfg)
    for rec in res.records:
        assert abs(ep_power(params.sigmaV2, params.nExp, rec.T2, cfg.T0) - rec.power) < 1e-20
    assert np.all(res.T2 > cfg.T0)
    mid = res.records[20]
    assert mid.fluxFrac == pytest.approx(0.5, abs=1e-15) and mid.T2 == res.T2.max()


def test_self_consistent_exhausts_iterations(params):
    cfg = SweepConfig(mode=SELF_CONSISTENT, maxIter=2)
    with pytest.raises(ConvergenceError) as info:
        solve_self_consistent_T2(params, 0.5, cfg)
    assert info.value.residual != 0


def test_gaussian_peak():
    x = np.linspace(0.3, 0.7, 401)
    res = synthetic_result(x, 1e-14 * np.exp(-((x - 0.5) / 0.01) ** 2))
    peaks = find_peaks(res)
    assert len(peaks.peaks) == 1
    assert peaks.central.fluxFrac == pytest.approx(0.5, abs=1e-9)
    off = synthetic_result(x, 1e-14 * np.exp(-((x - 0.50037) / 0.01) ** 2))
    assert find_peaks(off).central.fluxFrac == pytest.approx(0.50037, abs=2e-5)


def test_noise_floor():
    x = np.linspace(0.3, 0.7, 101)
    y = 1e-30 * np.sin(40 * x)
    assert find_peaks(synthetic_result(x, y)).peaks == ()


def test_monotone_curve_has_no_peaks():
    x = np.linspace(0.3, 0.7, 101)
    assert find_peaks(synthetic_result(x, x**2)).peaks == ()


def test_small_bumps_are_filtered():
    x = np.linspace(0.3, 0.7, 401)
    y = 1e-14 * (np.exp(-((x - 0.5) / 0.01) ** 2) + 0.01 * np.exp(-((x - 0.4) / 0.005) ** 2))
    assert len(find_peaks(synthetic_result(x, y)).peaks) == 1
    assert len(find_peaks(synthetic_result(x, y), prominence=0.001).peaks) == 2


def test_switching_curve(params):
    out = switching_curve(params, [0.1, 0.2, 0.3], 0.08)
    assert [t for t, _ in out] == [0.1, 0.2, 0.3]
    for _, r in out:
        assert 0.99 < r <= 1.0
    single = switching_curve(params, [0.3], 0.08)
    assert single == [out[-1]]
    with pytest.raises(ParameterError):
        switching_curve(params, [], 0.08)


def test_switching_background_lowers_ratio(params):
    (_, plain), = switching_curve(params, [0.3], 0.08)
    (_, bg), = switching_curve(params, [0.3], 0.08, backgroundPower=1e-15)
    assert bg < plain
