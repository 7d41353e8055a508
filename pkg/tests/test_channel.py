import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from loranbi.channel import (DATASHEET_SENSITIVITY_DBM, NoiseModel, Scenario, SerEstimate, build_trial_statistic,
                             build_trial_statistic_timedomain, decompose_trial, estimate_ser, find_max_inr, has_errors,
                             pole_db, rssi_threshold, sweep_ser_vs_inr, sweep_ser_vs_rssi, threshold_curve,
                             wilson_interval)
from loranbi.css import SPREADING_FACTORS, LoRaConfig, dechirp_dft, demodulate
from loranbi.errors import DomainError, ThresholdSearchError
from loranbi.waveforms import InterferenceKind, RngStream, gen_awgn


def test_noise_floor(noise):
    assert noise.noise_floor_dbm == pytest.approx(-117., abs=0.5)
    assert noise.noise_power_mw == pytest.approx(10**(noise.noise_floor_dbm / 10))


def test_scenario_powers(sf7, noise):
    s = Scenario(sf7, snr_db=-6., inr_db=3., interferer='gmsk', noise=noise)
    assert s.signal_power_mw == pytest.approx(noise.noise_power_mw * 10**-0.6)
    assert s.interference_power_mw == pytest.approx(noise.noise_power_mw * 10**0.3)
    assert s.rssi_dbm == pytest.approx(noise.noise_floor_dbm - 6)
    assert s.interferer is InterferenceKind.GMSK


def test_scenario_validation(sf7):
    with pytest.raises(DomainError):
        Scenario(sf7, snr_db=0., inr_db=3.)
    with pytest.raises(DomainError):
        Scenario(sf7, snr_db=0., trials=0)
    with pytest.raises(DomainError):
        Scenario(sf7, snr_db=0., noise=NoiseModel(bandwidth_hz=250e3))


def test_wilson_interval():
    low, high = wilson_interval(0, 10000)
    assert low == 0
    assert high == pytest.approx(1.96**2 / (10000 + 1.96**2), rel=1e-2)
    est = SerEstimate(errors=30, trials=1000)
    assert est.ser == 0.03
    assert est.wilson_ci95[0] < 0.03 < est.wilson_ci95[1]


def test_noiseless_statistic_has_one_bin(sf7):
    s = Scenario(sf7, snr_db=0., noise_enabled=False)
    bins = build_trial_statistic(s, 17, RngStream(0)).bins
    assert np.count_nonzero(bins) == 1
    assert bins[17] == pytest.approx(np.sqrt(s.signal_power_mw) * sf7.n)


def test_trial_determinism(sf7):
    s = Scenario(sf7, snr_db=-5., inr_db=5., interferer='bpsk')
    a = build_trial_statistic(s, 3, RngStream(1, 42)).bins
    b = build_trial_statistic(s, 3, RngStream(1, 42)).bins
    assert_array_equal(a, b)


def test_decomposition_adds_up(sf7):
    s = Scenario(sf7, snr_db=-5., inr_db=5., interferer='gmsk')
    parts = decompose_trial(s, 9, RngStream(2))
    assert_allclose(parts['total'], parts['signal'] + parts['noise'] + parts['interference'])
    assert np.count_nonzero(parts['signal']) == 1


@pytest.mark.parametrize('p', [0, 64, 127])
def test_timedomain_noiseless(sf7, p):
    s = Scenario(sf7, snr_db=3., noise_enabled=False)
    stat = build_trial_statistic_timedomain(s, p, RngStream(3))
    assert demodulate(stat) == p
    assert abs(stat.bins[p]) == pytest.approx(np.sqrt(s.signal_power_mw) * sf7.n, rel=1e-6)


def test_noise_bin_variance(sf7, noise):
    trials = 10**4
    p_n = noise.noise_power_mw
    gen = RngStream(4).generator()
    bins = np.stack([dechirp_dft(sf7, gen_awgn(sf7.n, p_n, gen, sf7.bandwidth_hz)).bins for _ in range(trials)])
    expected = sf7.n * p_n / 2
    for part in (bins.real, bins.imag):
        assert part.var() == pytest.approx(expected, rel=0.05)
        assert np.all(np.abs(part.var(axis=0) / expected - 1) < 0.1)


def test_high_snr_no_errors(sf7):
    assert estimate_ser(Scenario(sf7, snr_db=30., trials=1000)).errors == 0


def test_below_threshold_has_errors(sf7, noise):
    s = Scenario(sf7, snr_db=-126. - noise.noise_floor_dbm, trials=2000)
    assert estimate_ser(s).errors > 0


def _agreement_scenarios(cfg, noise, trials):
    """Two noise-only scenarios near R_T and three interferer scenarios near their INR thresholds."""
    snr_rt = DATASHEET_SENSITIVITY_DBM[cfg.sf] - noise.noise_floor_dbm
    inr = 12. + 3.4 * (cfg.sf - 7)
    return [Scenario(cfg, snr_db=snr_rt - 2., trials=trials),
            Scenario(cfg, snr_db=snr_rt - 1., trials=trials),
            Scenario(cfg, snr_db=0., inr_db=inr, interferer='bpsk', trials=trials),
            Scenario(cfg, snr_db=0., inr_db=inr, interferer='gmsk', trials=trials),
            Scenario(cfg, snr_db=0., inr_db=inr - 3., interferer='awgn', trials=trials)]


@pytest.mark.parametrize('sf', [7] + [pytest.param(sf, marks=pytest.mark.slow) for sf in SPREADING_FACTORS[1:]])
def test_hybrid_and_timedomain_agree(noise, sf):
    for s in _agreement_scenarios(LoRaConfig(sf), noise, trials=2000):
        hybrid = estimate_ser(s)
        direct = estimate_ser(s, builder=build_trial_statistic_timedomain)
        (h_low, h_high), (d_low, d_high) = hybrid.wilson_ci95, direct.wilson_ci95
        assert h_low <= d_high and d_low <= h_high, (s.snr_db, s.interferer)


def test_workers_do_not_change_results(sf7):
    s = Scenario(sf7, snr_db=0., inr_db=10., interferer='gmsk', trials=300)
    assert estimate_ser(s, workers=1) == estimate_ser(s, workers=4)


@pytest.mark.parametrize('inr', [-30., 12.])
def test_has_errors_matches_estimate(sf7, inr):
    s = Scenario(sf7, snr_db=0., inr_db=inr, interferer='bpsk', trials=300)
    assert has_errors(s, workers=2) == (estimate_ser(s).errors > 0)


def test_rssi_threshold():
    grid = np.arange(-130., -124.)
    assert rssi_threshold(grid, [50, 20, 3, 0, 1, 0]) == (-125., 'found')
    assert rssi_threshold(grid, [0, 0, 0, 0, 0, 0]) == (-130., 'grid-limited')
    rt, status = rssi_threshold(grid, [5, 0, 0, 0, 0, 2])
    assert np.isnan(rt) and status == 'not-found'


def test_pole(noise):
    assert pole_db(-123., noise) == pytest.approx(-123. - noise.noise_floor_dbm - 1)


def test_single_point_sweep_is_grid_limited(sf7, noise):
    ds = sweep_ser_vs_rssi(sf7, noise, [-100.], trials=200)
    assert int(ds['errors'][0]) == 0
    assert ds.attrs['rssi_threshold_dbm'] == -100.
    assert ds.attrs['threshold_status'] == 'grid-limited'


def test_negligible_interference(sf7, noise):
    ds = sweep_ser_vs_inr(sf7, noise, 10., 'bpsk', [-20.], trials=500)
    assert int(ds['errors'][0]) == 0


@pytest.mark.parametrize('kind', list(InterferenceKind))
def test_overwhelming_interference(sf7, noise, kind):
    ds = sweep_ser_vs_inr(sf7, noise, 0., kind, [40.], trials=500)
    assert float(ds['ser'][0]) > 0.5


def test_search_start_must_have_errors(sf7, noise):
    with pytest.raises(ThresholdSearchError) as info:
        find_max_inr(sf7, noise, 10., 'gmsk', start_inr_db=-30., trials=200)
    assert info.value.snr_db == 10.


def test_threshold_curve_grows_with_snr(sf7, noise):
    curve = threshold_curve(sf7, noise, 'gmsk', [10., 20.], pole=-7., workers=1, trials=100, step_db=2.)
    assert list(curve['snr_db'].values) == [10., 20.]
    assert curve.attrs['kind'] == 'gmsk' and curve.attrs['pole_db'] == -7.
    assert curve.values[1] > curve.values[0]


@pytest.mark.slow
def test_sf7_sensitivity(sf7, noise):
    at_threshold = Scenario(sf7, snr_db=-123. - noise.noise_floor_dbm)
    assert estimate_ser(at_threshold).errors == 0


@pytest.mark.slow
def test_sf12_sensitivity(sf12, noise):
    at_threshold = Scenario(sf12, snr_db=-137. - noise.noise_floor_dbm)
    assert estimate_ser(at_threshold).errors == 0


# Zero-error RSSI thresholds of 10^4-trial noise-only sweeps
EXPECTED_RSSI_THRESHOLD_DBM = {7: -123., 8: -126., 9: -129., 10: -132., 11: -134., 12: -137.}


@pytest.mark.slow
@pytest.mark.parametrize('sf', SPREADING_FACTORS)
def test_rssi_threshold_per_spreading_factor(noise, sf):
    expected = EXPECTED_RSSI_THRESHOLD_DBM[sf]
    ds = sweep_ser_vs_rssi(LoRaConfig(sf), noise, np.arange(expected - 6., expected + 4.))
    assert ds.attrs['threshold_status'] == 'found'
    assert abs(ds.attrs['rssi_threshold_dbm'] - expected) <= 1.


def _separated_points(cfg, noise, snrs, inr_offsets):
    """(SNR, INR) points where AWGN > BPSK > GMSK holds with disjoint 95% intervals."""
    points = []
    for snr in snrs:
        inrs = snr + np.asarray(inr_offsets, dtype=float)
        ds = {kind: sweep_ser_vs_inr(cfg, noise, snr, kind, inrs) for kind in InterferenceKind}
        awgn, bpsk, gmsk = (ds[k] for k in (InterferenceKind.AWGN_CONTROL, InterferenceKind.BPSK,
                                            InterferenceKind.GMSK))
        separated = (awgn.ci_low > bpsk.ci_high) & (bpsk.ci_low > gmsk.ci_high)
        points += [(snr, float(inr)) for inr in inrs[separated.values]]
    return points


@pytest.mark.slow
def test_interferer_ordering_sf7(sf7, noise):
    assert len(_separated_points(sf7, noise, [0.], np.arange(9., 15.))) >= 3


@pytest.mark.slow
def test_interferer_ordering_sf12(sf12, noise):
    assert len(_separated_points(sf12, noise, [-4., 0., 4.], np.arange(27., 32.))) >= 3


@pytest.mark.slow
def test_gmsk_tolerance_at_zero_snr(sf7, noise):
    gmsk = find_max_inr(sf7, noise, 0., 'gmsk', workers=4)
    awgn = find_max_inr(sf7, noise, 0., 'awgn', workers=4)
    assert 8.5 <= gmsk <= 11.5
    assert gmsk > awgn
