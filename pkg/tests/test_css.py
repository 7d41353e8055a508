import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from loranbi.css import (ComplexBaseband, DecisionStatistic, LoRaConfig, SPREADING_FACTORS, dechirp_dft,
                         dechirp_dft_batch, demodulate, demodulate_batch, direct_dft, make_symbol, make_upchirp)
from loranbi.errors import ContractError, DomainError


@pytest.mark.parametrize('sf', SPREADING_FACTORS)
def test_config_symbol_length(sf):
    cfg = LoRaConfig(sf)
    assert cfg.n == 2**sf
    assert cfg.symbol_duration_s * cfg.bandwidth_hz == cfg.n


@pytest.mark.parametrize('sf', [6, 13, 7.5, True])
def test_config_rejects_spreading_factor(sf):
    with pytest.raises(DomainError):
        LoRaConfig(sf)


def test_baseband_validation():
    with pytest.raises(DomainError):
        ComplexBaseband([], 125e3)
    with pytest.raises(DomainError):
        ComplexBaseband([1, np.nan], 125e3)
    w = ComplexBaseband([1, 2], 125e3)
    assert not w.samples.flags.writeable
    assert w.samples.dtype == np.complex128


def test_upchirp_samples(sf7):
    s0 = make_upchirp(sf7).samples
    assert len(s0) == 128
    assert s0[0] == 1 + 0j
    assert_allclose(s0[64], 1 + 0j, atol=1e-12)
    assert np.all(np.abs(np.abs(s0) - 1) < 1e-12)


def test_symbol_zero_is_upchirp(sf7):
    assert_array_equal(make_symbol(sf7, 0).samples, make_upchirp(sf7).samples)


@pytest.mark.parametrize('p', [-1, 128, 3.5])
def test_symbol_index_out_of_range(sf7, p):
    with pytest.raises(DomainError):
        make_symbol(sf7, p)


def test_clean_upchirp_bins(sf7):
    bins = np.abs(dechirp_dft(sf7, make_upchirp(sf7)).bins)
    assert_allclose(bins[0], 128, rtol=1e-12)
    assert np.all(bins[1:] < 1e-6)


def test_zero_input_gives_zero_bins(sf7):
    stat = dechirp_dft(sf7, ComplexBaseband(np.zeros(128), sf7.bandwidth_hz))
    assert np.all(stat.bins == 0)


def test_contract_violations(sf7):
    with pytest.raises(ContractError):
        dechirp_dft(sf7, ComplexBaseband(np.ones(64), sf7.bandwidth_hz))
    with pytest.raises(ContractError):
        dechirp_dft(sf7, ComplexBaseband(np.ones(128), 250e3))
    with pytest.raises(ContractError):
        DecisionStatistic(np.ones(64)).check(sf7)


@pytest.mark.parametrize('sf, p', [(7, 5), (7, 37), (7, 100), (12, 4095)])
def test_symbol_round_trip(sf, p):
    cfg = LoRaConfig(sf)
    stat = dechirp_dft(cfg, make_symbol(cfg, p, amplitude=0.3))
    assert demodulate(stat) == p
    assert_allclose(stat.bins[p], 0.3 * cfg.n, rtol=1e-9)


@pytest.mark.parametrize('sf', [7, 8, 9])
def test_all_symbols_round_trip(sf):
    cfg = LoRaConfig(sf)
    received = np.stack([make_symbol(cfg, p).samples for p in range(cfg.n)])
    bins = dechirp_dft_batch(cfg, received)
    assert_array_equal(demodulate_batch(bins), np.arange(cfg.n))
    assert_allclose(np.abs(bins).max(axis=1), cfg.n, rtol=1e-6)


def test_sampled_sf12_symbols_round_trip(sf12, rng):
    symbols = rng.integers(0, sf12.n, size=1024)
    for chunk in np.array_split(symbols, 8):
        received = np.stack([make_symbol(sf12, p).samples for p in chunk])
        assert_array_equal(demodulate_batch(dechirp_dft_batch(sf12, received)), chunk)


def test_demodulate_single_bin():
    bins = np.zeros(128, dtype=complex)
    bins[1] = 3
    assert demodulate(DecisionStatistic(bins)) == 1


def test_demodulate_tie_takes_lowest_index():
    bins = np.zeros(128, dtype=complex)
    bins[2] = 1j
    bins[7] = -1
    assert demodulate(DecisionStatistic(bins)) == 2
    assert demodulate_batch(bins[np.newaxis])[0] == 2


def test_fft_matches_direct_sum(sf7, rng):
    for _ in range(100):
        r = ComplexBaseband(rng.standard_normal(128) + 1j * rng.standard_normal(128), sf7.bandwidth_hz)
        fast = dechirp_dft(sf7, r).bins
        slow = direct_dft(sf7, r).bins
        assert np.linalg.norm(fast - slow) / np.linalg.norm(slow) < 1e-9


def test_parseval(sf7, rng):
    r = ComplexBaseband(rng.standard_normal(128) + 1j * rng.standard_normal(128), sf7.bandwidth_hz)
    bins = dechirp_dft(sf7, r).bins
    assert_allclose(np.sum(np.abs(bins)**2), sf7.n * np.sum(np.abs(r.samples)**2), rtol=1e-12)


def test_dechirp_is_linear(sf7, rng):
    a, b = (rng.standard_normal(128) + 1j * rng.standard_normal(128) for _ in range(2))
    sum_bins = dechirp_dft(sf7, ComplexBaseband(a + b, sf7.bandwidth_hz)).bins
    parts = (dechirp_dft(sf7, ComplexBaseband(a, sf7.bandwidth_hz)).bins
             + dechirp_dft(sf7, ComplexBaseband(b, sf7.bandwidth_hz)).bins)
    assert np.linalg.norm(sum_bins - parts) / np.linalg.norm(parts) < 1e-9


def test_empty_statistic_rejected():
    with pytest.raises(DomainError):
        DecisionStatistic(np.array([], dtype=complex))
