import numpy as np
import pytest
import scipy.signal
import scipy.stats
from numpy.testing import assert_allclose, assert_array_equal

from loranbi.css import ComplexBaseband, LoRaConfig
from loranbi.errors import DomainError
from loranbi.waveforms import (InterferenceKind, InterferenceSpec, RngStream, apply_freq_offset, bpsk_baseband,
                               envelope_statistics, gen_awgn, gen_bpsk, gen_gmsk, gen_interferer, gmsk_baseband,
                               gmsk_phase, normalize_power, occupied_fraction, random_segment)

FS = 125e3
RATE = 600.


def test_stream_determinism():
    a = RngStream(7, 3).generator().standard_normal(16)
    b = RngStream(7, 3).generator().standard_normal(16)
    c = RngStream(7, 4).generator().standard_normal(16)
    assert_array_equal(a, b)
    assert not np.array_equal(a, c)


@pytest.mark.parametrize('seed, stream_id', [(-1, 0), (2**64, 0), (0, 1.5)])
def test_stream_rejects_ids(seed, stream_id):
    with pytest.raises(DomainError):
        RngStream(seed, stream_id)


def test_bpsk_constant_bits_constant_envelope():
    w = bpsk_baseband(np.ones(20), RATE, int(20 * FS / RATE), FS)
    assert np.all(np.abs(np.abs(w.samples) - 1) < 1e-9)


def test_bpsk_flips_cross_zero_on_bit_boundaries():
    n_bits = 20
    bits = np.tile([1, -1], n_bits // 2)
    w = bpsk_baseband(bits, RATE, int(n_bits * FS / RATE), FS)
    boundaries = np.round(np.arange(1, n_bits) * FS / RATE).astype(int)
    assert np.all(np.abs(w.samples[boundaries]) < 0.01 * np.abs(w.samples).max())


def test_bpsk_normalized_power():
    w = normalize_power(gen_bpsk(RATE, 0.5, FS, RngStream(1)), 1.)
    assert abs(w.mean_power_mw - 1) < 1e-6


def test_bpsk_peak_to_rms():
    w = gen_bpsk(RATE, 2., FS, RngStream(2))
    assert envelope_statistics(w).peak_to_rms == pytest.approx(1 / np.sqrt(0.75), abs=0.03)


def test_too_short_waveform():
    with pytest.raises(DomainError):
        gen_bpsk(RATE, 4 / RATE, FS, RngStream(0))
    with pytest.raises(DomainError):
        gen_gmsk(RATE, 0.5, 1., 4 * RATE, RngStream(0))


def test_gmsk_constant_envelope():
    w = normalize_power(gen_gmsk(RATE, 0.5, 0.5, FS, RngStream(3)), 2.5)
    assert np.all(np.abs(np.abs(w.samples) - np.sqrt(2.5)) < 1e-12)


def test_gmsk_same_bits_constant_frequency():
    n_samples = int(40 * FS / RATE)
    phase = gmsk_phase(np.ones(40), RATE, 0.5, n_samples, FS)
    middle = np.diff(phase)[n_samples // 4:3 * n_samples // 4]
    assert_allclose(middle, 2 * np.pi * (RATE / 4) / FS, rtol=1e-9)


def test_gmsk_negated_bits_conjugate():
    bits = np.random.default_rng(11).choice([-1., 1.], size=16)
    n_samples = int(16 * FS / RATE)
    w = gmsk_baseband(bits, RATE, 0.5, n_samples, FS)
    assert_allclose(gmsk_baseband(-bits, RATE, 0.5, n_samples, FS).samples, np.conj(w.samples), atol=1e-9)


def test_gmsk_occupied_bandwidth():
    w = gen_gmsk(RATE, 0.5, 1., FS, RngStream(4))
    assert occupied_fraction(w, RATE) >= 0.99


def test_awgn_power():
    x = gen_awgn(10**6, 1., RngStream(5))
    assert 0.99 <= x.mean_power_mw <= 1.01


def test_awgn_rayleigh_magnitude():
    magnitude = np.abs(gen_awgn(10**5, 1., RngStream(6)).samples)
    assert magnitude.mean() == pytest.approx(np.sqrt(np.pi / 4), abs=0.01)
    assert scipy.stats.kstest(magnitude, 'rayleigh', args=(0, np.sqrt(0.5))).pvalue > 1e-3


def test_awgn_zero_power():
    assert np.all(gen_awgn(64, 0., RngStream(0)).samples == 0)


def test_normalize_power():
    w = ComplexBaseband(np.full(32, 2 + 0j), FS)
    assert_allclose(np.abs(normalize_power(w, 1.).samples), 1.)
    x = gen_awgn(256, 3., RngStream(7))
    assert_allclose(normalize_power(normalize_power(x, 4.), 1.).samples, normalize_power(x, 1.).samples)
    with pytest.raises(DomainError):
        normalize_power(ComplexBaseband(np.zeros(8), FS), 1.)


def test_freq_offset_identities():
    x = gen_awgn(256, 1., RngStream(8))
    assert_array_equal(apply_freq_offset(x, 0.).samples, x.samples)
    assert_array_equal(apply_freq_offset(x, FS).samples, x.samples)


def test_freq_offset_moves_tone():
    n = np.arange(1250)
    tone = ComplexBaseband(np.exp(2j * np.pi * 1000. * n / FS), FS)
    f, pxx = scipy.signal.periodogram(apply_freq_offset(tone, 2000.).samples, fs=FS, return_onesided=False)
    assert f[np.argmax(pxx)] == pytest.approx(3000.)


def test_random_segment():
    w = ComplexBaseband(np.arange(10), FS)
    assert_array_equal(random_segment(w, 10, RngStream(0)).samples, w.samples)
    assert_array_equal(random_segment(w, 4, RngStream(9)).samples, random_segment(w, 4, RngStream(9)).samples)
    with pytest.raises(DomainError):
        random_segment(w, 11, RngStream(0))


def test_random_segment_uniform_start():
    n = 9
    w = ComplexBaseband(np.arange(2 * n), FS)
    gen = RngStream(10).generator()
    starts = np.array([int(random_segment(w, n, gen).samples[0].real) for _ in range(10**4)])
    counts = np.bincount(starts, minlength=n + 1)
    assert counts.size == n + 1
    assert scipy.stats.chisquare(counts).pvalue > 1e-3


def test_interferer_inside_band():
    cfg = LoRaConfig(7)
    InterferenceSpec('gmsk', 600., 1., 62000.).check(cfg)
    with pytest.raises(DomainError):
        InterferenceSpec('gmsk', 600., 1., 62300.1).check(cfg)
    with pytest.raises(DomainError):
        InterferenceSpec('bpsk', 125e3).check(cfg)


@pytest.mark.parametrize('kind', list(InterferenceKind))
def test_gen_interferer_power_and_length(kind):
    cfg = LoRaConfig(8)
    w = gen_interferer(kind, cfg, RngStream(11), power_mw=2., n_symbols=10)
    assert len(w) == 10 * cfg.n
    assert w.sample_rate_hz == cfg.bandwidth_hz
    if kind is not InterferenceKind.AWGN_CONTROL:
        assert w.mean_power_mw == pytest.approx(2.)


def test_amplitude_ordering():
    cfg = LoRaConfig(7)
    stats = {kind: envelope_statistics(gen_interferer(kind, cfg, RngStream(12), n_symbols=400))
             for kind in InterferenceKind}
    awgn, bpsk, gmsk = (stats[k] for k in (InterferenceKind.AWGN_CONTROL, InterferenceKind.BPSK,
                                          InterferenceKind.GMSK))
    assert awgn.peak_to_rms > bpsk.peak_to_rms > gmsk.peak_to_rms
    assert gmsk.peak_to_rms == pytest.approx(1.)
    assert awgn.probability_above(1.5) > 0
    assert bpsk.probability_above(1.5) == gmsk.probability_above(1.5) == 0
    assert awgn.mean_amplitude == pytest.approx(np.sqrt(np.pi / 4), abs=0.02)
