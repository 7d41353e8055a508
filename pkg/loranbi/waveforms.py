"""Interferer and noise waveforms: pulse-shaped BPSK, GMSK and AWGN.

All generators evaluate their pulses at exact sample times, so a bit or
symbol rate that does not divide the sample rate (600 Hz at 125 kHz) is
handled without resampling.
"""
import enum
import logging
from dataclasses import dataclass

import numpy as np
import scipy.signal
from scipy.special import ndtr

from .css import DEFAULT_BANDWIDTH_HZ, ComplexBaseband
from .errors import DomainError

logger = logging.getLogger(__name__)

DEFAULT_OCCUPIED_BANDWIDTH_HZ = 600.
DEFAULT_BT_PRODUCT = 0.5
MODULATION_INDEX = 0.5
# Symbol periods cut from both ends of a generated waveform (filter transients)
GUARD_SYMBOLS = 4
# LoRa symbol durations per generated waveform, i.e. per trial batch
WAVEFORM_SYMBOLS = 100
MIN_BITS = 8
MIN_OVERSAMPLING = 10

_UINT64 = 1 << 64


class InterferenceKind(str, enum.Enum):
    """Kind of the extra signal added on top of the noise floor."""
    BPSK = 'bpsk'
    GMSK = 'gmsk'
    AWGN_CONTROL = 'awgn'

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream identified by `(seed, stream_id)`.

    Streams with different ids are statistically independent; the same
    pair always yields the same sequence.
    """
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ('seed', 'stream_id'):
            value = getattr(self, name)
            if int(value) != value or not 0 <= value < _UINT64:
                raise DomainError(f"{name} must be an unsigned 64-bit integer, got {value!r}")
            object.__setattr__(self, name, int(value))

    def generator(self):
        """Fresh `numpy.random.Generator` positioned at the start of the stream."""
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(seq))


def as_generator(rng):
    """Accept either an `RngStream` or an already running Generator."""
    if isinstance(rng, RngStream):
        return rng.generator()
    return rng


@dataclass(frozen=True)
class InterferenceSpec:
    """One narrowband interferer as seen by the receiver.

    Parameters
    ----------
    kind : InterferenceKind
    occupied_bandwidth_hz : float
        bandwidth W occupied by the interferer
    power_mw : float
        average power P_i
    freq_offset_hz : float
        interferer center minus LoRa center
    """
    kind: InterferenceKind
    occupied_bandwidth_hz: float = DEFAULT_OCCUPIED_BANDWIDTH_HZ
    power_mw: float = 1.
    freq_offset_hz: float = 0.

    def __post_init__(self):
        object.__setattr__(self, 'kind', InterferenceKind(self.kind))
        if not self.occupied_bandwidth_hz > 0:
            raise DomainError(f"occupied bandwidth must be positive, got {self.occupied_bandwidth_hz!r}")
        if not self.power_mw > 0:
            raise DomainError(f"interference power must be positive, got {self.power_mw!r}")

    def check(self, cfg):
        """Raise unless the interferer lies entirely inside the LoRa band of `cfg`."""
        if self.occupied_bandwidth_hz >= cfg.bandwidth_hz:
            raise DomainError("interferer must be narrower than the LoRa bandwidth")
        low, high = freq_offset_range(cfg, self.occupied_bandwidth_hz)
        if not low <= self.freq_offset_hz <= high:
            raise DomainError(f"frequency offset {self.freq_offset_hz} Hz puts the interferer "
                              f"outside the LoRa band [{low}, {high}]")
        return self


def freq_offset_range(cfg, occupied_bandwidth_hz):
    """Admissible center offsets keeping an interferer of width W inside the band."""
    half = (cfg.bandwidth_hz - occupied_bandwidth_hz) / 2
    return -half, half


def _check_rates(rate_hz, duration_s, sample_rate_hz):
    if not rate_hz > 0 or not duration_s > 0 or not sample_rate_hz > 0:
        raise DomainError("rates and duration must be positive")
    if duration_s * rate_hz < MIN_BITS * (1 - 1e-12):
        raise DomainError(f"waveform must span at least {MIN_BITS} bits, "
                          f"got {duration_s * rate_hz:.3g}")
    if sample_rate_hz < MIN_OVERSAMPLING * rate_hz:
        raise DomainError(f"sample rate must be at least {MIN_OVERSAMPLING}x the bit rate")


def _n_samples(duration_s, sample_rate_hz):
    return max(1, int(round(duration_s * sample_rate_hz)))


def _draw_nrz(rng, n_bits):
    return as_generator(rng).integers(0, 2, size=n_bits) * 2 - 1


def bpsk_baseband(bits, bit_rate_hz, n_samples, sample_rate_hz):
    """Real BPSK envelope with raised-cosine transitions between bit centers.

    Between the centers of bit m and bit m+1 the envelope moves from b_m to
    b_{m+1} along (1 + cos(pi*u))/2, u in [0, 1). Equal neighbours give a
    constant envelope; a flip crosses zero exactly on the bit boundary.
    Before the first and after the last bit center the envelope holds.

    Parameters
    ----------
    bits : array_like
        NRZ symbols, +1 or -1 (0/1 are mapped to -1/+1)
    bit_rate_hz : float
    n_samples : int
    sample_rate_hz : float

    Returns
    -------
    ComplexBaseband
        waveform with zero imaginary part and peak amplitude 1
    """
    bits = np.asarray(bits, dtype=np.float64)
    if bits.size and bits.min() >= 0:
        bits = bits * 2 - 1
    # position in bit-center coordinates: integer values are bit centers
    x = np.arange(n_samples) * (bit_rate_hz / sample_rate_hz) - 0.5
    m = np.floor(x).astype(np.int64)
    u = x - m
    left = bits[np.clip(m, 0, bits.size - 1)]
    right = bits[np.clip(m + 1, 0, bits.size - 1)]
    weight = 0.5 * (1 + np.cos(np.pi * u))
    return ComplexBaseband(left * weight + right * (1 - weight), sample_rate_hz)


def gen_bpsk(bit_rate_hz, duration_s, sample_rate_hz, rng):
    """Pulse-shaped BPSK with random equiprobable bits, see `bpsk_baseband`."""
    _check_rates(bit_rate_hz, duration_s, sample_rate_hz)
    bits = _draw_nrz(rng, int(np.ceil(duration_s * bit_rate_hz - 1e-9)))
    return bpsk_baseband(bits, bit_rate_hz, _n_samples(duration_s, sample_rate_hz), sample_rate_hz)


def _gaussian_pulse_integral(tau, c, period):
    """Running integral of the GMSK frequency pulse, from -inf to `tau`.

    The frequency pulse is the rectangular NRZ pulse of width `period`
    filtered by a Gaussian, (1/2T)[Phi(c(t+T/2)) - Phi(c(t-T/2))]; its total
    area is 1/2. With Psi(u) = u*Phi(c*u) + phi(c*u)/c the integral is
    (1/2T)[Psi(tau + T/2) - Psi(tau - T/2)].
    """
    def psi(u):
        z = c * u
        return u * ndtr(z) + np.exp(-0.5 * z * z) / (np.sqrt(2 * np.pi) * c)
    return (psi(tau + period / 2) - psi(tau - period / 2)) / (2 * period)


def gmsk_phase(bits, symbol_rate_hz, bt_product, n_samples, sample_rate_hz,
               modulation_index=MODULATION_INDEX):
    """Continuous phase of a GMSK waveform at exact sample times.

    Returns
    -------
    phase : (n_samples,) array
        phase in radians; each bit contributes +-pi*h once fully integrated
    """
    bits = np.asarray(bits, dtype=np.float64)
    if bits.size and bits.min() >= 0:
        bits = bits * 2 - 1
    period = 1. / symbol_rate_hz
    # 3-dB bandwidth B = BT/T, Gaussian in time has std 1/c
    c = 2 * np.pi * bt_product / (period * np.sqrt(np.log(2)))
    span = int(np.ceil(0.5 + 8. / (c * period))) + 1

    x = np.arange(n_samples) * (symbol_rate_hz / sample_rate_hz) - 0.5
    m_c = np.floor(x).astype(np.int64)
    # bits entirely in the past contribute half their area each
    cumulative = np.concatenate([[0.], np.cumsum(bits)])
    past = cumulative[np.clip(m_c - span, 0, bits.size)]

    offsets = np.arange(-span, span + 1)
    m = m_c[:, np.newaxis] + offsets[np.newaxis, :]
    valid = (m >= 0) & (m < bits.size)
    b = np.where(valid, bits[np.clip(m, 0, bits.size - 1)], 0.)
    tau = (x[:, np.newaxis] - m) * period
    window = np.sum(b * _gaussian_pulse_integral(tau, c, period), axis=1)
    return 2 * np.pi * modulation_index * (0.5 * past + window)


def gmsk_baseband(bits, symbol_rate_hz, bt_product, n_samples, sample_rate_hz,
                  modulation_index=MODULATION_INDEX):
    """Unit-amplitude GMSK waveform exp(j*phase), see `gmsk_phase`."""
    phase = gmsk_phase(bits, symbol_rate_hz, bt_product, n_samples, sample_rate_hz,
                       modulation_index=modulation_index)
    return ComplexBaseband(np.exp(1j * phase), sample_rate_hz)


def gen_gmsk(symbol_rate_hz, bt_product, duration_s, sample_rate_hz, rng):
    """GMSK with random equiprobable bits: NRZ, Gaussian filter, phase integration, h = 0.5."""
    _check_rates(symbol_rate_hz, duration_s, sample_rate_hz)
    if not 0 < bt_product <= 1:
        raise DomainError(f"BT product must be in (0, 1], got {bt_product!r}")
    bits = _draw_nrz(rng, int(np.ceil(duration_s * symbol_rate_hz - 1e-9)))
    return gmsk_baseband(bits, symbol_rate_hz, bt_product,
                         _n_samples(duration_s, sample_rate_hz), sample_rate_hz)


def gen_awgn(n_samples, power_mw, rng, sample_rate_hz=DEFAULT_BANDWIDTH_HZ):
    """Circular complex Gaussian noise, variance power_mw/2 per dimension."""
    if int(n_samples) != n_samples or n_samples < 1:
        raise DomainError(f"need at least one sample, got {n_samples!r}")
    if power_mw < 0:
        raise DomainError(f"noise power must be non-negative, got {power_mw!r}")
    draws = as_generator(rng).standard_normal(size=(2, int(n_samples)))
    scale = np.sqrt(power_mw / 2)
    return ComplexBaseband(scale * (draws[0] + 1j * draws[1]), sample_rate_hz)


def normalize_power(w, target_mw):
    """Scale `w` so that its time-mean power equals `target_mw`."""
    if not target_mw > 0:
        raise DomainError(f"target power must be positive, got {target_mw!r}")
    power = w.mean_power_mw
    if power == 0:
        raise DomainError("cannot normalize a waveform without energy")
    return ComplexBaseband(w.samples * np.sqrt(target_mw / power), w.sample_rate_hz)


def apply_freq_offset(w, delta_f_hz):
    """Shift `w` in frequency by `delta_f_hz`, exp(2j*pi*df*n/fs) per sample."""
    n = np.arange(len(w))
    cycles = np.mod(delta_f_hz / w.sample_rate_hz * n, 1.)
    return ComplexBaseband(w.samples * np.exp(2j * np.pi * cycles), w.sample_rate_hz)


def random_segment(w, n_samples, rng):
    """Contiguous slice of `n_samples` starting at a uniformly drawn index."""
    if int(n_samples) != n_samples or n_samples < 1:
        raise DomainError(f"segment length must be positive, got {n_samples!r}")
    if n_samples > len(w):
        raise DomainError(f"segment of {n_samples} samples does not fit in a waveform of {len(w)}")
    start = int(as_generator(rng).integers(0, len(w) - n_samples + 1))
    return ComplexBaseband(w.samples[start:start + n_samples], w.sample_rate_hz)


def gen_interferer(kind, cfg, rng, power_mw=1., n_symbols=WAVEFORM_SYMBOLS,
                   occupied_bandwidth_hz=DEFAULT_OCCUPIED_BANDWIDTH_HZ,
                   bt_product=DEFAULT_BT_PRODUCT):
    """Long interferer waveform for one trial batch, normalized to `power_mw`.

    Covers `n_symbols` LoRa symbol durations at the LoRa sample rate. For the
    modulated kinds, `GUARD_SYMBOLS` interferer symbol periods are generated
    on both sides and cut off before normalization.

    Parameters
    ----------
    kind : InterferenceKind or str
    cfg : LoRaConfig
    rng : RngStream or numpy.random.Generator
    power_mw : float, default=1.
    n_symbols : int, default=100
    occupied_bandwidth_hz : float, default=600.
        also used as the bit/symbol rate of the interferer
    bt_product : float, default=0.5
        GMSK only

    Returns
    -------
    ComplexBaseband
    """
    kind = InterferenceKind(kind)
    fs = cfg.bandwidth_hz
    n_usable = n_symbols * cfg.n
    if kind is InterferenceKind.AWGN_CONTROL:
        return gen_awgn(n_usable, power_mw, rng, sample_rate_hz=fs)

    rate = occupied_bandwidth_hz
    guard = int(np.ceil(GUARD_SYMBOLS * fs / rate))
    duration = (n_usable + 2 * guard) / fs
    if kind is InterferenceKind.BPSK:
        w = gen_bpsk(rate, duration, fs, rng)
    else:
        w = gen_gmsk(rate, bt_product, duration, fs, rng)
    w = ComplexBaseband(w.samples[guard:guard + n_usable], fs)
    logger.debug("generated %s waveform: %d samples, guard %d", kind, n_usable, guard)
    return normalize_power(w, power_mw)


@dataclass(frozen=True)
class EnvelopeStatistics:
    """Amplitude statistics of a waveform relative to its RMS value."""
    mean_amplitude: float
    rms: float
    peak_to_rms: float
    exceedance: dict

    def probability_above(self, level):
        return self.exceedance[level]


def envelope_statistics(w, levels=(1.1, 1.5, 2.)):
    """Mean amplitude, RMS, peak-to-RMS and P(|w| > level * RMS) per level."""
    magnitude = np.abs(w.samples)
    rms = float(np.sqrt(np.mean(magnitude**2)))
    exceedance = {level: float(np.mean(magnitude > level * rms)) for level in levels}
    return EnvelopeStatistics(mean_amplitude=float(magnitude.mean()),
                              rms=rms,
                              peak_to_rms=float(magnitude.max() / rms) if rms > 0 else np.nan,
                              exceedance=exceedance)


def occupied_fraction(w, half_width_hz, center_hz=0.):
    """Fraction of periodogram power within `center_hz` +- `half_width_hz`."""
    f, pxx = scipy.signal.periodogram(w.samples, fs=w.sample_rate_hz, window='hann',
                                      detrend=False, return_onesided=False)
    inside = np.abs(f - center_hz) <= half_width_hz
    return float(pxx[inside].sum() / pxx.sum())
