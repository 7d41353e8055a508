"""Chirp spread spectrum symbols, dechirping and the DFT decision statistic.

One sample per chip: every waveform handled here is sampled at the LoRa
bandwidth, so a symbol is exactly N = 2**SF samples long.
"""
import logging
from dataclasses import dataclass, field

import numba
import numpy as np
import scipy.fft

from .errors import ContractError, DomainError

logger = logging.getLogger(__name__)

SPREADING_FACTORS = tuple(range(7, 13))
DEFAULT_BANDWIDTH_HZ = 125e3


@dataclass(frozen=True)
class LoRaConfig:
    """Spreading factor and bandwidth of a LoRa link.

    Parameters
    ----------
    sf : int
        spreading factor, 7 to 12
    bandwidth_hz : float, default=125e3
        LoRa bandwidth, also the sample rate
    """
    sf: int
    bandwidth_hz: float = DEFAULT_BANDWIDTH_HZ

    def __post_init__(self):
        if isinstance(self.sf, bool) or int(self.sf) != self.sf or self.sf not in SPREADING_FACTORS:
            raise DomainError(f"spreading factor must be one of {SPREADING_FACTORS}, got {self.sf!r}")
        if not np.isfinite(self.bandwidth_hz) or self.bandwidth_hz <= 0:
            raise DomainError(f"bandwidth must be positive, got {self.bandwidth_hz!r}")
        object.__setattr__(self, 'sf', int(self.sf))
        object.__setattr__(self, 'bandwidth_hz', float(self.bandwidth_hz))

    @property
    def n(self):
        """Symbol length in samples, 2**SF."""
        return 1 << self.sf

    @property
    def symbol_duration_s(self):
        return self.n / self.bandwidth_hz


@dataclass(frozen=True, eq=False)
class ComplexBaseband:
    """Finite complex baseband waveform.

    `samples` are in sqrt(mW), so ``abs(samples)**2`` is instantaneous
    power in mW. The array is copied and frozen on construction.
    """
    samples: np.ndarray
    sample_rate_hz: float

    def __post_init__(self):
        samples = np.array(self.samples, dtype=np.complex128).ravel()
        if samples.size == 0:
            raise DomainError("waveform must contain at least one sample")
        if not np.all(np.isfinite(samples)):
            raise DomainError("waveform samples must be finite")
        if not np.isfinite(self.sample_rate_hz) or self.sample_rate_hz <= 0:
            raise DomainError(f"sample rate must be positive, got {self.sample_rate_hz!r}")
        samples.flags.writeable = False
        object.__setattr__(self, 'samples', samples)
        object.__setattr__(self, 'sample_rate_hz', float(self.sample_rate_hz))

    def __len__(self):
        return self.samples.size

    @property
    def mean_power_mw(self):
        return float(np.mean(np.abs(self.samples)**2))

    def __add__(self, other):
        if not isinstance(other, ComplexBaseband):
            return NotImplemented
        if len(self) != len(other) or self.sample_rate_hz != other.sample_rate_hz:
            raise ContractError("can only add waveforms of equal length and sample rate")
        return ComplexBaseband(self.samples + other.samples, self.sample_rate_hz)


@dataclass(frozen=True, eq=False)
class DecisionStatistic:
    """The N complex DFT bins Y[k] of one dechirped symbol."""
    bins: np.ndarray = field(repr=False)

    def __post_init__(self):
        bins = np.array(self.bins, dtype=np.complex128).ravel()
        if bins.size == 0:
            raise DomainError("a decision statistic needs at least one bin")
        bins.flags.writeable = False
        object.__setattr__(self, 'bins', bins)

    def __len__(self):
        return self.bins.size

    def check(self, cfg):
        """Raise if the statistic does not have N bins for `cfg`."""
        if len(self) != cfg.n:
            raise ContractError(f"decision statistic has {len(self)} bins, SF{cfg.sf} needs {cfg.n}")
        return self


def upchirp_samples(n):
    """Raw upchirp exp(j*pi*k*(k-n)/n) for k = 0..n-1 as an array."""
    k = np.arange(n, dtype=np.float64)
    # k*(k-n) mod 2n keeps the argument small, so the phase stays exact for SF12
    return np.exp(1j * np.pi * np.mod(k * (k - n), 2 * n) / n)


def make_upchirp(cfg):
    """Index-0 symbol of the CSS alphabet, sampled at the bandwidth."""
    return ComplexBaseband(upchirp_samples(cfg.n), cfg.bandwidth_hz)


def make_symbol(cfg, p, amplitude=1.):
    """Time-domain LoRa symbol with index `p`.

    Built as the upchirp times a DFT-grid tone at bin `p`, so that
    dechirping leaves ``amplitude * exp(2j*pi*p*n/N)`` and the DFT peaks
    at bin `p` with the real value ``amplitude * N``.

    Parameters
    ----------
    cfg : LoRaConfig
    p : int
        symbol index, 0 <= p < N
    amplitude : float, default=1.
        per-sample RMS amplitude, sqrt of the signal power in mW

    Returns
    -------
    ComplexBaseband
    """
    n = cfg.n
    if int(p) != p or not 0 <= p < n:
        raise DomainError(f"symbol index must be in [0, {n}), got {p!r}")
    if not amplitude > 0:
        raise DomainError(f"amplitude must be positive, got {amplitude!r}")
    k = np.arange(n)
    tone = np.exp(2j * np.pi * np.mod(int(p) * k, n) / n)
    return ComplexBaseband(amplitude * upchirp_samples(n) * tone, cfg.bandwidth_hz)


def dechirp(cfg, received):
    """Multiply `received` by the conjugate upchirp, checking the contract."""
    if len(received) != cfg.n:
        raise ContractError(f"expected {cfg.n} samples for SF{cfg.sf}, got {len(received)}")
    if received.sample_rate_hz != cfg.bandwidth_hz:
        raise ContractError(f"expected sample rate {cfg.bandwidth_hz} Hz, "
                            f"got {received.sample_rate_hz} Hz")
    return upchirp_samples(cfg.n).conj() * received.samples


def dechirp_dft(cfg, received):
    """Dechirp one symbol and apply the un-normalized N-point DFT.

    Bin k holds sum_n conj(s0[n]) * r[n] * exp(-2j*pi*k*n/N); a clean
    unit-amplitude symbol peaks at magnitude N.
    """
    return DecisionStatistic(scipy.fft.fft(dechirp(cfg, received), norm='backward'))


def dechirp_dft_batch(cfg, received):
    """Row-wise `dechirp_dft` of a (trials, N) array of samples at rate B.

    Returns the (trials, N) array of bins.
    """
    received = np.asarray(received)
    if received.shape[-1] != cfg.n:
        raise ContractError(f"expected {cfg.n} samples per row for SF{cfg.sf}, got {received.shape[-1]}")
    return scipy.fft.fft(received * upchirp_samples(cfg.n).conj(), axis=-1)


@numba.njit(nogil=True, cache=True)
def _direct_dft(y):
    n = y.shape[0]
    out = np.zeros(n, dtype=np.complex128)
    for k in range(n):
        acc = 0j
        for m in range(n):
            # (k*m) mod n keeps the twiddle argument exact
            acc += y[m] * np.exp(-2j * np.pi * ((k * m) % n) / n)
        out[k] = acc
    return out


def direct_dft(cfg, received):
    """O(N**2) direct evaluation of the dechirped DFT sum, the reference for `dechirp_dft`."""
    return DecisionStatistic(_direct_dft(np.ascontiguousarray(dechirp(cfg, received))))


def demodulate(stat):
    """Index of the bin with the largest magnitude; the lowest index wins ties."""
    # np.argmax returns the first occurrence of the maximum
    return int(np.argmax(np.abs(stat.bins)))


def demodulate_batch(bins):
    """Row-wise `demodulate` of a (trials, N) array of bins."""
    return np.argmax(np.abs(np.asarray(bins)), axis=-1)
