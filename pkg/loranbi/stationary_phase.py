"""Stationary-phase approximation of the interference bins.

After dechirping, the interference term of bin k is the sum
Y_i[k] = sum_n i[n] exp(j F[n;k]) with the quadratic phase

    F[n;k] = 2*pi*df*n/B - pi*n*(n-N)/N - 2*pi*k*n/N.

F is stationary at n_k = N*df/B - k + N/2, and for a slowly varying
envelope |Y_i[k]| ~ sqrt(N) * |i[n_k]|: the bin magnitudes trace the
interferer envelope. This module evaluates that approximation and measures
it against the exact dechirped DFT.
"""
import logging
from dataclasses import dataclass

import numpy as np

from .css import dechirp_dft
from .errors import ContractError, DomainError
from .waveforms import apply_freq_offset

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PhaseKernel:
    """Phase F[n;k] of bin `k` for an interferer offset by `delta_f_hz`."""
    cfg: object
    delta_f_hz: float
    k: int

    def __post_init__(self):
        if int(self.k) != self.k or not 0 <= self.k < self.cfg.n:
            raise DomainError(f"bin index must be in [0, {self.cfg.n}), got {self.k!r}")


def stationary_index(kernel):
    """Real-valued stationary point n_k of the kernel's phase, not reduced modulo N."""
    n = kernel.cfg.n
    return n * kernel.delta_f_hz / kernel.cfg.bandwidth_hz - kernel.k + n / 2


def stationary_indices(cfg, delta_f_hz):
    """n_k for every bin k = 0..N-1."""
    n = cfg.n
    return n * delta_f_hz / cfg.bandwidth_hz - np.arange(n) + n / 2


def _phase(cfg, delta_f_hz, n, k):
    n = np.asarray(n, dtype=np.float64)
    return (2 * np.pi * delta_f_hz * n / cfg.bandwidth_hz
            - np.pi * n * (n - cfg.n) / cfg.n
            - 2 * np.pi * k * n / cfg.n)


def phase_term(kernel, n):
    """F[n;k] at (possibly fractional) sample positions `n`."""
    return _phase(kernel.cfg, kernel.delta_f_hz, n, kernel.k)


def mapped_sample_indices(cfg, delta_f_hz):
    """Integer sample index read by each bin: n_k rounded half-up, wrapped modulo N."""
    return np.mod(np.floor(stationary_indices(cfg, delta_f_hz) + 0.5), cfg.n).astype(np.int64)


def _check_segment(cfg, segment):
    if len(segment) != cfg.n or segment.sample_rate_hz != cfg.bandwidth_hz:
        raise ContractError(f"segment must hold {cfg.n} samples at {cfg.bandwidth_hz} Hz")


def approx_interference_bins(cfg, interference_segment, delta_f_hz):
    """Approximate |Y_i[k]| = sqrt(N) * |i[n_k mod N]| for all bins.

    Parameters
    ----------
    cfg : LoRaConfig
    interference_segment : ComplexBaseband
        baseband envelope i[n] of one symbol, before the frequency offset
    delta_f_hz : float

    Returns
    -------
    (N,) array of real magnitudes
    """
    _check_segment(cfg, interference_segment)
    idx = mapped_sample_indices(cfg, delta_f_hz)
    return np.sqrt(cfg.n) * np.abs(interference_segment.samples[idx])


def approx_interference_complex(cfg, interference_segment, delta_f_hz):
    """Complex approximation sqrt(N) * exp(j(F(n_k;k) - pi/4)) * i[n_k]."""
    _check_segment(cfg, interference_segment)
    n_k = stationary_indices(cfg, delta_f_hz)
    phase = _phase(cfg, delta_f_hz, n_k, np.arange(cfg.n))
    idx = mapped_sample_indices(cfg, delta_f_hz)
    return np.sqrt(cfg.n) * np.exp(1j * (phase - np.pi / 4)) * interference_segment.samples[idx]


def exact_interference_bins(cfg, interference_segment, delta_f_hz):
    """|Y_i[k]| from the dechirped DFT of the offset segment."""
    _check_segment(cfg, interference_segment)
    return np.abs(dechirp_dft(cfg, apply_freq_offset(interference_segment, delta_f_hz)).bins)


@dataclass(frozen=True)
class ApproximationError:
    """Per-bin comparison of exact and approximate interference magnitudes.

    Relative figures are normalized by sqrt(N * P_i), P_i being the mean
    power of the segment; they are zero for a segment without energy.
    """
    exact: np.ndarray
    approx: np.ndarray
    n_k: np.ndarray
    max_abs: float
    rms: float
    max_rel: float
    rms_rel: float

    @property
    def per_bin(self):
        return np.abs(self.exact - self.approx)


def approximation_error(cfg, interference_segment, delta_f_hz):
    """Measure the stationary-phase magnitudes against the exact dechirped DFT.

    Bins whose stationary point falls outside the segment are included.

    Returns
    -------
    ApproximationError
    """
    exact = exact_interference_bins(cfg, interference_segment, delta_f_hz)
    approx = approx_interference_bins(cfg, interference_segment, delta_f_hz)
    diff = np.abs(exact - approx)
    scale = np.sqrt(cfg.n * interference_segment.mean_power_mw)
    rel = diff / scale if scale > 0 else np.zeros_like(diff)
    logger.debug("SF%d, offset %.1f Hz: rms relative error %.4f", cfg.sf, delta_f_hz,
                 float(np.sqrt(np.mean(rel**2))))
    return ApproximationError(exact=exact, approx=approx, n_k=stationary_indices(cfg, delta_f_hz),
                              max_abs=float(diff.max()), rms=float(np.sqrt(np.mean(diff**2))),
                              max_rel=float(rel.max()), rms_rel=float(np.sqrt(np.mean(rel**2))))


def flatness(magnitudes):
    """(max - min) / mean of a bin magnitude profile; NaN for an all-zero profile."""
    magnitudes = np.abs(np.asarray(magnitudes))
    mean = magnitudes.mean()
    if mean == 0:
        return np.nan
    return float((magnitudes.max() - magnitudes.min()) / mean)
