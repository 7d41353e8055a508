"""Monte Carlo symbol error rate of LoRa under noise and narrowband interference.

Each trial builds the decision statistic Y[k] = Y_s[k] + Y_n[k] + Y_i[k]:
the signal bin and the noise bins are drawn directly in the frequency
domain, the interference term goes through the actual dechirp and DFT.
Trial `t` of a scenario draws everything from ``RngStream(seed, t)``; the
interferer waveform shared by a batch of trials comes from a separate
stream, so results do not depend on how batches are scheduled.
"""
import logging
from dataclasses import dataclass, field

import dask
import numpy as np
import scipy.constants
import xarray as xr
from dask.delayed import delayed
from scipy.stats import binomtest

from .css import ComplexBaseband, DecisionStatistic, LoRaConfig, dechirp_dft, demodulate, make_symbol
from .errors import DomainError, ThresholdSearchError
from .waveforms import (DEFAULT_BT_PRODUCT, DEFAULT_OCCUPIED_BANDWIDTH_HZ, InterferenceKind,
                        InterferenceSpec, RngStream, apply_freq_offset, as_generator, freq_offset_range,
                        gen_awgn, gen_interferer, random_segment)

logger = logging.getLogger(__name__)

DEFAULT_TRIALS = 10000
DEFAULT_BATCH_SIZE = 100
# Stream ids at and above this value carry per-batch interferer waveforms
WAVEFORM_STREAM_BASE = 1 << 62
DEFAULT_STEP_DB = 0.5
DEFAULT_START_OFFSET_DB = 40.
SCAN_SPAN_DB = 80.

# LoRa datasheet sensitivity at 125 kHz, dBm
DATASHEET_SENSITIVITY_DBM = {7: -123., 8: -126., 9: -129., 10: -132., 11: -134.5, 12: -137.}


@dataclass(frozen=True)
class NoiseModel:
    """Receiver noise floor: thermal noise k_B*T*B plus the noise figure."""
    bandwidth_hz: float = 125e3
    temperature_k: float = 290.
    noise_figure_db: float = 6.

    def __post_init__(self):
        if not self.bandwidth_hz > 0 or not self.temperature_k > 0:
            raise DomainError("noise bandwidth and temperature must be positive")

    @property
    def thermal_noise_dbm(self):
        return 10 * np.log10(scipy.constants.k * self.temperature_k * self.bandwidth_hz / 1e-3)

    @property
    def noise_floor_dbm(self):
        return self.thermal_noise_dbm + self.noise_figure_db

    @property
    def noise_power_mw(self):
        return 10**(self.noise_floor_dbm / 10)


def db_to_linear(db):
    return 10**(np.asarray(db, dtype=np.float64) / 10)


@dataclass(frozen=True)
class Scenario:
    """Everything that defines one SER measurement.

    Powers are referenced to the noise floor: P_n is the floor in mW,
    P_s = P_n * 10**(snr/10) and P_i = P_n * 10**(inr/10).

    Parameters
    ----------
    cfg : LoRaConfig
    snr_db : float
    inr_db : float or None
        must be given together with `interferer`
    interferer : InterferenceKind or None
    noise : NoiseModel
    trials : int, default=10000
    seed : int, default=0
    noise_enabled : bool, default=True
        False drops the Y_n term entirely (the P_n -> 0 limit)
    occupied_bandwidth_hz : float, default=600.
    bt_product : float, default=0.5
    batch_size : int, default=100
        trials sharing one generated interferer waveform
    """
    cfg: LoRaConfig
    snr_db: float
    inr_db: float = None
    interferer: InterferenceKind = None
    noise: NoiseModel = field(default_factory=NoiseModel)
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    noise_enabled: bool = True
    occupied_bandwidth_hz: float = DEFAULT_OCCUPIED_BANDWIDTH_HZ
    bt_product: float = DEFAULT_BT_PRODUCT
    batch_size: int = DEFAULT_BATCH_SIZE

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1:
            raise DomainError(f"trials must be a positive integer, got {self.trials!r}")
        if int(self.batch_size) != self.batch_size or self.batch_size < 1:
            raise DomainError(f"batch size must be a positive integer, got {self.batch_size!r}")
        if (self.inr_db is None) != (self.interferer is None):
            raise DomainError("inr_db and interferer must be given together")
        if self.interferer is not None:
            object.__setattr__(self, 'interferer', InterferenceKind(self.interferer))
        if self.noise.bandwidth_hz != self.cfg.bandwidth_hz:
            raise DomainError("noise model bandwidth must equal the LoRa bandwidth")
        RngStream(self.seed)

    @property
    def noise_power_mw(self):
        return self.noise.noise_power_mw

    @property
    def signal_power_mw(self):
        return float(self.noise_power_mw * db_to_linear(self.snr_db))

    @property
    def interference_power_mw(self):
        if self.inr_db is None:
            return None
        return float(self.noise_power_mw * db_to_linear(self.inr_db))

    @property
    def rssi_dbm(self):
        return self.noise.noise_floor_dbm + self.snr_db

    @property
    def n_batches(self):
        return -(-self.trials // self.batch_size)


def wilson_interval(errors, trials, confidence=0.95):
    """Wilson score interval of an error proportion."""
    ci = binomtest(int(errors), int(trials)).proportion_ci(confidence_level=confidence, method='wilson')
    return float(ci.low), float(ci.high)


@dataclass(frozen=True)
class SerEstimate:
    errors: int
    trials: int

    def __post_init__(self):
        if not 0 <= self.errors <= self.trials or self.trials < 1:
            raise DomainError(f"invalid error count {self.errors}/{self.trials}")

    @property
    def ser(self):
        return self.errors / self.trials

    @property
    def wilson_ci95(self):
        return wilson_interval(self.errors, self.trials)


def trial_stream(seed, trial):
    return RngStream(seed, trial)


def batch_waveform_stream(seed, batch):
    return RngStream(seed, WAVEFORM_STREAM_BASE + batch)


def batch_waveform(scenario, batch):
    """Unit-power interferer waveform shared by the trials of `batch`.

    None when the scenario has no modulated interferer.
    """
    if scenario.interferer not in (InterferenceKind.BPSK, InterferenceKind.GMSK):
        return None
    return gen_interferer(scenario.interferer, scenario.cfg, batch_waveform_stream(scenario.seed, batch),
                          power_mw=1., occupied_bandwidth_hz=scenario.occupied_bandwidth_hz,
                          bt_product=scenario.bt_product)


def interference_segment(scenario, rng, waveform=None):
    """Time-domain interference sigma_i[n] for one trial.

    For modulated interferers a segment of N samples is cut from the
    unit-power `waveform` at a random start, scaled to P_i and shifted by a
    uniformly drawn offset keeping it inside the LoRa band. The AWGN control
    draws N samples of white noise of power P_i instead.
    """
    gen = as_generator(rng)
    cfg = scenario.cfg
    p_i = scenario.interference_power_mw
    if scenario.interferer is InterferenceKind.AWGN_CONTROL:
        return gen_awgn(cfg.n, p_i, gen, sample_rate_hz=cfg.bandwidth_hz)
    if waveform is None:
        waveform = gen_interferer(scenario.interferer, cfg, gen, power_mw=1.,
                                  occupied_bandwidth_hz=scenario.occupied_bandwidth_hz,
                                  bt_product=scenario.bt_product)
    low, high = freq_offset_range(cfg, scenario.occupied_bandwidth_hz)
    spec = InterferenceSpec(scenario.interferer, scenario.occupied_bandwidth_hz, p_i,
                            float(gen.uniform(low, high))).check(cfg)
    segment = random_segment(waveform, cfg.n, gen)
    segment = ComplexBaseband(segment.samples * np.sqrt(p_i), segment.sample_rate_hz)
    return apply_freq_offset(segment, spec.freq_offset_hz)


def _check_symbol(cfg, p):
    if int(p) != p or not 0 <= p < cfg.n:
        raise DomainError(f"symbol index must be in [0, {cfg.n}), got {p!r}")


def decompose_trial(scenario, p, rng, waveform=None):
    """The separate bins Y_s, Y_n, Y_i and their sum for one trial.

    Returns
    -------
    components : dict
        keys 'signal', 'noise', 'interference', 'total', each an (N,) array
    """
    _check_symbol(scenario.cfg, p)
    gen = as_generator(rng)
    n = scenario.cfg.n
    signal = np.zeros(n, dtype=np.complex128)
    signal[int(p)] = np.sqrt(scenario.signal_power_mw) * n
    noise = np.zeros(n, dtype=np.complex128)
    if scenario.noise_enabled:
        draws = gen.standard_normal(size=(2, n))
        noise = np.sqrt(n * scenario.noise_power_mw / 2) * (draws[0] + 1j * draws[1])
    interference = np.zeros(n, dtype=np.complex128)
    if scenario.interferer is not None:
        interference = dechirp_dft(scenario.cfg, interference_segment(scenario, gen, waveform)).bins
    return {'signal': signal, 'noise': noise, 'interference': interference,
            'total': signal + noise + interference}


def build_trial_statistic(scenario, p, rng, waveform=None):
    """Decision statistic of one trial, hybrid construction.

    Y_s[p] = sqrt(P_s)*N (real), Y_n[k] ~ CN(0, N*P_n/2) per bin, Y_i from
    the dechirped DFT of an interference segment.

    Parameters
    ----------
    scenario : Scenario
    p : int
        transmitted symbol index
    rng : RngStream or numpy.random.Generator
    waveform : ComplexBaseband, optional
        unit-power interferer waveform to cut the segment from; generated
        from `rng` when not given

    Returns
    -------
    DecisionStatistic
    """
    return DecisionStatistic(decompose_trial(scenario, p, rng, waveform)['total'])


def build_trial_statistic_timedomain(scenario, p, rng, waveform=None):
    """Decision statistic of one trial, synthesized sample by sample then dechirped."""
    _check_symbol(scenario.cfg, p)
    gen = as_generator(rng)
    cfg = scenario.cfg
    received = make_symbol(cfg, p, np.sqrt(scenario.signal_power_mw)).samples
    if scenario.noise_enabled:
        received = received + gen_awgn(cfg.n, scenario.noise_power_mw, gen,
                                       sample_rate_hz=cfg.bandwidth_hz).samples
    if scenario.interferer is not None:
        received = received + interference_segment(scenario, gen, waveform).samples
    return dechirp_dft(cfg, ComplexBaseband(received, cfg.bandwidth_hz))


def _batch_errors(scenario, batch, builder):
    """Error count and trial count of one batch of trials."""
    start = batch * scenario.batch_size
    stop = min(start + scenario.batch_size, scenario.trials)
    waveform = batch_waveform(scenario, batch)
    errors = 0
    for t in range(start, stop):
        gen = trial_stream(scenario.seed, t).generator()
        p = int(gen.integers(0, scenario.cfg.n))
        errors += demodulate(builder(scenario, p, gen, waveform)) != p
    return errors, stop - start


def compute_kwargs(workers, scheduler='threads'):
    """Keyword arguments for `dask.compute` for a given worker count.

    None leaves the choice to dask (e.g. an active distributed Client).
    """
    if workers is None:
        return {}
    if workers <= 1:
        return {'scheduler': 'synchronous'}
    return {'scheduler': scheduler, 'num_workers': int(workers)}


def estimate_many(scenarios, workers=None, builder=build_trial_statistic):
    """`estimate_ser` of several scenarios in one parallel computation."""
    tasks = [[delayed(_batch_errors)(s, b, builder) for b in range(s.n_batches)] for s in scenarios]
    results = dask.compute(*tasks, **compute_kwargs(workers))
    return [SerEstimate(errors=int(sum(e for e, _ in res)), trials=int(sum(n for _, n in res)))
            for res in results]


def estimate_ser(scenario, workers=None, builder=build_trial_statistic):
    """Run the trials of `scenario` and count symbol errors.

    Each trial draws its symbol uniformly from 0..N-1. Deterministic for a
    fixed seed, whatever `workers` is.

    Returns
    -------
    SerEstimate
    """
    return estimate_many([scenario], workers=workers, builder=builder)[0]


def has_errors(scenario, workers=None, builder=build_trial_statistic):
    """Whether any of the trials of `scenario` is demodulated wrongly.

    Batches are evaluated in index order, `workers` at a time, stopping at
    the first group containing an error. The answer equals
    ``estimate_ser(scenario).errors > 0``.
    """
    group = max(1, workers or 1)
    for first in range(0, scenario.n_batches, group):
        batches = range(first, min(first + group, scenario.n_batches))
        tasks = [delayed(_batch_errors)(scenario, b, builder) for b in batches]
        results = dask.compute(*tasks, **compute_kwargs(workers))
        if any(errors for errors, _ in results):
            return True
    return False


def _check_grid(grid, name):
    grid = np.asarray(grid, dtype=np.float64).ravel()
    if grid.size == 0:
        raise DomainError(f"{name} grid must not be empty")
    if np.any(np.diff(grid) <= 0):
        raise DomainError(f"{name} grid must be strictly increasing")
    return grid


def _estimates_to_dataset(dim, grid, estimates, attrs):
    intervals = np.array([e.wilson_ci95 for e in estimates]).reshape(-1, 2)
    return xr.Dataset(
        {
            'errors': (dim, np.array([e.errors for e in estimates], dtype=np.int64)),
            'trials': (dim, np.array([e.trials for e in estimates], dtype=np.int64)),
            'ser': (dim, np.array([e.ser for e in estimates])),
            'ci_low': (dim, intervals[:, 0]),
            'ci_high': (dim, intervals[:, 1]),
        },
        coords={dim: grid},
        attrs=attrs,
    )


def rssi_threshold(rssi_grid_dbm, errors):
    """Lowest grid RSSI from which every point up the grid is error-free.

    Returns
    -------
    rt : float
        NaN when the highest grid point still has errors
    status : str
        'found', 'grid-limited' (already error-free at the lowest point)
        or 'not-found'
    """
    zero = np.asarray(errors) == 0
    if not zero[-1]:
        return np.nan, 'not-found'
    i = zero.size - 1
    while i > 0 and zero[i - 1]:
        i -= 1
    return float(rssi_grid_dbm[i]), 'grid-limited' if i == 0 else 'found'


def pole_db(rt_dbm, noise):
    """SNR of the vertical asymptote of the INR(SNR) threshold curve, R_T - N_0 - 1."""
    return rt_dbm - noise.noise_floor_dbm - 1


def sweep_ser_vs_rssi(cfg, noise, rssi_grid_dbm, trials=DEFAULT_TRIALS, seed=0, workers=None, **kwargs):
    """SER versus received signal strength without interference.

    The result also carries R_T, the lowest RSSI from which the SER stays
    zero up the grid, next to the datasheet sensitivity.

    Returns
    -------
    xarray.Dataset
        variables errors, trials, ser, ci_low, ci_high along `rssi_dbm`;
        attrs sf, seed, noise_floor_dbm, rssi_threshold_dbm, threshold_status,
        datasheet_sensitivity_dbm
    """
    grid = _check_grid(rssi_grid_dbm, 'RSSI')
    floor = noise.noise_floor_dbm
    scenarios = [Scenario(cfg, snr_db=rssi - floor, noise=noise, trials=trials, seed=seed, **kwargs)
                 for rssi in grid]
    estimates = estimate_many(scenarios, workers=workers)
    rt, status = rssi_threshold(grid, [e.errors for e in estimates])
    if status == 'not-found':
        logger.warning("SF%d: errors at every RSSI up to %.1f dBm, R_T not found; extend the grid upwards",
                       cfg.sf, grid[-1])
    elif status == 'grid-limited':
        logger.warning("SF%d: no errors at the lowest RSSI %.1f dBm, R_T is limited by the grid",
                       cfg.sf, grid[0])
    else:
        logger.info("SF%d: R_T = %.1f dBm", cfg.sf, rt)
    attrs = {'sf': cfg.sf, 'seed': seed, 'bandwidth_hz': cfg.bandwidth_hz,
             'noise_floor_dbm': floor, 'rssi_threshold_dbm': rt, 'threshold_status': status,
             'datasheet_sensitivity_dbm': DATASHEET_SENSITIVITY_DBM.get(cfg.sf, np.nan)}
    return _estimates_to_dataset('rssi_dbm', grid, estimates, attrs)


def sweep_ser_vs_inr(cfg, noise, snr_db, interferer_kind, inr_grid_db, trials=DEFAULT_TRIALS, seed=0,
                     workers=None, **kwargs):
    """SER versus INR at a fixed SNR for one interferer kind.

    Returns
    -------
    xarray.Dataset
        variables errors, trials, ser, ci_low, ci_high along `inr_db`;
        attrs sf, kind, snr_db, seed
    """
    grid = _check_grid(inr_grid_db, 'INR')
    kind = InterferenceKind(interferer_kind)
    scenarios = [Scenario(cfg, snr_db=snr_db, inr_db=inr, interferer=kind, noise=noise,
                          trials=trials, seed=seed, **kwargs)
                 for inr in grid]
    estimates = estimate_many(scenarios, workers=workers)
    attrs = {'sf': cfg.sf, 'kind': kind.value, 'snr_db': float(snr_db), 'seed': seed}
    return _estimates_to_dataset('inr_db', grid, estimates, attrs)


def find_max_inr(cfg, noise, snr_db, interferer_kind, start_inr_db=None, step_db=DEFAULT_STEP_DB,
                 trials=DEFAULT_TRIALS, seed=0, workers=None, start_offset_db=DEFAULT_START_OFFSET_DB, **kwargs):
    """Highest INR at which none of `trials` symbols is demodulated wrongly.

    Starts at `start_inr_db` (default SNR + `start_offset_db`, 40 dB), which must produce
    errors, and lowers the INR in steps of `step_db` until a level passes
    every trial.

    Raises
    ------
    ThresholdSearchError
        if the start level is already error-free, or nothing passes within
        80 dB below the start
    """
    if not step_db > 0:
        raise DomainError(f"step must be positive, got {step_db!r}")
    if start_inr_db is None:
        start_inr_db = snr_db + start_offset_db
    kind = InterferenceKind(interferer_kind)
    n_steps = int(np.floor(SCAN_SPAN_DB / step_db + 1e-9))
    inr = start_inr_db
    for i in range(n_steps + 1):
        inr = start_inr_db - i * step_db
        scenario = Scenario(cfg, snr_db=snr_db, inr_db=inr, interferer=kind, noise=noise,
                            trials=trials, seed=seed, **kwargs)
        failed = has_errors(scenario, workers=workers)
        logger.debug("SF%d %s SNR %.2f dB: INR %.2f dB %s", cfg.sf, kind, snr_db, inr,
                     'has errors' if failed else 'error-free')
        if i == 0 and not failed:
            raise ThresholdSearchError(f"no errors at the start INR {start_inr_db:.2f} dB; "
                                       f"raise start_inr_db", snr_db, inr)
        if not failed:
            return float(inr)
    raise ThresholdSearchError(f"still errors at INR {inr:.2f} dB, {SCAN_SPAN_DB:.0f} dB below the start",
                               snr_db, inr)


def _max_inr_or_nan(cfg, noise, snr_db, kind, kwargs):
    try:
        return find_max_inr(cfg, noise, snr_db, kind, workers=1, **kwargs)
    except ThresholdSearchError as err:
        logger.warning("SF%d %s SNR %.2f dB skipped: %s", cfg.sf, kind, snr_db, err)
        return np.nan


def threshold_curve(cfg, noise, interferer_kind, snr_grid_db, pole=None, workers=None, **kwargs):
    """Maximum zero-error INR over a grid of SNRs.

    SNR points are searched in parallel; points where the search fails are
    dropped with a warning.

    Returns
    -------
    xarray.DataArray
        `max_inr_db` along `snr_db`; attrs sf, kind, pole_db
    """
    grid = _check_grid(snr_grid_db, 'SNR')
    kind = InterferenceKind(interferer_kind)
    tasks = [delayed(_max_inr_or_nan)(cfg, noise, snr, kind, kwargs) for snr in grid]
    values = np.array(dask.compute(*tasks, **compute_kwargs(workers, scheduler='processes')), dtype=float)
    keep = ~np.isnan(values)
    return xr.DataArray(values[keep], dims=('snr_db',), coords={'snr_db': grid[keep]}, name='max_inr_db',
                        attrs={'sf': cfg.sf, 'kind': kind.value,
                               'pole_db': np.nan if pole is None else float(pole)})
