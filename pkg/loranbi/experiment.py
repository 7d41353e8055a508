"""Experiment configuration, result records and the experiment runner.

A configuration is a flat key-value document in TOML syntax::

    experiment = "ser_vs_rssi"
    sf = [7, 8]
    rssi_start = -130
    rssi_stop = -118
    rssi_step = 1
    trials = 10000
    seed = 0
    output = "ser_vs_rssi_sf7.csv"

Every run writes one tidy long-format table (CSV or JSON) in which each row
carries the experiment name, the scenario, the result, the seed and the
toolkit version.
"""
import csv
import dataclasses
import difflib
import io
import json
import logging
import math
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from ._version import __version__
from .channel import (DEFAULT_BATCH_SIZE, DEFAULT_START_OFFSET_DB, DEFAULT_STEP_DB,
                      DEFAULT_TRIALS, NoiseModel, batch_waveform_stream, pole_db, sweep_ser_vs_inr,
                      sweep_ser_vs_rssi, threshold_curve)
from .css import SPREADING_FACTORS, LoRaConfig
from .errors import ConfigError, FitError
from .fitting import FIT_TABLE_COLUMNS, PUBLISHED_FIT_PARAMS, fit_table_rows, fit_threshold_curve
from .stationary_phase import approximation_error, flatness, mapped_sample_indices
from .waveforms import (DEFAULT_BT_PRODUCT, DEFAULT_OCCUPIED_BANDWIDTH_HZ, InterferenceKind, RngStream,
                        envelope_statistics, freq_offset_range, gen_interferer, random_segment)

logger = logging.getLogger(__name__)

EXPERIMENTS = ('ser_vs_rssi', 'ser_vs_inr', 'inr_threshold', 'fit_table', 'validate_spa', 'spa_bins',
               'waveform_dump')
FORMATS = ('csv', 'json')
SCHEMA_VERSION = 1
# Interferer bits covered by each dumped waveform
WAVEFORM_DUMP_BITS = 16

_META = ('experiment', 'schema_version', 'toolkit_version', 'seed')
COLUMNS = {
    'ser_vs_rssi': _META + ('sf', 'trials', 'rssi_dbm', 'snr_db', 'errors', 'ser', 'ci_low', 'ci_high',
                            'rssi_threshold_dbm', 'threshold_status', 'datasheet_sensitivity_dbm'),
    'ser_vs_inr': _META + ('sf', 'kind', 'trials', 'snr_db', 'inr_db', 'errors', 'ser', 'ci_low', 'ci_high'),
    'inr_threshold': _META + ('sf', 'kind', 'trials', 'step_db', 'snr_db', 'max_inr_db'),
    'fit_table': _META + FIT_TABLE_COLUMNS,
    'validate_spa': _META + ('sf', 'kind', 'draw', 'delta_f_hz', 'rms_rel_error', 'max_rel_error',
                             'flatness_exact', 'flatness_approx'),
    'spa_bins': _META + ('sf', 'kind', 'draw', 'delta_f_hz', 'k', 'n_k', 'mapped_index', 'exact_mag',
                         'approx_mag'),
    'waveform_dump': _META + ('sf', 'kind', 'index', 'real', 'imag'),
}

_DB = '.2f'
_PROBABILITY = '.3e'
_COLUMN_FORMATS = {
    'rssi_dbm': _DB, 'snr_db': _DB, 'inr_db': _DB, 'max_inr_db': _DB, 'pole_db': _DB, 'step_db': _DB,
    'rssi_threshold_dbm': _DB, 'datasheet_sensitivity_dbm': _DB, 'beta': _DB, 'gamma': _DB,
    'ser': _PROBABILITY, 'ci_low': _PROBABILITY, 'ci_high': _PROBABILITY,
    'rms_rel_error': '.4e', 'max_rel_error': '.4e',
    'alpha': '.4f', 'r_squared': '.6f', 'flatness_exact': '.4f', 'flatness_approx': '.4f',
    'delta_f_hz': '.2f', 'real': '.9e', 'imag': '.9e',
    'n_k': '.4f', 'exact_mag': '.6e', 'approx_mag': '.6e',
}


@dataclass(frozen=True)
class Grid:
    """Inclusive grid start, start + step, ..., up to stop."""
    start: float
    stop: float
    step: float

    def values(self):
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return np.round(self.start + self.step * np.arange(n), 9)


def _grid_keys(prefix):
    return tuple(f'{prefix}_{part}' for part in ('start', 'stop', 'step'))


_DEFAULT_GRIDS = {'rssi': Grid(-140., -110., 1.), 'snr': Grid(-10., 10., 5.), 'inr': Grid(0., 30., 1.)}

KEYS = (('experiment', 'sf', 'kinds')
        + sum((_grid_keys(p) for p in _DEFAULT_GRIDS), ())
        + ('trials', 'seed', 'output', 'format', 'bandwidth_hz', 'temperature_k', 'noise_figure_db',
           'occupied_bandwidth_hz', 'bt_product', 'step_db', 'start_inr_offset_db',
           'fit_snr_start_offset_db', 'fit_snr_stop_offset_db', 'fit_snr_step_db', 'draws', 'batch_size'))


def _is_int(value):
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


def _is_number(value):
    return isinstance(value, (int, float, np.integer, np.floating)) and not isinstance(value, bool)


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment configuration; see the module docstring for the document format."""
    experiment: str
    sf: tuple = SPREADING_FACTORS
    kinds: tuple = tuple(InterferenceKind)
    rssi: Grid = _DEFAULT_GRIDS['rssi']
    snr: Grid = _DEFAULT_GRIDS['snr']
    inr: Grid = _DEFAULT_GRIDS['inr']
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    output: str = None
    format: str = 'csv'
    bandwidth_hz: float = 125e3
    temperature_k: float = 290.
    noise_figure_db: float = 6.
    occupied_bandwidth_hz: float = DEFAULT_OCCUPIED_BANDWIDTH_HZ
    bt_product: float = DEFAULT_BT_PRODUCT
    step_db: float = DEFAULT_STEP_DB
    start_inr_offset_db: float = DEFAULT_START_OFFSET_DB
    fit_snr_start_offset_db: float = 1.
    fit_snr_stop_offset_db: float = 35.
    fit_snr_step_db: float = 1.
    draws: int = 100
    batch_size: int = DEFAULT_BATCH_SIZE

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}, expected one of {', '.join(EXPERIMENTS)}",
                              key='experiment')
        sfs = (self.sf,) if _is_int(self.sf) else tuple(self.sf)
        if not sfs or not all(_is_int(s) and s in SPREADING_FACTORS for s in sfs):
            raise ConfigError(f"spreading factors must be a non-empty list from {list(SPREADING_FACTORS)}",
                              key='sf')
        object.__setattr__(self, 'sf', tuple(int(s) for s in sfs))

        kinds = (self.kinds,) if isinstance(self.kinds, str) else tuple(self.kinds)
        try:
            kinds = tuple(InterferenceKind(k) for k in kinds)
        except ValueError:
            raise ConfigError(f"interferer kinds must be taken from "
                              f"{[k.value for k in InterferenceKind]}, got {list(kinds)}", key='kinds') from None
        if not kinds:
            raise ConfigError("at least one interferer kind is needed", key='kinds')
        object.__setattr__(self, 'kinds', kinds)

        for prefix in _DEFAULT_GRIDS:
            grid = getattr(self, prefix)
            start_key, stop_key, step_key = _grid_keys(prefix)
            for key, value in zip((start_key, stop_key, step_key), (grid.start, grid.stop, grid.step)):
                if not _is_number(value) or not math.isfinite(value):
                    raise ConfigError(f"must be a finite number, got {value!r}", key=key)
            if not grid.step > 0:
                raise ConfigError(f"grid step must be positive, got {grid.step!r}", key=step_key)
            if grid.stop < grid.start:
                raise ConfigError(f"grid stop {grid.stop} lies below its start {grid.start}", key=stop_key)
            object.__setattr__(self, prefix, Grid(float(grid.start), float(grid.stop), float(grid.step)))

        for key, low in (('trials', 1), ('draws', 1), ('batch_size', 1), ('seed', 0)):
            value = getattr(self, key)
            if not _is_int(value) or value < low:
                raise ConfigError(f"must be an integer >= {low}, got {value!r}", key=key)
            object.__setattr__(self, key, int(value))
        if self.seed >= 1 << 64:
            raise ConfigError("must fit in an unsigned 64-bit integer", key='seed')

        if self.format not in FORMATS:
            raise ConfigError(f"must be one of {', '.join(FORMATS)}, got {self.format!r}", key='format')
        if self.output is not None and (not isinstance(self.output, str) or not self.output):
            raise ConfigError("must be a non-empty path", key='output')

        positive = ('bandwidth_hz', 'temperature_k', 'occupied_bandwidth_hz', 'bt_product', 'step_db',
                    'fit_snr_start_offset_db', 'fit_snr_step_db')
        for key in positive + ('noise_figure_db', 'start_inr_offset_db', 'fit_snr_stop_offset_db'):
            value = getattr(self, key)
            if not _is_number(value) or not math.isfinite(value):
                raise ConfigError(f"must be a finite number, got {value!r}", key=key)
            if key in positive and not value > 0:
                raise ConfigError(f"must be positive, got {value!r}", key=key)
            object.__setattr__(self, key, float(value))
        if self.bt_product > 1:
            raise ConfigError(f"must be in (0, 1], got {self.bt_product!r}", key='bt_product')
        if self.occupied_bandwidth_hz >= self.bandwidth_hz:
            raise ConfigError("interferer must be narrower than the LoRa bandwidth", key='occupied_bandwidth_hz')
        if self.fit_snr_stop_offset_db < self.fit_snr_start_offset_db:
            raise ConfigError("fit SNR range is empty", key='fit_snr_stop_offset_db')

    @property
    def noise(self):
        return NoiseModel(bandwidth_hz=self.bandwidth_hz, temperature_k=self.temperature_k,
                          noise_figure_db=self.noise_figure_db)

    @property
    def output_path(self):
        return Path(self.output if self.output is not None else f'{self.experiment}.{self.format}')

    def lora(self, sf):
        return LoRaConfig(sf, self.bandwidth_hz)

    def scenario_kwargs(self):
        """Keyword arguments shared by every Monte Carlo scenario of this run."""
        return {'trials': self.trials, 'seed': self.seed, 'occupied_bandwidth_hz': self.occupied_bandwidth_hz,
                'bt_product': self.bt_product, 'batch_size': self.batch_size}

    def fit_snr_grid(self, pole):
        """SNRs of the threshold curves to fit, offset from the pole."""
        offsets = Grid(self.fit_snr_start_offset_db, self.fit_snr_stop_offset_db, self.fit_snr_step_db)
        return np.round(pole + offsets.values(), 9)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


_KEY_LINE = re.compile(r'^\s*([A-Za-z0-9_-]+)\s*=')
_TOML_LINE = re.compile(r'line (\d+)')


def _key_lines(text):
    lines = {}
    for number, line in enumerate(text.splitlines(), start=1):
        match = _KEY_LINE.match(line)
        if match:
            lines.setdefault(match.group(1), number)
    return lines


def parse_config(text):
    """Parse a configuration document.

    Parameters
    ----------
    text : str

    Returns
    -------
    ExperimentConfig

    Raises
    ------
    ConfigError
        naming the offending key and its line
    """
    try:
        document = tomllib.loads(text)
    except tomllib.TOMLDecodeError as err:
        match = _TOML_LINE.search(str(err))
        raise ConfigError(f"malformed document: {err}", line=int(match.group(1)) if match else None) from None
    lines = _key_lines(text)

    for key, value in document.items():
        if key not in KEYS:
            close = difflib.get_close_matches(key, KEYS, n=1)
            hint = f", did you mean '{close[0]}'?" if close else ""
            raise ConfigError(f"unknown key{hint}", key=key, line=lines.get(key))
        if isinstance(value, dict):
            raise ConfigError("tables are not allowed, the document is flat", key=key, line=lines.get(key))
    if 'experiment' not in document:
        raise ConfigError("missing required key", key='experiment')

    kwargs = {key: value for key, value in document.items() if key in {f.name for f in dataclasses.fields(
        ExperimentConfig)}}
    for prefix, default in _DEFAULT_GRIDS.items():
        start, stop, step = (document.get(k, getattr(default, part)) for k, part in
                             zip(_grid_keys(prefix), ('start', 'stop', 'step')))
        kwargs[prefix] = Grid(start, stop, step)
    try:
        return ExperimentConfig(**kwargs)
    except ConfigError as err:
        if err.line is None and err.key is not None:
            raise ConfigError(err.message, key=err.key, line=lines.get(err.key)) from None
        raise


def load_config(path):
    """`parse_config` of a file."""
    with open(path, 'r', encoding='utf-8') as fh:
        return parse_config(fh.read())


def _render_value(value):
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, (tuple, list)):
        return '[' + ', '.join(_render_value(v) for v in value) + ']'
    return repr(value)


def render_config(config):
    """Configuration document that parses back to `config`."""
    lines = []
    for key in KEYS:
        prefix, _, part = key.rpartition('_')
        if prefix in _DEFAULT_GRIDS and part in ('start', 'stop', 'step'):
            value = getattr(getattr(config, prefix), part)
        else:
            value = getattr(config, key)
        if value is None:
            continue
        if key == 'kinds':
            value = [k.value for k in value]
        lines.append(f'{key} = {_render_value(value)}')
    return '\n'.join(lines) + '\n'


def check_writable(path):
    """Raise an OSError unless `path` can be created or overwritten."""
    path = Path(path)
    parent = path.parent if str(path.parent) else Path('.')
    if not parent.is_dir():
        raise FileNotFoundError(f"output directory {parent} does not exist")
    if path.is_dir():
        raise IsADirectoryError(f"output path {path} is a directory")
    target = path if path.exists() else parent
    if not os.access(target, os.W_OK):
        raise PermissionError(f"output path {path} is not writable")


def _format_value(column, value):
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ''
    fmt = _COLUMN_FORMATS.get(column)
    if fmt is not None:
        return format(float(value), fmt)
    return str(value)


def _json_value(column, value):
    text = _format_value(column, value)
    if text == '':
        return None
    if column in _COLUMN_FORMATS:
        return float(text)
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return int(value)
    return text


def render_csv(experiment, rows):
    """Rows as CSV text: header, comma separated, LF line endings."""
    columns = COLUMNS[experiment]
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_format_value(c, row.get(c)) for c in columns])
    return buffer.getvalue()


def render_json(experiment, rows):
    columns = COLUMNS[experiment]
    document = {'experiment': experiment, 'schema_version': SCHEMA_VERSION, 'columns': list(columns),
                'rows': [{c: _json_value(c, row.get(c)) for c in columns} for row in rows]}
    return json.dumps(document, indent=1) + '\n'


def write_records(path, experiment, rows, output_format='csv'):
    """Write result rows to `path` as UTF-8 CSV or JSON."""
    text = render_csv(experiment, rows) if output_format == 'csv' else render_json(experiment, rows)
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        fh.write(text)


def _record(config, **fields):
    return {'experiment': config.experiment, 'schema_version': SCHEMA_VERSION,
            'toolkit_version': __version__, 'seed': config.seed, **fields}


def _dataset_rows(config, ds, extra):
    dim = next(iter(ds.dims))
    rows = []
    for i, x in enumerate(ds[dim].values):
        rows.append(_record(config, **extra(float(x)), trials=int(ds['trials'][i]), errors=int(ds['errors'][i]),
                            ser=float(ds['ser'][i]), ci_low=float(ds['ci_low'][i]), ci_high=float(ds['ci_high'][i])))
    return rows


def _run_ser_vs_rssi(config, workers):
    noise = config.noise
    rows, summary = [], []
    for sf in config.sf:
        ds = sweep_ser_vs_rssi(config.lora(sf), noise, config.rssi.values(), workers=workers,
                               **config.scenario_kwargs())
        attrs = ds.attrs
        rows += _dataset_rows(config, ds, lambda rssi: {
            'sf': sf, 'rssi_dbm': rssi, 'snr_db': rssi - noise.noise_floor_dbm,
            'rssi_threshold_dbm': attrs['rssi_threshold_dbm'], 'threshold_status': attrs['threshold_status'],
            'datasheet_sensitivity_dbm': attrs['datasheet_sensitivity_dbm']})
        summary.append({'sf': sf, 'R_T [dBm]': attrs['rssi_threshold_dbm'], 'status': attrs['threshold_status'],
                        'datasheet [dBm]': attrs['datasheet_sensitivity_dbm']})
    return rows, pd.DataFrame(summary)


def _run_ser_vs_inr(config, workers):
    rows, summary = [], []
    for sf in config.sf:
        for kind in config.kinds:
            for snr in config.snr.values():
                ds = sweep_ser_vs_inr(config.lora(sf), config.noise, float(snr), kind, config.inr.values(),
                                      workers=workers, **config.scenario_kwargs())
                rows += _dataset_rows(config, ds, lambda inr: {'sf': sf, 'kind': kind.value,
                                                               'snr_db': float(snr), 'inr_db': inr})
                clean = ds['inr_db'].values[ds['errors'].values == 0]
                summary.append({'sf': sf, 'kind': kind.value, 'SNR [dB]': float(snr),
                                'highest error-free INR [dB]': clean.max() if clean.size else np.nan})
    return rows, pd.DataFrame(summary)


def _threshold_kwargs(config):
    return {'step_db': config.step_db, 'start_offset_db': config.start_inr_offset_db, **config.scenario_kwargs()}


def _run_inr_threshold(config, workers):
    rows = []
    for sf in config.sf:
        for kind in config.kinds:
            curve = threshold_curve(config.lora(sf), config.noise, kind, config.snr.values(), workers=workers,
                                    **_threshold_kwargs(config))
            for snr, inr in zip(curve['snr_db'].values, curve.values):
                rows.append(_record(config, sf=sf, kind=kind.value, trials=config.trials, step_db=config.step_db,
                                    snr_db=float(snr), max_inr_db=float(inr)))
    summary = pd.DataFrame([{'sf': r['sf'], 'kind': r['kind'], 'SNR [dB]': r['snr_db'],
                             'max INR [dB]': r['max_inr_db']} for r in rows])
    return rows, summary


def _run_fit_table(config, workers):
    noise = config.noise
    fits = []
    for sf in config.sf:
        cfg = config.lora(sf)
        ds = sweep_ser_vs_rssi(cfg, noise, config.rssi.values(), workers=workers, **config.scenario_kwargs())
        rt = ds.attrs['rssi_threshold_dbm']
        if ds.attrs['threshold_status'] == 'not-found':
            raise FitError(f"SF{sf}: no error-free RSSI in the grid, cannot place the pole; raise rssi_stop")
        pole = pole_db(rt, noise)
        logger.info("SF%d: R_T = %.1f dBm, pole at SNR %.2f dB", sf, rt, pole)
        for kind in config.kinds:
            curve = threshold_curve(cfg, noise, kind, config.fit_snr_grid(pole), pole=pole, workers=workers,
                                    **_threshold_kwargs(config))
            fits.append(fit_threshold_curve(curve))
    rows = [_record(config, **row) for row in fit_table_rows(fits)]
    summary = pd.DataFrame(rows)[['sf', 'kind', 'alpha', 'beta', 'gamma', 'r_squared']]
    published = [PUBLISHED_FIT_PARAMS.get((r['sf'], r['kind']), (np.nan,) * 3) for r in rows]
    summary['published alpha'], summary['published beta'], summary['published gamma'] = zip(*published)
    return rows, summary


def _spa_draws(config):
    """Yield (sf, kind, draw, delta_f, ApproximationError) for every configured segment draw."""
    for sf in config.sf:
        cfg = config.lora(sf)
        low, high = freq_offset_range(cfg, config.occupied_bandwidth_hz)
        for kind in config.kinds:
            for draw in range(config.draws):
                gen = RngStream(config.seed, draw).generator()
                waveform = gen_interferer(kind, cfg, gen, n_symbols=2,
                                          occupied_bandwidth_hz=config.occupied_bandwidth_hz,
                                          bt_product=config.bt_product)
                delta_f = float(gen.uniform(low, high))
                yield sf, kind, draw, delta_f, approximation_error(cfg, random_segment(waveform, cfg.n, gen), delta_f)


def _run_validate_spa(config, workers):
    rows = [_record(config, sf=sf, kind=kind.value, draw=draw, delta_f_hz=delta_f, rms_rel_error=err.rms_rel,
                    max_rel_error=err.max_rel, flatness_exact=flatness(err.exact),
                    flatness_approx=flatness(err.approx))
            for sf, kind, draw, delta_f, err in _spa_draws(config)]
    summary = (pd.DataFrame(rows).groupby(['sf', 'kind'], sort=False)
               [['rms_rel_error', 'max_rel_error', 'flatness_exact', 'flatness_approx']].mean().reset_index())
    return rows, summary


def _run_spa_bins(config, workers):
    rows, summary = [], []
    for sf, kind, draw, delta_f, err in _spa_draws(config):
        mapped = mapped_sample_indices(config.lora(sf), delta_f)
        rows += [_record(config, sf=sf, kind=kind.value, draw=draw, delta_f_hz=delta_f, k=k, n_k=float(err.n_k[k]),
                         mapped_index=int(mapped[k]), exact_mag=float(err.exact[k]),
                         approx_mag=float(err.approx[k]))
                 for k in range(len(err.exact))]
        summary.append({'sf': sf, 'kind': kind.value, 'draw': draw, 'rms rel. error': err.rms_rel})
    summary = pd.DataFrame(summary).groupby(['sf', 'kind'], sort=False)[['rms rel. error']].mean().reset_index()
    return rows, summary


def _run_waveform_dump(config, workers):
    rows, summary = [], []
    for sf in config.sf:
        cfg = config.lora(sf)
        bits_per_symbol = config.occupied_bandwidth_hz * cfg.symbol_duration_s
        n_symbols = max(1, math.ceil(WAVEFORM_DUMP_BITS / bits_per_symbol))
        for kind in config.kinds:
            w = gen_interferer(kind, cfg, batch_waveform_stream(config.seed, 0), n_symbols=n_symbols,
                               occupied_bandwidth_hz=config.occupied_bandwidth_hz, bt_product=config.bt_product)
            rows += [_record(config, sf=sf, kind=kind.value, index=i, real=float(s.real), imag=float(s.imag))
                     for i, s in enumerate(w.samples)]
            stats = envelope_statistics(w)
            summary.append({'sf': sf, 'kind': kind.value, 'samples': len(w), 'peak/RMS': stats.peak_to_rms,
                            **{f'P(|w| > {level} RMS)': p for level, p in stats.exceedance.items()}})
    return rows, pd.DataFrame(summary)


_RUNNERS = {
    'ser_vs_rssi': _run_ser_vs_rssi,
    'ser_vs_inr': _run_ser_vs_inr,
    'inr_threshold': _run_inr_threshold,
    'fit_table': _run_fit_table,
    'validate_spa': _run_validate_spa,
    'spa_bins': _run_spa_bins,
    'waveform_dump': _run_waveform_dump,
}


@dataclass
class ExperimentResult:
    path: Path
    rows: list = field(repr=False)
    summary: pd.DataFrame = field(repr=False)


def run_experiment(config, workers=None, print_summary=True):
    """Run the experiment described by `config` and write its result table.

    The output path is checked before anything is computed. `workers`
    changes the speed only; the written bytes depend on `config` alone.

    Returns
    -------
    ExperimentResult
    """
    path = config.output_path
    check_writable(path)
    logger.info("running %s for SF %s, seed %d", config.experiment, list(config.sf), config.seed)
    rows, summary = _RUNNERS[config.experiment](config, workers)
    write_records(path, config.experiment, rows, config.format)
    logger.info("wrote %d rows to %s", len(rows), path)
    if print_summary:
        print(summary.to_string(index=False, float_format=lambda v: f'{v:.4g}'))
    return ExperimentResult(path=path, rows=rows, summary=summary)
