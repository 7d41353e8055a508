"""Least-squares fit of the INR(SNR) threshold model.

    INR(SNR) = alpha * SNR + beta + gamma / (SNR - pole),   pole = R_T - N_0 - 1

With the pole fixed by the noise-only sweep the model is linear in
(alpha, beta, gamma), so the fit is an ordinary least-squares solve over
the basis {SNR, 1, 1/(SNR - pole)}.
"""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DomainError, FitError
from .waveforms import InterferenceKind

logger = logging.getLogger(__name__)

N_PARAMS = 3
MIN_POINTS = N_PARAMS + 1

# Published (alpha, beta, gamma) per (SF, kind), kept for comparison reports
PUBLISHED_FIT_PARAMS = {
    (7, 'bpsk'): (1.05, 9.06, -11.11), (7, 'gmsk'): (1.08, 11.36, -13.81), (7, 'awgn'): (1.03, 6.11, -7.68),
    (8, 'bpsk'): (1.12, 11.85, -10.86), (8, 'gmsk'): (1.08, 14.58, -12.95), (8, 'awgn'): (0.98, 9.46, -9.57),
    (9, 'bpsk'): (1.05, 15.80, -12.87), (9, 'gmsk'): (1.04, 18.19, -16.05), (9, 'awgn'): (0.99, 12.35, -13.10),
    (10, 'bpsk'): (1.03, 19.02, -16.41), (10, 'gmsk'): (1.05, 20.89, -13.68), (10, 'awgn'): (1.00, 15.18, -11.77),
    (11, 'bpsk'): (1.01, 22.61, -19.75), (11, 'gmsk'): (1.02, 24.49, -18.97), (11, 'awgn'): (0.96, 18.46, -18.49),
    (12, 'bpsk'): (1.02, 25.30, -13.56), (12, 'gmsk'): (1.04, 27.04, -10.84), (12, 'awgn'): (1.01, 20.60, -8.48),
}

FIT_TABLE_COLUMNS = ('sf', 'kind', 'alpha', 'beta', 'gamma', 'r_squared', 'pole_db')


def _check_above_pole(snr_db, pole_db):
    snr_db = np.asarray(snr_db, dtype=np.float64)
    if np.any(snr_db <= pole_db):
        raise DomainError(f"model is undefined at or below the pole {pole_db:.2f} dB, "
                          f"got SNR {snr_db.min():.2f} dB")
    return snr_db


@dataclass(frozen=True, eq=False)
class ThresholdCurve:
    """Maximum zero-error INR as a function of SNR for one (SF, kind).

    Parameters
    ----------
    sf : int
    kind : InterferenceKind
    snr_db : (M,) array
        strictly increasing SNRs, all above `pole_db`
    max_inr_db : (M,) array
    pole_db : float
        R_T - N_0 - 1 from the noise-only sweep
    """
    sf: int
    kind: InterferenceKind
    snr_db: np.ndarray
    max_inr_db: np.ndarray
    pole_db: float

    def __post_init__(self):
        object.__setattr__(self, 'kind', InterferenceKind(self.kind))
        snr = np.array(self.snr_db, dtype=np.float64).ravel()
        inr = np.array(self.max_inr_db, dtype=np.float64).ravel()
        if snr.shape != inr.shape:
            raise DomainError("snr_db and max_inr_db must have the same length")
        if snr.size < MIN_POINTS:
            raise DomainError(f"a threshold curve needs at least {MIN_POINTS} points, got {snr.size}")
        if not np.all(np.isfinite(snr)) or not np.all(np.isfinite(inr)):
            raise DomainError("threshold curve points must be finite")
        if np.any(np.diff(snr) < 0):
            raise DomainError("threshold curve points must be sorted by SNR")
        _check_above_pole(snr, self.pole_db)
        object.__setattr__(self, 'snr_db', snr)
        object.__setattr__(self, 'max_inr_db', inr)
        object.__setattr__(self, 'pole_db', float(self.pole_db))

    @property
    def points(self):
        return list(zip(self.snr_db.tolist(), self.max_inr_db.tolist()))

    def __len__(self):
        return self.snr_db.size

    @classmethod
    def from_dataarray(cls, curve):
        """Build from the `max_inr_db` DataArray returned by `channel.threshold_curve`."""
        curve = curve.sortby('snr_db')
        return cls(sf=int(curve.attrs['sf']), kind=curve.attrs['kind'],
                   snr_db=curve['snr_db'].values, max_inr_db=curve.values,
                   pole_db=float(curve.attrs['pole_db']))


@dataclass(frozen=True)
class FitParams:
    """Fitted model parameters.

    `r_squared` is None when the data have zero total variance, in which
    case the coefficient of determination is undefined.
    """
    alpha: float
    beta: float
    gamma: float
    pole_db: float
    r_squared: float = None
    sf: int = None
    kind: InterferenceKind = None

    @property
    def degenerate(self):
        return self.r_squared is None


def design_matrix(snr_db, pole_db):
    """Columns SNR, 1 and 1/(SNR - pole) of the linear model."""
    snr_db = _check_above_pole(snr_db, pole_db)
    return np.column_stack([snr_db, np.ones_like(snr_db), 1. / (snr_db - pole_db)])


def fit_threshold_model(curve):
    """Ordinary least-squares fit of the threshold model to `curve`.

    Parameters
    ----------
    curve : ThresholdCurve

    Returns
    -------
    FitParams

    Raises
    ------
    FitError
        when the design matrix is rank deficient, e.g. all SNRs equal
    """
    a = design_matrix(curve.snr_db, curve.pole_db)
    if np.linalg.matrix_rank(a) < N_PARAMS:
        raise FitError(f"SF{curve.sf} {curve.kind}: design matrix is rank deficient, "
                       "the SNR grid needs at least three distinct values")
    y = curve.max_inr_db
    coef, _, _, _ = scipy.linalg.lstsq(a, y)
    alpha, beta, gamma = (float(c) for c in coef)

    if np.all(y == y[0]):
        r_squared = None
        logger.warning("SF%d %s: constant threshold curve, R^2 is undefined", curve.sf, curve.kind)
    else:
        ss_res = float(np.sum((y - a @ coef)**2))
        ss_tot = float(np.sum((y - y.mean())**2))
        r_squared = 1. - ss_res / ss_tot
    if gamma > 0:
        logger.warning("SF%d %s: fitted gamma %.3g is positive, the pole term does not diverge downwards",
                       curve.sf, curve.kind, gamma)
    params = FitParams(alpha=alpha, beta=beta, gamma=gamma, pole_db=curve.pole_db,
                       r_squared=r_squared, sf=curve.sf, kind=curve.kind)
    logger.info("SF%d %s: alpha=%.3f beta=%.2f gamma=%.2f R^2=%s", curve.sf, curve.kind,
                alpha, beta, gamma, 'n/a' if r_squared is None else f"{r_squared:.4f}")
    return params


def fit_threshold_curve(curve):
    """`fit_threshold_model` for an xarray threshold curve."""
    return fit_threshold_model(ThresholdCurve.from_dataarray(curve))


def eval_threshold_model(params, snr_db):
    """alpha*snr + beta + gamma/(snr - pole); scalar in, scalar out."""
    snr = _check_above_pole(snr_db, params.pole_db)
    value = params.alpha * snr + params.beta + params.gamma / (snr - params.pole_db)
    return float(value) if value.ndim == 0 else value


def residuals(curve, params):
    """Measured minus modelled maximum INR at every point of `curve`."""
    return curve.max_inr_db - eval_threshold_model(params, curve.snr_db)


def high_snr_gap(params_a, params_b):
    """beta_a - beta_b, the difference in dB of the two linear asymptotes."""
    if params_a.sf != params_b.sf:
        raise DomainError(f"fits are for different spreading factors ({params_a.sf} and {params_b.sf})")
    if not np.isclose(params_a.pole_db, params_b.pole_db):
        raise DomainError(f"fits use different poles ({params_a.pole_db} and {params_b.pole_db} dB)")
    return params_a.beta - params_b.beta


def fit_table_rows(fits):
    """One Table-II row per fit, ordered by (sf, kind).

    Parameters
    ----------
    fits : iterable of FitParams

    Returns
    -------
    list of dict with keys `FIT_TABLE_COLUMNS`
    """
    order = {k: i for i, k in enumerate(InterferenceKind)}
    fits = sorted(fits, key=lambda f: (f.sf, order[InterferenceKind(f.kind)]))
    return [{'sf': f.sf, 'kind': InterferenceKind(f.kind).value, 'alpha': f.alpha, 'beta': f.beta,
             'gamma': f.gamma, 'r_squared': f.r_squared, 'pole_db': f.pole_db}
            for f in fits]
