# ---
# jupyter:
#   jupytext:
#     formats: ipynb,py:light
#     text_representation:
#       extension: .py
#       format_name: light
#       format_version: '1.5'
#       jupytext_version: 1.5.0
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# # 5 - INR threshold fit
# For every spreading factor and interferer the highest INR at which no symbol is lost is searched over a grid of SNRs, starting 1 dB above the pole R_T - N_0 - 1. The resulting curves are fitted by INR = alpha*SNR + beta + gamma/(SNR - pole), linear with the pole fixed.
#
# This is by far the most expensive notebook; SF12 dominates the run time.

# +
import numpy as np
import pandas as pd
import xarray as xr
import matplotlib.pyplot as plt
from dask.distributed import Client, LocalCluster

from loranbi import *

plt.rcParams["figure.figsize"] = [12., 8.]
SAVEFIG = True
# -

cluster = LocalCluster(n_workers=8, threads_per_worker=1)
client = Client(cluster)
client

# +
trials = 10000
seed = 0
step_db = 0.5
noise = NoiseModel()
rssi_grid = np.arange(-142., -114., 1.)

# SNR offsets from the pole
offsets = np.arange(1., 36., 1.)
# -

poles = {}
for sf in SPREADING_FACTORS:
    ds = sweep_ser_vs_rssi(LoRaConfig(sf), noise, rssi_grid, trials=trials, seed=seed)
    poles[sf] = pole_db(ds.attrs['rssi_threshold_dbm'], noise)
poles

curves = {(sf, kind): threshold_curve(LoRaConfig(sf), noise, kind, poles[sf] + offsets, pole=poles[sf],
                                      trials=trials, seed=seed, step_db=step_db)
          for sf in SPREADING_FACTORS for kind in InterferenceKind}
fits = {key: fit_threshold_curve(curve) for key, curve in curves.items()}

table = pd.DataFrame(fit_table_rows(fits.values()))
table['published'] = [PUBLISHED_FIT_PARAMS[(row.sf, row.kind)] for row in table.itertuples()]
table

# +
fig, axs = plt.subplots(2, 3, figsize=[12, 7], constrained_layout=True, sharey=True)
for ax, sf in zip(axs.flat, SPREADING_FACTORS):
    for kind in InterferenceKind:
        curve, params = curves[(sf, kind)], fits[(sf, kind)]
        snr = np.linspace(poles[sf] + 0.5, poles[sf] + offsets[-1], 200)
        line, = ax.plot(curve.snr_db, curve, '.', label=str(kind))
        ax.plot(snr, eval_threshold_model(params, snr), color=line.get_color())
    ax.set_title(f'SF{sf}')
    ax.set_xlabel('SNR (dB)')
for ax in axs[:, 0]:
    ax.set_ylabel('max INR (dB)')
axs[0, 0].legend()
axs[0, 0].set_ylim(-20, None)
if SAVEFIG:
    plt.savefig('inr_threshold_fit.pdf')
# -

# At high SNR, treating the interferers as noise of the same power underestimates the tolerance by
for sf in SPREADING_FACTORS:
    awgn = fits[(sf, InterferenceKind.AWGN_CONTROL)]
    print(f"SF{sf}: BPSK {high_snr_gap(fits[(sf, InterferenceKind.BPSK)], awgn):.2f} dB, "
          f"GMSK {high_snr_gap(fits[(sf, InterferenceKind.GMSK)], awgn):.2f} dB")

xr.Dataset({f'{kind}_sf{sf}': curve.rename({'snr_db': f'snr_db_{kind}_sf{sf}'})
            for (sf, kind), curve in curves.items()}).to_netcdf('inr_threshold_curves.nc')
