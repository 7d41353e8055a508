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

# # 2 - SER vs INR
# Symbol error rate as a function of the interference-to-noise ratio for a pulse-shaped BPSK interferer, a GMSK interferer and, as a control, white Gaussian noise of the same power. The constant envelope of GMSK should make it the least harmful, Gaussian noise the most.

# +
import numpy as np
import xarray as xr
import matplotlib.pyplot as plt
from dask.distributed import Client, LocalCluster

from loranbi import *

plt.rcParams["figure.figsize"] = [12., 8.]
SAVEFIG = True
# -

cluster = LocalCluster(n_workers=1, threads_per_worker=8)
client = Client(cluster)
client

# +
trials = 10000
seed = 0
noise = NoiseModel()

# SNRs per spreading factor, all above the pole
snrs = {7: [-5., 0., 5.], 12: [-15., -10., -5.]}
inr_grid = np.arange(-10., 31., 1.)
# -

curves = {(sf, kind, snr): sweep_ser_vs_inr(LoRaConfig(sf), noise, snr, kind, inr_grid, trials=trials, seed=seed)
          for sf in snrs for snr in snrs[sf] for kind in InterferenceKind}

# +
colors = {InterferenceKind.BPSK: 'C0', InterferenceKind.GMSK: 'C1', InterferenceKind.AWGN_CONTROL: 'C2'}
styles = ['-', '--', ':']
fig, axs = plt.subplots(1, len(snrs), figsize=[10, 4], constrained_layout=True, sharey=True)
for ax, sf in zip(axs, snrs):
    for style, snr in zip(styles, snrs[sf]):
        for kind in InterferenceKind:
            ds = curves[(sf, kind, snr)]
            ax.semilogy(ds.inr_db, ds.ser.where(ds.ser > 0), style, color=colors[kind],
                        label=f'{kind}, SNR {snr:.0f} dB')
    ax.set_title(f'SF{sf}')
    ax.set_xlabel('INR (dB)')
axs[0].set_ylabel('SER')
axs[-1].legend(fontsize='small')
if SAVEFIG:
    plt.savefig('ser_vs_inr.pdf')
# -

# In the transition region the ordering AWGN > BPSK > GMSK holds with separated confidence intervals
for (sf, kind, snr), ds in curves.items():
    if kind is InterferenceKind.AWGN_CONTROL:
        continue
    awgn = curves[(sf, InterferenceKind.AWGN_CONTROL, snr)]
    separated = (ds.ci_high < awgn.ci_low) & (awgn.ser > 0)
    print(f"SF{sf} SNR {snr:.0f} dB {kind}: below AWGN at {int(separated.sum())} INR points")

xr.Dataset({f'ser_{kind.value}_sf{sf}_snr{int(snr)}'.replace('-', 'm'): ds.ser
            for (sf, kind, snr), ds in curves.items()}).to_netcdf('ser_vs_inr.nc')
