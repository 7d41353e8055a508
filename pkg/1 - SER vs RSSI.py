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

# # 1 - SER vs RSSI
# Symbol error rate of LoRa in thermal noise only, for every spreading factor. The lowest RSSI from which no symbol of the trial budget is lost, R_T, is compared against the datasheet sensitivity. R_T also fixes the pole of the INR threshold model used in notebook 5.

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
# A bunch of constants
trials = 10000
seed = 0
rssi_grid = np.arange(-142., -114., 1.)

noise = NoiseModel()
noise.noise_floor_dbm
# -

sweeps = {sf: sweep_ser_vs_rssi(LoRaConfig(sf), noise, rssi_grid, trials=trials, seed=seed)
          for sf in SPREADING_FACTORS}
ser = xr.concat([ds['ser'] for ds in sweeps.values()], dim=xr.DataArray(list(sweeps), dims='sf', name='sf'))
ser

# +
fig, ax = plt.subplots(figsize=[6, 4], constrained_layout=True)
for sf, ds in sweeps.items():
    ax.semilogy(ds.rssi_dbm, ds.ser.where(ds.ser > 0), '.-', label=f'SF{sf}')
ax.set_xlabel('RSSI (dBm)')
ax.set_ylabel('SER')
ax.legend()
if SAVEFIG:
    plt.savefig('ser_vs_rssi.pdf')
# -

# R_T against the datasheet sensitivity
for sf, ds in sweeps.items():
    print(f"SF{sf}: R_T = {ds.attrs['rssi_threshold_dbm']:.0f} dBm ({ds.attrs['threshold_status']}), "
          f"datasheet {ds.attrs['datasheet_sensitivity_dbm']} dBm, "
          f"pole at SNR {pole_db(ds.attrs['rssi_threshold_dbm'], noise):.2f} dB")

# The sweeps are stored for later use in notebook 5
xr.Dataset({f'ser_sf{sf}': ds.ser for sf, ds in sweeps.items()}).to_netcdf('ser_vs_rssi.nc')
