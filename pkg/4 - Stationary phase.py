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

# # 4 - Stationary phase
# After dechirping, bin k of the interference term is dominated by the interferer sample at the stationary point n_k of the phase, so |Y_i[k]| ~ sqrt(N)|i[n_k]|. A constant envelope interferer therefore spreads evenly over all bins, while BPSK and noise leave peaks that compete with the LoRa symbol.

# +
import numpy as np
import dask
from dask.delayed import delayed
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
cfg = LoRaConfig(10)
low, high = freq_offset_range(cfg, 600.)
gen = RngStream(0).generator()
delta_f = gen.uniform(low, high)

segments = {kind: random_segment(gen_interferer(kind, cfg, gen, n_symbols=2), cfg.n, gen)
            for kind in InterferenceKind}

fig, axs = plt.subplots(len(segments), 1, figsize=[8, 7], constrained_layout=True, sharex=True)
for ax, (kind, segment) in zip(axs, segments.items()):
    err = approximation_error(cfg, segment, delta_f)
    ax.plot(err.exact, label='exact')
    ax.plot(err.approx, label='sqrt(N)|i[n_k]|', alpha=0.7)
    ax.set_title(f'{kind}, flatness {flatness(err.exact):.2f}, rms relative error {err.rms_rel:.3f}')
axs[-1].set_xlabel('bin k')
axs[0].legend()
if SAVEFIG:
    plt.savefig('stationary_phase_bins.pdf')


# -

def gmsk_error(sf, draw):
    cfg = LoRaConfig(sf)
    gen = RngStream(1, draw).generator()
    low, high = freq_offset_range(cfg, 600.)
    segment = random_segment(gen_interferer('gmsk', cfg, gen, n_symbols=2), cfg.n, gen)
    return approximation_error(cfg, segment, gen.uniform(low, high)).rms_rel


# The approximation improves with the spreading factor
draws = 100
errors = dask.compute({sf: [delayed(gmsk_error)(sf, d) for d in range(draws)] for sf in SPREADING_FACTORS})[0]
fig, ax = plt.subplots(figsize=[5, 3.5], constrained_layout=True)
ax.plot(SPREADING_FACTORS, [np.mean(errors[sf]) for sf in SPREADING_FACTORS], 'o-')
ax.set_xlabel('SF')
ax.set_ylabel('mean rms relative error, GMSK')
