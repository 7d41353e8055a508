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

# # 3 - Interferer envelopes
# The three interferers at equal power: a pulse-shaped BPSK signal whose envelope drops to zero on every bit flip, a GMSK signal of constant envelope and Gaussian noise with Rayleigh distributed amplitude. Their amplitude statistics explain the ordering seen in notebook 2.

# +
import numpy as np
import scipy.signal
import matplotlib.pyplot as plt

from loranbi import *

plt.rcParams["figure.figsize"] = [12., 8.]
SAVEFIG = True
# -

cfg = LoRaConfig(7)
occupied_bandwidth = 600.
waveforms = {kind: gen_interferer(kind, cfg, RngStream(0), n_symbols=400,
                                  occupied_bandwidth_hz=occupied_bandwidth)
             for kind in InterferenceKind}

# +
fig, axs = plt.subplots(len(waveforms), 1, figsize=[8, 6], constrained_layout=True, sharex=True)
t = np.arange(4 * cfg.n) / cfg.bandwidth_hz * 1e3
for ax, (kind, w) in zip(axs, waveforms.items()):
    ax.plot(t, np.abs(w.samples[:t.size]), label='|i[n]|')
    ax.plot(t, w.samples[:t.size].real, alpha=0.5, label='Re i[n]')
    ax.axhline(np.sqrt(w.mean_power_mw), color='k', linestyle=':', label='RMS')
    ax.set_title(str(kind))
axs[-1].set_xlabel('time (ms)')
axs[0].legend()
if SAVEFIG:
    plt.savefig('envelopes.pdf')
# -

for kind, w in waveforms.items():
    stats = envelope_statistics(w)
    print(f"{kind}: mean amplitude {stats.mean_amplitude:.3f}, peak/RMS {stats.peak_to_rms:.3f}, "
          f"P(|i| > 1.5 RMS) = {stats.probability_above(1.5):.3g}")
print(f"Rayleigh mean amplitude sqrt(pi/4) = {np.sqrt(np.pi / 4):.3f}")

# Spectra, all three confined to the occupied bandwidth apart from the noise
fig, ax = plt.subplots(figsize=[6, 4], constrained_layout=True)
for kind, w in waveforms.items():
    f, pxx = scipy.signal.periodogram(w.samples, fs=w.sample_rate_hz, window='hann', return_onesided=False)
    order = np.argsort(f)
    ax.semilogy(f[order], pxx[order], label=str(kind))
    print(f"{kind}: {occupied_fraction(w, occupied_bandwidth):.4f} of the power within +-{occupied_bandwidth} Hz")
ax.set_xlim(-3 * occupied_bandwidth, 3 * occupied_bandwidth)
ax.set_xlabel('frequency (Hz)')
ax.legend()
