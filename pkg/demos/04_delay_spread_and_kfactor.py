"""
RMS delay spread along the corridor and the moment-method K estimator
=====================================================================
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import chansounder as cs

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

# ---------------------------------------------------------------------------
# Delay spread vs position.  The corridor has a reflecting end wall, so the
# two-path geometry alone fixes the delay structure: as the receiver walks
# toward the wall the reflection converges on the direct path and the RMS
# delay spread collapses.
rx_positions = np.arange(1.0, 41.0, 0.8)
ds_ns, excess_ns = [], []
for rx in rx_positions:
    geom = cs.CorridorGeometry(tx_pos_m=0.0, rx_pos_m=float(rx),
                               tx_height_m=1.5, rx_height_m=1.5)
    ts = cs.corridor_taps(geom, 2.4, 1.8)
    mpcs = cs.MpcList(
        delays_s=[t.delay_s for t in ts.taps],
        powers_db=[t.mean_power_db for t in ts.taps],
        threshold_db=-200.0,
    )
    r = cs.delay_spread(mpcs)
    ds_ns.append(r.rms_ds_s * 1e9)
    excess_ns.append((ts.taps[-1].delay_s - ts.taps[0].delay_s) * 1e9)

print("first position: DS %.2f ns, reflection excess %.1f ns" % (ds_ns[0], excess_ns[0]))
print("last  position: DS %.2f ns, reflection excess %.1f ns" % (ds_ns[-1], excess_ns[-1]))

# ---------------------------------------------------------------------------
# K-factor.  Generate Rician spectra with known K, run the moment estimator,
# and compare.  512 samples per spectrum, 100 trials per K.
I = 512
k_true_db = np.arange(0, 21, 2)
means, stds = [], []
for k_db in k_true_db:
    k = 10 ** (k_db / 10)
    est = []
    for trial in range(100):
        rng = np.random.default_rng([5, int(k_db), trial])
        s = np.sqrt(k / (k + 1))
        sig = np.sqrt(1 / (2 * (k + 1)))
        h = s + sig * (rng.standard_normal(I) + 1j * rng.standard_normal(I))
        est.append(cs.estimate_kf(h).k_db)
    means.append(np.mean(est))
    stds.append(np.std(est))
means, stds = np.asarray(means), np.asarray(stds)
print("K sweep worst |bias|: %.3f dB" % np.max(np.abs(means - k_true_db)))

# distribution of the estimate at K = 10 dB
rng = np.random.default_rng(99)
k = 10.0
s, sig = np.sqrt(k / (k + 1)), np.sqrt(1 / (2 * (k + 1)))
ests = []
for _ in range(400):
    h = s + sig * (rng.standard_normal(I) + 1j * rng.standard_normal(I))
    ests.append(cs.estimate_kf(h).k_db)
nf = cs.fit_normal(ests)
print("K=10 dB ensemble: normal fit mu=%.2f sigma=%.2f (max CDF dev %.3f)"
      % (nf.mu, nf.sigma, nf.cdf_max_dev))

fig, axes = plt.subplots(1, 2, figsize=(11, 4.5))
axes[0].plot(rx_positions, ds_ns, "b.-", ms=4)
axes[0].set_xlabel("receiver position  [m]")
axes[0].set_ylabel("RMS delay spread  [ns]")
axes[0].set_title("two-path corridor, 2.4 GHz")

axes[1].errorbar(k_true_db, means, yerr=stds, fmt="ko", ms=4, capsize=3,
                 label="moment estimate (I=512)")
axes[1].plot(k_true_db, k_true_db, "r--", lw=1, label="truth")
axes[1].set_xlabel("true K  [dB]")
axes[1].set_ylabel("estimated K  [dB]")
axes[1].legend()
fig.tight_layout()
fig.savefig(OUT / "delay_spread_and_kfactor.png", dpi=120)
print("wrote", OUT / "delay_spread_and_kfactor.png")
