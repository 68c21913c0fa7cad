"""
APDP averaging and multipath extraction
=======================================

From fading snapshots to an averaged power delay profile, a noise-floor
estimate, and the multipath components that survive the dual threshold.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import chansounder as cs

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

RECORD_LEN = 4800
RATE = 320e6
N_SNAPSHOTS = 400

bin_s = 1.0 / RATE

# A five-tap Rician channel.  The strong early taps have high K (steady
# specular part), the late ones are nearly Rayleigh.  Record-domain noise is
# set so the CIR noise floor lands around -45 dB relative to the main tap.
taps = cs.TapSet(
    taps=[
        cs.Tap(delay_s=10 * bin_s, mean_power_db=0.0, k_linear=10 ** (7 / 10)),
        cs.Tap(delay_s=22 * bin_s, mean_power_db=-6.0, k_linear=10 ** (3 / 10)),
        cs.Tap(delay_s=57 * bin_s, mean_power_db=-12.0, k_linear=1.0),
        cs.Tap(delay_s=130 * bin_s, mean_power_db=-21.0, k_linear=0.3),
        cs.Tap(delay_s=300 * bin_s, mean_power_db=-33.0, k_linear=0.0),
    ],
    noise_power_db=10 * np.log10(10 ** (-45 / 10) * RECORD_LEN),
)

snaps = cs.generate_snapshots(taps, N_SNAPSHOTS, RECORD_LEN, RATE, seed=7)
y_th = cs.to_frequency_domain(cs.calibration_record(RECORD_LEN, RATE))
cirs = [cs.to_cir(cs.deconvolve(cs.to_frequency_domain(s), y_th)) for s in snaps]

# Snapshots whose peak clears the trailing-window noise by less than 25 dB
# are dropped before averaging.  At this SNR nothing should be rejected.
kept = cs.snr_gate(cirs)
print("SNR gate kept %d / %d snapshots" % (len(kept), len(cirs)))

apdp = cs.average_apdp(kept)
floor_db = cs.estimate_noise_floor(apdp)  # median of the trailing 25 %
mpcs = cs.extract_mpcs(apdp)

print("noise floor  %.2f dB" % floor_db)
print("threshold    %.2f dB  (max of floor+6 and peak-25)" % mpcs.threshold_db)
print("extracted %d MPCs:" % len(mpcs.delays_s))
for d, p in zip(mpcs.delays_s, mpcs.powers_db):
    print("   %7.2f ns   %+7.2f dB" % (d * 1e9, p))

ds = cs.delay_spread(mpcs)
print("mean excess delay %.2f ns, RMS delay spread %.2f ns"
      % (ds.mean_excess_delay_s * 1e9, ds.rms_ds_s * 1e9))
print("received power (MPC sum) %.2f dB" % cs.received_power(mpcs))

# ---------------------------------------------------------------------------
fig, ax = plt.subplots(figsize=(9, 5))
t_ns = np.arange(RECORD_LEN) * bin_s * 1e9
ax.plot(t_ns, apdp.power_db, lw=0.7, label="APDP (%d snapshots)" % apdp.n_averaged)
ax.axhline(floor_db, color="gray", ls=":", label="noise floor")
ax.axhline(mpcs.threshold_db, color="r", ls="--", label="MPC threshold")
ax.plot(np.asarray(mpcs.delays_s) * 1e9, mpcs.powers_db, "k^", ms=7,
        mfc="none", label="extracted MPCs")
ax.set_xlim(0, 1200)
ax.set_ylim(floor_db - 10, 5)
ax.set_xlabel("delay  [ns]")
ax.set_ylabel("power  [dB]")
ax.legend(loc="upper right")
fig.tight_layout()
fig.savefig(OUT / "apdp_mpc_extraction.png", dpi=120)
print("wrote", OUT / "apdp_mpc_extraction.png")
